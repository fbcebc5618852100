#pragma once

#include <stdexcept>
#include <string>

namespace eds {

enum class Errc {
  ConfigInvalid,
  IndexOutOfRange,
  TorsionCollision,
  BadPrime,
  LawViolation,
  FingerprintMismatch,
  CorruptFile,
  NoPrimitivePart,
  OutOfRange,
  HorizonExceeded,
  NoWitness,
  UnknownAtom,
  Unclassifiable,
  NotInRing,
  ZEqualsSquare,
  NotOnCurve,
  DecodeNotFound,
  Internal,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ConfigInvalid: return "config-invalid";
    case Errc::IndexOutOfRange: return "index-out-of-range";
    case Errc::TorsionCollision: return "torsion-collision";
    case Errc::BadPrime: return "bad-prime";
    case Errc::LawViolation: return "law-violation";
    case Errc::FingerprintMismatch: return "fingerprint-mismatch";
    case Errc::CorruptFile: return "corrupt-file";
    case Errc::NoPrimitivePart: return "no-primitive-part";
    case Errc::OutOfRange: return "out-of-range";
    case Errc::HorizonExceeded: return "horizon-exceeded";
    case Errc::NoWitness: return "no-witness";
    case Errc::UnknownAtom: return "unknown-atom";
    case Errc::Unclassifiable: return "unclassifiable";
    case Errc::NotInRing: return "not-in-ring";
    case Errc::ZEqualsSquare: return "z-equals-square";
    case Errc::NotOnCurve: return "not-on-curve";
    case Errc::DecodeNotFound: return "decode-not-found";
    case Errc::Internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace eds
