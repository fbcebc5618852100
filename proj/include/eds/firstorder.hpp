#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "eds/model.hpp"

namespace eds {

struct ProtocolConfig {
  unsigned long m1 = 1;
  Int challenge_atom = 19;              // must be an identified Indicator prime
  std::vector<Rat> challenge_set{Rat(1), Rat(19)};
};

/// Everything the prover hands the verifier for one protocol round.
struct Witness {
  long k2 = 0;  // multiple of m1
  long k3 = 0;  // = k1 * k2
  Quadruple q2, q3;
  ReducedPair p2, p3;
  Rat C;
};

struct VerifyResult {
  bool ok = false;
  std::string failed;  // empty, or the tag of the first failing equation
  Transcript transcript;
};

struct M1Report {
  bool success = true;
  unsigned long pairs_checked = 0;
  std::optional<std::pair<unsigned long, unsigned long>> first_failure;  // (l, k)
  bool companion_coprime = true;  // dd_W(x_{l m1}) vs nn_W(x_{k l m1})
};

struct IntegerTestResult {
  bool accepted = false;
  Transcript transcript;
};

/// The one-universal-quantifier definition of Z as an executable
/// prover / verifier / challenger protocol (h_K = 1 throughout).
class FirstOrder {
 public:
  FirstOrder(Model& model, RingCtx& ring, PrimeSets& sets, const CurveSeq& seq,
             ProtocolConfig cfg = {})
      : model_(model), ring_(ring), sets_(sets), seq_(seq), cfg_(std::move(cfg)) {
    if (cfg_.m1 == 0) fail(Errc::ConfigInvalid, "m1 must be positive");
  }

  const ProtocolConfig& config() const { return cfg_; }

  /// Checks dd(x_{l m1}) | nn((x_{l m1}/x_{k l m1} - k^2)^2) at every atom
  /// of the denominator, for all (l, k) in range, plus the companion
  /// coprimality of dd_W(x_{l m1}) and nn_W(x_{k l m1}).
  M1Report validate_m1(unsigned long m1, unsigned long l_hi, unsigned long k_hi) {
    if (m1 == 0) fail(Errc::ConfigInvalid, "m1 must be positive");
    M1Report rep;
    unsigned long n_max = seq_.config().n_max;
    for (unsigned long l = 1; l <= l_hi; ++l) {
      for (unsigned long k = 1; k <= k_hi; ++k) {
        if (l * m1 * k > n_max)
          fail(Errc::HorizonExceeded, "l*m1*k exceeds n_max");
        long lm = (long)(l * m1), klm = (long)(k * l * m1);
        if (gcd(seq_.den_x(lm), num(seq_.multiple(klm).point.x()) < 0
                                    ? Int(-num(seq_.multiple(klm).point.x()))
                                    : num(seq_.multiple(klm).point.x())) != 1)
          rep.companion_coprime = false;
        if (k == 1) continue;  // the difference is identically zero
        ++rep.pairs_checked;
        Rat diff = seq_.multiple(lm).point.x() / seq_.multiple(klm).point.x() - Rat(Int(k * k));
        if (diff == 0) continue;
        if (!divisibility_holds(lm, diff) && !rep.first_failure) {
          rep.success = false;
          rep.first_failure = {l, k};
        }
      }
    }
    return rep;
  }

  /// Minimal index k (of the shape n_q * q^shift, combined by lcm) whose
  /// denominator the given atom vector divides. certified=false means k
  /// exceeded the horizon and rests on the order-change law alone.
  unsigned long index_for_divisor(const DivisorVector& target, bool* certified = nullptr) {
    Ledger& led = sets_.ledger();
    Int k = 1;
    for (const auto& [id, e_target] : target.e) {
      const Atom& a = led.atom(id);
      unsigned long base = led.at(a.origin).exponent_of(a.id);
      if (base == 0) fail(Errc::UnknownAtom, "atom without an origin exponent");
      Int part(a.origin);
      if (e_target > base) {
        if (a.kind == AtomKind::PrimitiveCofactor)
          fail(Errc::HorizonExceeded,
               "no in-horizon index carries an unsplit block twice");
        unsigned long shift = (e_target - base + 1) / 2;
        part *= pow_ui(a.value, shift);
      }
      k = lcm(k, part);
    }
    bool in_horizon = k <= Int(seq_.config().n_max);
    if (in_horizon) {
      const IndexFactorization& fx = led.build(k.get_ui());
      for (const auto& [id, e_target] : target.e)
        if (fx.exponent_of(id) < e_target)
          fail(Errc::Internal, "constructed index misses the target divisor");
    }
    if (certified) *certified = in_horizon;
    if (!in_horizon)
      fail(Errc::HorizonExceeded, "required index " + k.get_str() + " exceeds n_max");
    return k.get_ui();
  }

  /// Builds the witness for z = z0^2 against the challenge b.
  Witness prove(long z0, const Rat& b) {
    ensure_gate();
    if (z0 == 0) fail(Errc::OutOfRange, "z0 must be nonzero");
    if (ring_.membership(b) != Membership::InRing)
      fail(Errc::NotInRing, "challenge b must lie in the ring");
    DivisorVector need = ring_.nn_w(b).pow(2);  // b^2 |_W B_2
    unsigned long k_needed = need.e.empty() ? 1 : index_for_divisor(need);
    unsigned long k2u = std::lcm(cfg_.m1, k_needed);
    long H = model_.horizon();
    if ((long)k2u > H || (Int(z0) * Int(k2u) > H) || (Int(z0) * Int(k2u) < -H))
      fail(Errc::HorizonExceeded, "witness indices exceed the horizon");
    Witness w;
    w.k2 = (long)k2u;
    w.k3 = z0 * w.k2;
    w.q2 = model_.encode(w.k2);
    w.q3 = model_.encode(w.k3);
    w.p2 = model_.reduced_pair(w.q2);
    w.p3 = model_.reduced_pair(w.q3);
    Rat z = Rat(Int(z0)) * Rat(Int(z0));
    Rat lhs = Rat(w.p3.A) * Rat(w.p2.B) * z - Rat(w.p3.B) * Rat(w.p2.A);
    w.C = (lhs * lhs) / (Rat(w.p2.B) * Rat(w.p2.B) * Rat(w.p2.B));
    VerifyResult check = verify(z, z0, b, w);
    if (!check.ok) fail(Errc::Internal, "prover output fails verification at " + check.failed);
    return w;
  }

  /// Checks the five protocol equations exactly; false carries the tag of
  /// the first failure.
  VerifyResult verify(const Rat& z, long k1, const Rat& b, const Witness& w) {
    ensure_gate();
    VerifyResult res;
    Transcript& tr = res.transcript;
    auto reject = [&](const std::string& tag) {
      res.ok = false;
      res.failed = tag;
      note(&tr, "verdict: rejected at " + tag);
      return res;
    };

    auto decodes = [&](const Quadruple& q, long* out) {
      try {
        *out = model_.decode(q);
        return true;
      } catch (const Error& e) {
        if (e.code() == Errc::DecodeNotFound || e.code() == Errc::NotOnCurve) return false;
        throw;
      }
    };
    long k2, k3;
    if (!decodes(w.q2, &k2) || !decodes(w.q3, &k3)) return reject("membership-E");
    if (k2 != w.k2 || k3 != w.k3) return reject("membership-E");
    Quadruple q1;
    try {
      q1 = model_.encode(k1);
    } catch (const Error& e) {
      if (e.code() != Errc::IndexOutOfRange) throw;
      return reject("membership-E");
    }
    if (k2 % (long)cfg_.m1 != 0) return reject("membership-E1");
    note(&tr, "membership: quadruples decode to k1=" + std::to_string(k1) + ", k2=" + std::to_string(k2) +
                  ", k3=" + std::to_string(k3));

    if (!model_.times_check(q1, w.q2, w.q3, &tr)) return reject("times");
    note(&tr, "product: k3 = k1*k2 holds");

    ReducedPair p2 = model_.reduced_pair(w.q2), p3 = model_.reduced_pair(w.q3);
    if (p2.A != w.p2.A || p2.B != w.p2.B || p3.A != w.p3.A || p3.B != w.p3.B)
      return reject("reduced-pairs");
    note(&tr, "pairs: reduced pairs are the lowest-terms x-coordinates");

    if (!ring_.divides(b * b, Rat(w.p2.B), &tr)) return reject("challenge-divides");
    note(&tr, "challenge: b^2 |_W B2 holds");

    Rat lhs = Rat(w.p3.A) * Rat(w.p2.B) * z - Rat(w.p3.B) * Rat(w.p2.A);
    if (lhs * lhs != Rat(w.p2.B) * Rat(w.p2.B) * Rat(w.p2.B) * w.C) return reject("congruence");
    Membership cm = ring_.membership(w.C);
    if (cm != Membership::InRing) return reject("C-membership");
    note(&tr, "congruence: (A3 B2 z - B3 A2)^2 = B2^3 C with C in the ring");

    res.ok = true;
    note(&tr, "verdict: accepted");
    return res;
  }

  /// The refuting challenge: the smallest power q^m of the challenge atom
  /// exceeding |numerator(z - k1^2)|.
  Rat challenge(const Rat& z, long k1) {
    Rat diff = z - Rat(Int(k1)) * Rat(Int(k1));
    if (diff == 0) fail(Errc::ZEqualsSquare, "z equals k1^2; no refuting challenge exists");
    std::optional<int> atom_id = sets_.ledger().find_atom(cfg_.challenge_atom);
    if (!atom_id || !sets_.is_indicator(*atom_id))
      fail(Errc::ConfigInvalid, "challenge atom must be an identified indicator prime");
    Int bound = num(diff) < 0 ? Int(-num(diff)) : num(diff);
    Rat b(cfg_.challenge_atom);
    while (Rat(num(b)) <= Rat(bound)) b *= Rat(cfg_.challenge_atom);
    return b;
  }

  /// Exhaustively enumerates in-horizon witnesses for (z, k1, b) and
  /// reports whether none verifies. Pi pins k3 = k1 k2 and the congruence
  /// pins C, so the witness space is the set of admissible k2.
  bool defeated(const Rat& z, long k1, const Rat& b, Transcript* tr = nullptr) {
    long H = model_.horizon();
    if (k1 == 0 || std::abs(k1) > H) return true;
    for (long k2a = 1; k2a <= H; ++k2a) {
      if (k2a % (long)cfg_.m1 != 0) continue;
      for (long sgn : {1, -1}) {
        long k2 = sgn * k2a;
        Int k3 = Int(k1) * Int(k2);
        if (k3 > H || k3 < -H) continue;
        Witness w;
        w.k2 = k2;
        w.k3 = (long)k3.get_si();
        w.q2 = model_.encode(w.k2);
        w.q3 = model_.encode(w.k3);
        w.p2 = model_.reduced_pair(w.q2);
        w.p3 = model_.reduced_pair(w.q3);
        if (!ring_.divides(b * b, Rat(w.p2.B))) continue;  // the challenge divisibility is unsatisfiable
        Rat lhs = Rat(w.p3.A) * Rat(w.p2.B) * z - Rat(w.p3.B) * Rat(w.p2.A);
        w.C = (lhs * lhs) / (Rat(w.p2.B) * Rat(w.p2.B) * Rat(w.p2.B));
        if (verify(z, k1, b, w).ok) {
          note(tr, "witness with k2 = " + std::to_string(k2) + " verifies; not defeated");
          return false;
        }
      }
    }
    note(tr, "no in-horizon witness verifies for k1 = " + std::to_string(k1));
    return true;
  }

  /// Three shifted-square rounds plus the elementary closing step.
  IntegerTestResult integer_test(const Rat& z0) {
    IntegerTestResult res;
    Transcript& tr = res.transcript;
    for (long j = 0; j <= 2; ++j) {
      Rat w = z0 + Rat(Int(j));
      Rat zj = w * w;
      if (w == 0) {
        // the zero class is handled separately by the model (phi(0))
        note(&tr, "round j=" + std::to_string(j) + ": z0 + j = 0, accepted as the zero class");
        continue;
      }
      if (den(w) == 1 && num(w).fits_slong_p()) {
        long k1 = (long)num(w).get_si();
        bool round_ok = true;
        for (const Rat& b : cfg_.challenge_set) {
          Witness wit = prove(k1, b);
          VerifyResult vr = verify(zj, k1, b, wit);
          round_ok = round_ok && vr.ok;
          note(&tr, "round j=" + std::to_string(j) + ", challenge " + rat_str(b) + ": " +
                        (vr.ok ? "verified" : "failed at " + vr.failed));
        }
        if (!round_ok) {
          res.accepted = false;
          return res;
        }
      } else {
        // not an integer square: every in-horizon k1 must be refuted
        long H = model_.horizon();
        for (long k1a = 1; k1a <= H; ++k1a) {
          for (long sgn : {1, -1}) {
            long k1 = sgn * k1a;
            Rat bc = challenge(zj, k1);
            if (!defeated(zj, k1, bc, nullptr)) {
              // a surviving witness against a sufficient challenge would
              // falsify the refutation argument; surface it loudly
              note(&tr, "ALARM round j=" + std::to_string(j) + ": k1 = " + std::to_string(k1) +
                            " survives its challenge despite z0 + j being no integer");
              res.accepted = false;
              return res;
            }
          }
        }
        note(&tr, "round j=" + std::to_string(j) + ": all in-horizon k1 refuted, so (z0+" +
                      std::to_string(j) + ")^2 is no integer square");
        res.accepted = false;
        return res;
      }
    }
    // closing step: z0^2 and (z0+1)^2 integral forces z0 integral
    bool closing = den(z0) == 1;
    note(&tr, std::string("closing step: (z0+1)^2 - z0^2 = 2 z0 + 1 and z0^2 integral force z0 "
                          "in Z: ") +
                  (closing ? "confirmed" : "violated"));
    res.accepted = closing;
    return res;
  }

 private:
  /// The protocol refuses to run until m1 validates on the constants
  /// horizon (the same horizon that pins m0).
  void ensure_gate() {
    if (gate_checked_) return;
    unsigned long horizon = std::min(seq_.config().n_max, sets_.m0_report().horizon);
    for (unsigned long l = 1; l * cfg_.m1 <= horizon; ++l) {
      for (unsigned long k = 2; k * l * cfg_.m1 <= horizon; ++k) {
        long lm = (long)(l * cfg_.m1), klm = (long)(k * l * cfg_.m1);
        Rat diff = seq_.multiple(lm).point.x() / seq_.multiple(klm).point.x() - Rat(Int(k * k));
        if (diff != 0 && !divisibility_holds(lm, diff))
          fail(Errc::ConfigInvalid, "m1 = " + std::to_string(cfg_.m1) +
                                        " fails the divisibility law at (l, k) = (" +
                                        std::to_string(l) + ", " + std::to_string(k) + ")");
      }
    }
    gate_checked_ = true;
  }

  static std::string rat_str(const Rat& q) {
    return den(q) == 1 ? num(q).get_str() : num(q).get_str() + "/" + den(q).get_str();
  }

  /// dd(x_lm) | nn(diff^2) checked atom by atom on the ledger side.
  bool divisibility_holds(long lm, const Rat& diff) {
    Ledger& led = sets_.ledger();
    const IndexFactorization& fx = led.build((unsigned long)lm);
    Int dn = num(diff) < 0 ? Int(-num(diff)) : num(diff);
    Int dd = den(diff);
    for (const auto& [id, e] : fx.entries) {
      const Atom& a = led.atom(id);
      long have;
      if (a.kind == AtomKind::IdentifiedPrime) {
        have = 2 * ((long)valuation(dn, a.value) - (long)valuation(dd, a.value));
      } else {
        long en = 0, ed = 0;
        Int t = dn;
        while (divisible(t, a.value)) t = divexact(t, a.value), ++en;
        t = dd;
        while (divisible(t, a.value)) t = divexact(t, a.value), ++ed;
        have = 2 * (en - ed);
      }
      if (have < (long)e) return false;
    }
    return true;
  }

  Model& model_;
  RingCtx& ring_;
  PrimeSets& sets_;
  const CurveSeq& seq_;
  ProtocolConfig cfg_;
  bool gate_checked_ = false;
};

}  // namespace eds
