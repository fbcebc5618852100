#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "eds/curve.hpp"
#include "eds/factor.hpp"

namespace eds {

enum class AtomKind { IdentifiedPrime, PrimitiveCofactor };

enum class PrimeStatus { ProvenPrime, ProbablePrime, CompositeUnsplit, Unknown };

inline const char* to_string(AtomKind k) {
  return k == AtomKind::IdentifiedPrime ? "prime" : "cofactor";
}

inline const char* to_string(PrimeStatus s) {
  switch (s) {
    case PrimeStatus::ProvenPrime: return "proven-prime";
    case PrimeStatus::ProbablePrime: return "probable-prime";
    case PrimeStatus::CompositeUnsplit: return "composite-unsplit";
    case PrimeStatus::Unknown: return "unknown";
  }
  return "unknown";
}

/// A factor unit of a denominator: an identified prime, or the unsplit
/// primitive cofactor of its origin index (value a perfect square, held
/// to exponent 1 wherever it appears).
struct Atom {
  int id = -1;
  AtomKind kind = AtomKind::IdentifiedPrime;
  Int value;
  unsigned long origin = 0;  // least index whose denominator introduces this atom
  PrimeStatus status = PrimeStatus::Unknown;
};

struct IndexFactorization {
  unsigned long n = 0;
  std::vector<std::pair<int, unsigned long>> entries;  // (atom id, exponent), id ascending
  std::vector<std::pair<Int, unsigned long>> bad;      // (bad prime, exponent)

  unsigned long exponent_of(int atom_id) const {
    for (const auto& [id, e] : entries)
      if (id == atom_id) return e;
    return 0;
  }
};

/// Persistent factor ledger over den_x(n). Build is recursive over the
/// divisor lattice: the old part of index n is predicted exactly from the
/// atoms of its proper divisors via the order-change law, and only the
/// primitive remainder is fed to the factorizer.
class Ledger {
 public:
  explicit Ledger(const CurveSeq& seq) : seq_(seq), fac_(seq.config().budget) {}

  const CurveSeq& seq() const { return seq_; }

  bool has(unsigned long n) const { return indices_.count(n) > 0; }

  const IndexFactorization& at(unsigned long n) const {
    auto it = indices_.find(n);
    if (it == indices_.end()) fail(Errc::IndexOutOfRange, "index not built: " + std::to_string(n));
    return it->second;
  }

  const Atom& atom(int id) const {
    if (id < 0 || id >= (int)atoms_.size()) fail(Errc::UnknownAtom, "atom id " + std::to_string(id));
    return atoms_[(size_t)id];
  }

  const std::vector<Atom>& atoms() const { return atoms_; }

  std::vector<int> atoms_of_origin(unsigned long n) const {
    std::vector<int> out;
    for (const Atom& a : atoms_)
      if (a.origin == n) out.push_back(a.id);
    return out;
  }

  std::optional<int> find_atom(const Int& value) const {
    auto it = by_value_.find(value);
    if (it == by_value_.end()) return std::nullopt;
    return it->second;
  }

  const IndexFactorization& build(unsigned long n) {
    if (n == 0 || n > seq_.config().n_max)
      fail(Errc::IndexOutOfRange, "index " + std::to_string(n) + " out of range");
    auto it = indices_.find(n);
    if (it != indices_.end()) return it->second;
    for (unsigned long d = 1; d < n; ++d)
      if (n % d == 0) build(d);

    Int D = seq_.den_x(static_cast<long>(n));
    IndexFactorization fx;
    fx.n = n;

    for (const Int& p : seq_.bad_primes()) {
      auto [rest, e] = remove_factor(D, p);
      if (e) fx.bad.emplace_back(p, e);
      D = rest;
    }

    // old part, atom by atom, exponents per the order-change law
    for (const Atom& a : atoms_) {
      if (a.origin >= n || n % a.origin != 0) continue;
      Int ratio(n / a.origin);
      unsigned long predicted;
      if (a.kind == AtomKind::IdentifiedPrime) {
        unsigned long base = at(a.origin).exponent_of(a.id);
        predicted = base + 2 * valuation(ratio, a.value);
        auto [rest, actual] = remove_factor(D, a.value);
        if (actual != predicted)
          fail(Errc::LawViolation, "prime " + a.value.get_str() + " at index " + std::to_string(n) +
                                       ": predicted exponent " + std::to_string(predicted) +
                                       ", actual " + std::to_string(actual));
        D = rest;
      } else {
        predicted = 1;  // block primes exceed the budget, so they never shift
        D = divexact(D, a.value, "old cofactor block does not divide the denominator");
        if (divisible(D, a.value))
          fail(Errc::LawViolation, "cofactor block of origin " + std::to_string(a.origin) +
                                       " appears twice at index " + std::to_string(n));
      }
      if (predicted) fx.entries.emplace_back(a.id, predicted);
    }

    // primitive remainder
    if (D > 1) {
      FactorResult fr = fac_.factor(D);
      for (const auto& [p, e] : fr.primes) {
        if (e % 2 != 0)
          fail(Errc::LawViolation,
               "odd exponent " + std::to_string(e) + " of primitive prime " + p.get_str());
        int id = new_atom(AtomKind::IdentifiedPrime, p, n,
                          fac_.proven_prime(p) ? PrimeStatus::ProvenPrime : PrimeStatus::ProbablePrime);
        fx.entries.emplace_back(id, e);
      }
      if (fr.leftover > 1) {
        if (!is_perfect_square(fr.leftover))
          fail(Errc::LawViolation, "unsplit cofactor at index " + std::to_string(n) + " is not a square");
        for (const Atom& a : atoms_)
          if (a.origin < n && gcd(fr.leftover, a.value) != 1)
            fail(Errc::LawViolation, "primitive cofactor shares content with an older atom");
        int id = new_atom(AtomKind::PrimitiveCofactor, fr.leftover, n, PrimeStatus::CompositeUnsplit);
        fx.entries.emplace_back(id, 1);
      }
    }

    std::sort(fx.entries.begin(), fx.entries.end());
    auto [pos, inserted] = indices_.emplace(n, std::move(fx));
    return pos->second;
  }

  void build_range(unsigned long hi) {
    for (unsigned long n = 1; n <= hi; ++n) build(n);
  }

  /// Product of all atoms of origin exactly n, with multiplicity.
  Int primitive_cofactor(unsigned long n) const {
    const IndexFactorization& fx = at(n);
    Int out = 1;
    for (const auto& [id, e] : fx.entries)
      if (atom(id).origin == n) out *= pow_ui(atom(id).value, e);
    return out;
  }

  /// Exact reconstruction of den_x(n), bad part included.
  Int reconstruct(unsigned long n) const {
    const IndexFactorization& fx = at(n);
    Int out = 1;
    for (const auto& [p, e] : fx.bad) out *= pow_ui(p, e);
    for (const auto& [id, e] : fx.entries) out *= pow_ui(atom(id).value, e);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    const CurveConfig& cfg = seq_.config();
    j["curve"] = {{"a", cfg.a.get_str()}, {"b", cfg.b.get_str()}, {"gen", cfg.gen_string()}};
    j["budget"] = {{"mr_rounds", cfg.budget.mr_rounds},
                   {"rho_iters", cfg.budget.rho_iters},
                   {"trial", cfg.budget.trial}};
    j["atoms"] = nlohmann::json::array();
    for (const Atom& a : atoms_) {
      j["atoms"].push_back({{"id", a.id},
                            {"kind", to_string(a.kind)},
                            {"origin", a.origin},
                            {"status", to_string(a.status)},
                            {"value", a.value.get_str()}});
    }
    nlohmann::json idx = nlohmann::json::object();
    for (const auto& [n, fx] : indices_) {
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& [id, e] : fx.entries) entries.push_back({id, e});
      nlohmann::json bad = nlohmann::json::array();
      for (const auto& [p, e] : fx.bad) bad.push_back({p.get_str(), e});
      idx[std::to_string(n)] = {{"bad", bad}, {"entries", entries}};
    }
    j["indices"] = idx;
    return j;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(Errc::CorruptFile, "cannot open " + path + " for writing");
    out << to_json().dump(2) << "\n";
  }

  static Ledger load(const std::string& path, const CurveSeq& seq) {
    std::ifstream in(path);
    if (!in) fail(Errc::CorruptFile, "cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::CorruptFile, std::string("invalid ledger JSON: ") + e.what());
    }
    try {
      const CurveConfig& cfg = seq.config();
      if (j.at("curve").at("a").get<std::string>() != cfg.a.get_str() ||
          j.at("curve").at("b").get<std::string>() != cfg.b.get_str() ||
          j.at("curve").at("gen").get<std::string>() != cfg.gen_string())
        fail(Errc::FingerprintMismatch, "ledger was built for a different curve");
      FactorBudget b;
      b.mr_rounds = j.at("budget").at("mr_rounds").get<int>();
      b.rho_iters = j.at("budget").at("rho_iters").get<unsigned long>();
      b.trial = j.at("budget").at("trial").get<unsigned long>();
      if (!(b == cfg.budget)) fail(Errc::FingerprintMismatch, "ledger was built with a different budget");

      Ledger led(seq);
      for (const auto& ja : j.at("atoms")) {
        Atom a;
        a.id = ja.at("id").get<int>();
        std::string kind = ja.at("kind").get<std::string>();
        a.kind = kind == "prime" ? AtomKind::IdentifiedPrime : AtomKind::PrimitiveCofactor;
        a.origin = ja.at("origin").get<unsigned long>();
        a.value = Int(ja.at("value").get<std::string>());
        std::string st = ja.at("status").get<std::string>();
        a.status = st == "proven-prime"       ? PrimeStatus::ProvenPrime
                   : st == "probable-prime"   ? PrimeStatus::ProbablePrime
                   : st == "composite-unsplit" ? PrimeStatus::CompositeUnsplit
                                               : PrimeStatus::Unknown;
        if (a.id != (int)led.atoms_.size()) fail(Errc::CorruptFile, "non-contiguous atom ids");
        led.by_value_.emplace(a.value, a.id);
        led.atoms_.push_back(std::move(a));
      }
      for (const auto& [key, jx] : j.at("indices").items()) {
        IndexFactorization fx;
        fx.n = std::stoul(key);
        for (const auto& e : jx.at("entries")) {
          int id = e.at(0).get<int>();
          if (id < 0 || id >= (int)led.atoms_.size())
            fail(Errc::CorruptFile, "entry references unknown atom id");
          fx.entries.emplace_back(id, e.at(1).get<unsigned long>());
        }
        for (const auto& e : jx.at("bad"))
          fx.bad.emplace_back(Int(e.at(0).get<std::string>()), e.at(1).get<unsigned long>());
        led.indices_.emplace(fx.n, std::move(fx));
      }
      for (const auto& [n, fx] : led.indices_)
        for (unsigned long d = 1; d < n; ++d)
          if (n % d == 0 && !led.indices_.count(d))
            fail(Errc::CorruptFile, "ledger is not closed under divisors");
      return led;
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(Errc::CorruptFile, std::string("ledger schema mismatch: ") + e.what());
    }
  }

 private:
  int new_atom(AtomKind kind, const Int& value, unsigned long origin, PrimeStatus status) {
    if (by_value_.count(value))
      fail(Errc::LawViolation, "atom value " + value.get_str() + " introduced twice (origin " +
                                   std::to_string(origin) + ")");
    Atom a;
    a.id = (int)atoms_.size();
    a.kind = kind;
    a.value = value;
    a.origin = origin;
    a.status = status;
    by_value_.emplace(value, a.id);
    atoms_.push_back(std::move(a));
    return atoms_.back().id;
  }

  const CurveSeq& seq_;
  Factorizer fac_;
  std::vector<Atom> atoms_;
  std::map<Int, int, IntLess> by_value_;
  std::map<unsigned long, IndexFactorization> indices_;
};

}  // namespace eds
