#pragma once

#include <map>
#include <string>
#include <vector>

#include "eds/apparition.hpp"
#include "eds/primesets.hpp"

namespace eds {

enum class Membership { InRing, NotInRing, Unclassifiable };

inline const char* to_string(Membership m) {
  switch (m) {
    case Membership::InRing: return "in-ring";
    case Membership::NotInRing: return "not-in-ring";
    case Membership::Unclassifiable: return "unclassifiable";
  }
  return "?";
}

/// Valuation view of a rational against the classified atom table:
/// signed valuations at every ledger atom, plus whatever numerator and
/// denominator content resisted classification.
struct RingView {
  std::map<int, long> vals;       // atom id -> signed valuation (nonzero entries)
  std::map<int, long> indicator;  // restriction of vals to Indicator atoms
  std::vector<Int> den_unknown;   // denominator content no atom or certificate explains
  std::vector<Int> num_unknown;
  bool zero = false;

  long at(int atom_id) const {
    auto it = vals.find(atom_id);
    return it == vals.end() ? 0 : it->second;
  }
};

/// Semantics of O_{K, W_K} at desk scale. Divisibility and coprimality
/// compare valuations at the ledger's Indicator atoms; membership demands
/// a fully explained denominator and is three-valued.
class RingCtx {
 public:
  RingCtx(PrimeSets& sets, const ApparitionOracle& appar)
      : sets_(sets),
        appar_(appar),
        // residual certification is best-effort; keep rho on a short leash
        fac_({sets.ledger().seq().config().budget.trial,
              std::min<unsigned long>(sets.ledger().seq().config().budget.rho_iters, 1ul << 18),
              sets.ledger().seq().config().budget.mr_rounds}) {}

  PrimeSets& sets() { return sets_; }

  RingView view(const Rat& x) {
    RingView v;
    if (x == 0) {
      v.zero = true;
      return v;
    }
    if (view_cache_atoms_ != sets_.ledger().atoms().size()) {
      view_cache_.clear();  // new atoms can re-explain old residuals
      view_cache_atoms_ = sets_.ledger().atoms().size();
    }
    auto hit = view_cache_.find(x);
    if (hit != view_cache_.end()) return hit->second;
    Int n = num(x), d = den(x);
    if (n < 0) n = -n;
    for (const Int& p : sets_.ledger().seq().bad_primes()) {
      n = remove_factor(n, p).first;
      d = remove_factor(d, p).first;
    }
    for (int pass = 0; pass < 4; ++pass) {
      RingView fresh;
      Int rn = n, rd = d;
      strip_atoms(rn, rd, fresh);
      bool grew = false;
      fresh.den_unknown = certify_inverted(rd, &grew);
      if (rn != 1) fresh.num_unknown.push_back(rn);  // informational only
      for (const auto& [id, val] : fresh.vals)
        if (sets_.is_indicator(id)) fresh.indicator[id] = val;
      v = std::move(fresh);
      if (!grew) break;  // ledger unchanged; the view is final
    }
    view_cache_atoms_ = sets_.ledger().atoms().size();
    if (view_cache_.size() < 4096) view_cache_.emplace(x, v);
    return v;
  }

  /// Strip-only valuation map (no residual certification). Cheap even on
  /// coordinates with huge unclassified content.
  std::map<int, long> indicator_vals(const Rat& x) {
    if (x == 0) fail(Errc::OutOfRange, "valuation of zero");
    Int n = num(x), d = den(x);
    if (n < 0) n = -n;
    RingView tmp;
    strip_atoms(n, d, tmp);
    std::map<int, long> out;
    for (const auto& [id, val] : tmp.vals)
      if (sets_.is_indicator(id)) out[id] = val;
    return out;
  }

  Membership membership(const Rat& x) {
    RingView v = view(x);
    return membership_of(v);
  }

  Membership membership_of(const RingView& v) const {
    if (v.zero) return Membership::InRing;
    for (const auto& [id, val] : v.indicator)
      if (val < 0) return Membership::NotInRing;
    if (!v.den_unknown.empty()) return Membership::Unclassifiable;
    return Membership::InRing;
  }

  /// A |_W B: every Indicator-atom valuation of B is >= that of A.
  /// Pre: A, B in the ring, A != 0.
  bool divides(const Rat& A, const Rat& B, std::vector<std::string>* transcript = nullptr) {
    RingView va = view(A), vb = view(B);
    require_ring(va, "A");
    require_ring(vb, "B");
    if (A == 0) fail(Errc::OutOfRange, "division by zero in the ring");
    if (B == 0) return true;
    bool ok = true;
    for (const auto& [id, val] : va.indicator) {
      long bv = vb.at(id);
      bool here = bv >= val;
      if (transcript)
        transcript->push_back("atom " + sets_.ledger().atom(id).value.get_str() + ": ord(B)=" +
                              std::to_string(bv) + (here ? " >= " : " < ") + "ord(A)=" +
                              std::to_string(val));
      ok = ok && here;
    }
    return ok;
  }

  /// (A,B)_W = 1: no Indicator atom has positive valuation in both.
  /// Pre: A, B in the ring, AB != 0.
  bool coprime(const Rat& A, const Rat& B, std::vector<std::string>* transcript = nullptr) {
    if (A == 0 || B == 0) fail(Errc::OutOfRange, "ring coprimality needs AB != 0");
    RingView va = view(A), vb = view(B);
    require_ring(va, "A");
    require_ring(vb, "B");
    bool ok = true;
    for (const auto& [id, val] : va.indicator) {
      if (val <= 0) continue;
      long bv = vb.at(id);
      if (bv > 0) {
        ok = false;
        if (transcript)
          transcript->push_back("shared atom " + sets_.ledger().atom(id).value.get_str() + ": ord(A)=" +
                                std::to_string(val) + ", ord(B)=" + std::to_string(bv));
      }
    }
    return ok;
  }

  /// Valuation of x at one atom (num minus den multiplicity).
  long val_at(const Rat& x, int atom_id) {
    if (x == 0) fail(Errc::OutOfRange, "valuation of zero");
    const Atom& a = sets_.ledger().atom(atom_id);
    return (long)multiplicity(num(x) < 0 ? Int(-num(x)) : num(x), a) - (long)multiplicity(den(x), a);
  }

  /// nn_W(x): Indicator-atom valuations of the numerator side (positive
  /// valuations of x), as a divisor vector.
  DivisorVector nn_w(const Rat& x) {
    DivisorVector out;
    for (const auto& [id, val] : indicator_vals(x))
      if (val > 0) out.e[id] = (unsigned long)val;
    return out;
  }

  /// dd_W(x) = nn_W(1/x).
  DivisorVector dd_w(const Rat& x) {
    DivisorVector out;
    for (const auto& [id, val] : indicator_vals(x))
      if (val < 0) out.e[id] = (unsigned long)(-val);
    return out;
  }

 private:
  void require_ring(const RingView& v, const char* who) {
    switch (membership_of(v)) {
      case Membership::InRing: return;
      case Membership::NotInRing: fail(Errc::NotInRing, std::string(who) + " is not in the ring");
      case Membership::Unclassifiable:
        fail(Errc::Unclassifiable, std::string(who) + " cannot be classified within budget");
    }
  }

  static unsigned long multiplicity(const Int& v, const Atom& a) {
    if (a.kind == AtomKind::IdentifiedPrime) return valuation(v, a.value);
    unsigned long e = 0;
    Int rest = v;
    while (divisible(rest, a.value)) {
      rest = divexact(rest, a.value);
      ++e;
    }
    return e;
  }

  void strip_atoms(Int& n, Int& d, RingView& v) {
    for (const Atom& a : sets_.ledger().atoms()) {
      unsigned long en = 0, ed = 0;
      if (a.kind == AtomKind::IdentifiedPrime) {
        std::tie(n, en) = remove_factor(n, a.value);
        std::tie(d, ed) = remove_factor(d, a.value);
      } else {
        while (divisible(n, a.value)) n = divexact(n, a.value), ++en;
        while (divisible(d, a.value)) d = divexact(d, a.value), ++ed;
      }
      if (en != ed) v.vals[a.id] = (long)en - (long)ed;
    }
  }

  /// Explains residual content: factors it and certifies each found prime
  /// as Inverted where possible (not an indicator of any in-horizon origin).
  /// Returns whatever resists; may extend the ledger (sets *grew).
  std::vector<Int> certify_inverted(const Int& residual, bool* grew) {
    std::vector<Int> unknown;
    if (residual == 1) return unknown;
    FactorResult fr = fac_.factor(residual);
    if (fr.leftover != 1) unknown.push_back(fr.leftover);
    unsigned long n_max = sets_.ledger().seq().config().n_max;
    for (const auto& [p, e] : fr.primes) {
      if (p > Int(ApparitionOracle::kOrderCap)) {
        unknown.push_back(p);
        continue;
      }
      unsigned long nq;
      try {
        nq = appar_.record(p).n_q;
      } catch (const Error&) {
        unknown.push_back(p);
        continue;
      }
      if (nq <= n_max) {
        if (!sets_.ledger().has(nq)) {
          sets_.ledger().build(nq);
          if (grew && sets_.ledger().find_atom(p)) {
            *grew = true;  // the prime is a ledger atom now; re-run the view
            continue;
          }
        }
        // apparition index in horizon yet not an atom: the prime sits
        // inside an unsplit block and cannot be placed on its own
        unknown.push_back(p);
      } else if (!is_prime_power(nq)) {
        // certified inverted: indicators only arise at prime-power indices
      } else {
        unknown.push_back(p);  // possibly the indicator of an out-of-horizon origin
      }
    }
    return unknown;
  }

  PrimeSets& sets_;
  const ApparitionOracle& appar_;
  Factorizer fac_;
  std::map<Rat, RingView, RatLess> view_cache_;
  size_t view_cache_atoms_ = 0;
};

}  // namespace eds
