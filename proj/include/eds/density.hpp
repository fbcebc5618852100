#pragma once

#include <cmath>
#include <vector>

#include "eds/primesets.hpp"

namespace eds {

struct CensusRow {
  unsigned long X;
  unsigned long indicator_count;  // identified indicator primes <= X
  unsigned long prime_count;      // pi(X)
  Rat ratio;
  double implied_constant = 0.0;  // indicator_count / sqrt(X): diagnostic only
};

struct HasseRow {
  unsigned long origin;  // a prime power l^j
  Int value;             // atom value (or block value)
  bool via_budget;       // certified through the trial budget, not directly
  bool ok;
};

/// Appendix computations: the Hasse-bound certificate for indicator
/// origins and the finite census of indicator primes against pi(X).
class Density {
 public:
  explicit Density(PrimeSets& sets) : sets_(sets) {}

  /// l^j < 3p for every identified prime of prime-power origin l^j; for
  /// unsplit blocks every inner prime exceeds the trial budget >= l^j.
  std::vector<HasseRow> hasse_check() {
    std::vector<HasseRow> rows;
    const Ledger& led = sets_.ledger();
    unsigned long trial = led.seq().config().budget.trial;
    for (const Atom& a : led.atoms()) {
      if (!is_prime_power(a.origin)) continue;
      HasseRow r{a.origin, a.value, a.kind == AtomKind::PrimitiveCofactor, false};
      if (r.via_budget) {
        r.ok = trial >= a.origin;
      } else {
        r.ok = Int(a.origin) < 3 * a.value;
      }
      rows.push_back(std::move(r));
    }
    return rows;
  }

  std::vector<CensusRow> census(const std::vector<unsigned long>& xs) {
    std::vector<Int> indicators;
    for (const Atom& a : sets_.ledger().atoms())
      if (a.kind == AtomKind::IdentifiedPrime && sets_.is_indicator(a.id))
        indicators.push_back(a.value);

    unsigned long max_x = 2;
    for (unsigned long x : xs) max_x = std::max(max_x, x);
    Factorizer sieve({max_x, 0, 25});
    const auto& primes = sieve.small_primes();

    std::vector<CensusRow> rows;
    for (unsigned long x : xs) {
      CensusRow row{x, 0, 0, Rat(0)};
      for (const Int& v : indicators)
        if (v <= Int(x)) ++row.indicator_count;
      row.prime_count =
          (unsigned long)(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
      if (row.prime_count > 0) row.ratio = make_rat(Int(row.indicator_count), Int(row.prime_count));
      row.implied_constant = (double)row.indicator_count / std::sqrt((double)x);
      rows.push_back(std::move(row));
    }
    return rows;
  }

 private:
  PrimeSets& sets_;
};

}  // namespace eds
