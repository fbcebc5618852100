#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "eds/numeric.hpp"

namespace eds {

struct FactorBudget {
  unsigned long trial = 1'000'000;     // trial-division bound
  unsigned long rho_iters = 1ul << 26; // Pollard rho iteration cap per cofactor
  int mr_rounds = 64;                  // Miller-Rabin rounds

  bool operator==(const FactorBudget&) const = default;
};

/// A budgeted factorization: identified prime powers plus one unsplit
/// leftover (1 when the input factored completely). Prime exponents carry
/// full multiplicity; the leftover is composite and coprime to all primes
/// below the trial bound.
struct FactorResult {
  std::vector<std::pair<Int, unsigned long>> primes;  // sorted by value
  Int leftover = 1;

  Int reconstruct() const {
    Int v = leftover;
    for (const auto& [p, e] : primes) v *= pow_ui(p, e);
    return v;
  }
};

class Factorizer {
 public:
  explicit Factorizer(FactorBudget budget = {}) : budget_(budget) {}

  const FactorBudget& budget() const { return budget_; }

  const std::vector<uint32_t>& small_primes() const {
    if (primes_.empty()) sieve();
    return primes_;
  }

  bool probable_prime(const Int& n) const {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), budget_.mr_rounds) != 0;
  }

  /// Certainly prime (small or GMP-definite), as opposed to MR-probable.
  bool proven_prime(const Int& n) const {
    if (n < 2) return false;
    if (n <= Int(budget_.trial)) {
      return mpz_probab_prime_p(n.get_mpz_t(), budget_.mr_rounds) != 0;
    }
    return mpz_probab_prime_p(n.get_mpz_t(), budget_.mr_rounds) == 2;
  }

  FactorResult factor(Int v) const {
    if (v < 0) v = -v;
    if (v == 0) fail(Errc::Internal, "factor(0)");
    FactorResult out;
    if (v == 1) return out;

    std::map<Int, unsigned long, IntLess> found;
    for (uint32_t p : small_primes()) {
      if (v == 1) break;
      if (Int(p) * p > v) break;
      if (mpz_divisible_ui_p(v.get_mpz_t(), p)) {
        auto [rest, e] = remove_factor(v, Int(p));
        found[Int(p)] += e;
        v = rest;
      }
    }
    if (v > 1) {
      if (v <= Int(budget_.trial) * Int(budget_.trial)) {
        // survived trial division below sqrt: prime
        found[v] += 1;
      } else {
        split(v, 1, found, out.leftover);
      }
    }
    out.primes.assign(found.begin(), found.end());
    return out;
  }

  /// Deterministic Brent-cycle rho; returns a nontrivial factor or 0.
  static Int rho_brent(const Int& n, unsigned long max_iters, unsigned long c0 = 1) {
    if (divisible(n, 2)) return 2;
    for (unsigned long c = c0; c <= c0 + 4; c += 2) {
      Int y = 2, q = 1, g = 1, x, ys;
      unsigned long r = 1, used = 0;
      const unsigned long m = 128;
      while (g == 1 && used < max_iters) {
        x = y;
        for (unsigned long i = 0; i < r && used < max_iters; ++i, ++used) {
          y = (y * y + c) % n;
        }
        unsigned long k = 0;
        while (k < r && g == 1 && used < max_iters) {
          ys = y;
          unsigned long lim = std::min(m, r - k);
          for (unsigned long i = 0; i < lim && used < max_iters; ++i, ++used) {
            y = (y * y + c) % n;
            Int d = x - y;
            if (d < 0) d = -d;
            q = (q * d) % n;
          }
          g = gcd(q, n);
          k += lim;
        }
        r *= 2;
      }
      if (g == n) {
        // backtrack one step at a time
        do {
          ys = (ys * ys + c) % n;
          Int d = x - ys;
          if (d < 0) d = -d;
          g = gcd(d, n);
        } while (g == 1);
      }
      if (g != 1 && g != n) return g;
      // cycle collapsed or budget spent with this c; retry with the next one
      if (used >= max_iters) return 0;
    }
    return 0;
  }

 private:
  void split(const Int& v, unsigned long mult, std::map<Int, unsigned long, IntLess>& found,
             Int& leftover) const {
    if (v == 1) return;
    if (probable_prime(v)) {
      found[v] += mult;
      return;
    }
    if (is_perfect_square(v)) {
      split(isqrt(v), 2 * mult, found, leftover);
      return;
    }
    if (mpz_perfect_power_p(v.get_mpz_t())) {
      for (unsigned long k = 3; k <= mpz_sizeinbase(v.get_mpz_t(), 2); ++k) {
        Int root;
        if (mpz_root(root.get_mpz_t(), v.get_mpz_t(), k) != 0) {
          split(root, k * mult, found, leftover);
          return;
        }
      }
    }
    Int d = budget_.rho_iters ? rho_brent(v, budget_.rho_iters) : Int(0);
    if (d == 0) {
      leftover *= pow_ui(v, mult);
      return;
    }
    split(d, mult, found, leftover);
    split(divexact(v, d), mult, found, leftover);
  }

  void sieve() const {
    unsigned long bound = std::max<unsigned long>(budget_.trial, 3);
    std::vector<bool> comp(bound + 1, false);
    for (unsigned long p = 2; p * p <= bound; ++p) {
      if (!comp[p])
        for (unsigned long q = p * p; q <= bound; q += p) comp[q] = true;
    }
    for (unsigned long p = 2; p <= bound; ++p)
      if (!comp[p]) primes_.push_back(static_cast<uint32_t>(p));
  }

  FactorBudget budget_;
  mutable std::vector<uint32_t> primes_;
};

}  // namespace eds
