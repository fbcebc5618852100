#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eds/errors.hpp"

namespace eds {

using Int = mpz_class;
using Rat = mpq_class;

/// ord_p(n): multiplicity of p in n. n must be nonzero.
inline unsigned long valuation(const Int& n, const Int& p) {
  if (n == 0) fail(Errc::Internal, "valuation of zero");
  Int rest;
  return mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
}

/// Divides out all copies of p; returns {n / p^e, e}.
inline std::pair<Int, unsigned long> remove_factor(const Int& n, const Int& p) {
  Int rest;
  unsigned long e = mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
  return {rest, e};
}

inline bool is_perfect_square(const Int& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

inline Int isqrt(const Int& n) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline Int pow_ui(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline bool divisible(const Int& n, const Int& d) {
  return mpz_divisible_p(n.get_mpz_t(), d.get_mpz_t()) != 0;
}

/// Exact division; LawViolation if d does not divide n.
inline Int divexact(const Int& n, const Int& d, const char* what = "exact division") {
  if (!divisible(n, d)) fail(Errc::LawViolation, what);
  Int r;
  mpz_divexact(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return r;
}

inline size_t digits10(const Int& n) { return mpz_sizeinbase(n.get_mpz_t(), 10); }

inline const Int& num(const Rat& q) { return q.get_num(); }
inline const Int& den(const Rat& q) { return q.get_den(); }

inline Rat make_rat(const Int& n, const Int& d) {
  if (d == 0) fail(Errc::Internal, "zero denominator");
  Rat q(n, d);
  q.canonicalize();
  return q;
}

inline Rat pow_rat(const Rat& b, unsigned long e) {
  Rat r = 1;
  for (unsigned long i = 0; i < e; ++i) r *= b;
  return r;
}

/// Parses "p/q" or "p" as an exact rational.
inline Rat parse_rat(const std::string& s) {
  try {
    Rat q(s);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    fail(Errc::ConfigInvalid, "cannot parse rational: " + s);
  }
}

struct RatLess {
  bool operator()(const Rat& a, const Rat& b) const { return mpq_cmp(a.get_mpq_t(), b.get_mpq_t()) < 0; }
};

struct IntLess {
  bool operator()(const Int& a, const Int& b) const { return mpz_cmp(a.get_mpz_t(), b.get_mpz_t()) < 0; }
};

}  // namespace eds
