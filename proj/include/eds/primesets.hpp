#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "eds/ledger.hpp"

namespace eds {

/// Integral divisor supported on ledger atoms: atom id -> exponent > 0.
/// Divisibility, products and powers act componentwise.
struct DivisorVector {
  std::map<int, unsigned long> e;

  bool divides(const DivisorVector& o) const {
    for (const auto& [id, k] : e) {
      auto it = o.e.find(id);
      if (it == o.e.end() || it->second < k) return false;
    }
    return true;
  }

  bool coprime(const DivisorVector& o) const {
    for (const auto& [id, k] : e)
      if (o.e.count(id)) return false;
    return true;
  }

  DivisorVector operator*(const DivisorVector& o) const {
    DivisorVector r = *this;
    for (const auto& [id, k] : o.e) r.e[id] += k;
    return r;
  }

  DivisorVector pow(unsigned long k) const {
    DivisorVector r;
    if (k == 0) return r;
    for (const auto& [id, ex] : e) r.e[id] = ex * k;
    return r;
  }

  std::set<int> support() const {
    std::set<int> s;
    for (const auto& [id, k] : e) s.insert(id);
    return s;
  }

  bool operator==(const DivisorVector&) const = default;
};

enum class AtomClass { Bad, Inverted, Indicator, Unclassified };

inline bool is_prime_power(unsigned long n, unsigned long* ell = nullptr, unsigned* j = nullptr) {
  if (n < 2) return false;
  for (unsigned long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      unsigned k = 0;
      while (n % p == 0) n /= p, ++k;
      if (n != 1) return false;
      if (ell) *ell = p;
      if (j) *j = k;
      return true;
    }
  }
  if (ell) *ell = n;
  if (j) *j = 1;
  return true;
}

struct EllReport {
  unsigned long ell;
  unsigned long a_ell;           // smallest a with nonempty primitive parts for all checked j >= a
  std::vector<unsigned> empty_j; // observed powers with empty primitive part
  unsigned max_j_checked;
};

struct M0Report {
  unsigned long m0 = 1;
  unsigned long horizon = 0;  // prime powers <= horizon were inspected
  std::vector<EllReport> per_ell;
};

/// Prime-set combinatorics over a built ledger: supports S_n, indicator
/// atoms p_{l^j} / q_{l^j}, the constants a_l and m_0, and f_n.
class PrimeSets {
 public:
  explicit PrimeSets(Ledger& ledger, unsigned long m0_horizon = 0)
      : ledger_(ledger),
        m0_horizon_(m0_horizon ? m0_horizon : ledger.seq().config().n_max) {}

  Ledger& ledger() { return ledger_; }
  const Ledger& ledger() const { return ledger_; }

  /// S_n: the atom set of den_x(|n|), bad part excluded. S_{-n} = S_n.
  std::set<int> support(long n) {
    unsigned long an = abs_index(n);
    const IndexFactorization& fx = ledger_.build(an);
    std::set<int> s;
    for (const auto& [id, e] : fx.entries) s.insert(id);
    return s;
  }

  /// The indicator atom of origin l^j: the largest-value primitive atom.
  const Atom& indicator(unsigned long ell, unsigned j) {
    unsigned long lj = 1;
    for (unsigned i = 0; i < j; ++i) lj *= ell;
    return indicator_at(lj);
  }

  /// q_{l^j} = p_{l^{j + ord_l m0}}, the shifted indicator.
  const Atom& indicator_shifted(unsigned long ell, unsigned j) {
    unsigned long m0 = this->m0();
    unsigned shift = 0;
    while (m0 % ell == 0) m0 /= ell, ++shift;
    return indicator(ell, j + shift);
  }

  const M0Report& m0_report() {
    if (!m0_) compute_m0();
    return *m0_;
  }

  unsigned long m0() { return m0_report().m0; }

  AtomClass classify(int atom_id) {
    const Atom& a = ledger_.atom(atom_id);
    unsigned long ell;
    unsigned j;
    if (!is_prime_power(a.origin, &ell, &j)) return AtomClass::Inverted;
    // atoms supported on S_{m0} are inverted alongside everything else
    if (m0() % a.origin == 0 && m0() > 1) return AtomClass::Inverted;
    const Atom* ind = indicator_or_null(a.origin);
    if (ind == nullptr) return AtomClass::Unclassified;
    return ind->id == atom_id ? AtomClass::Indicator : AtomClass::Inverted;
  }

  bool is_indicator(int atom_id) { return classify(atom_id) == AtomClass::Indicator; }

  /// f_n = c_{m0 n}: the restriction of den_x(|m0 n|) to indicator atoms.
  DivisorVector f_divisor(long n) {
    unsigned long an = abs_index(n);
    unsigned long target = an * m0();
    if (target > ledger_.seq().config().n_max)
      fail(Errc::IndexOutOfRange, "m0*n exceeds n_max at n = " + std::to_string(n));
    const IndexFactorization& fx = ledger_.build(target);
    DivisorVector v;
    for (const auto& [id, e] : fx.entries)
      if (is_indicator(id)) v.e[id] = e;
    return v;
  }

  /// c_n: indicator restriction without the m0 scaling.
  DivisorVector c_divisor(long n) {
    unsigned long an = abs_index(n);
    const IndexFactorization& fx = ledger_.build(an);
    DivisorVector v;
    for (const auto& [id, e] : fx.entries)
      if (is_indicator(id)) v.e[id] = e;
    return v;
  }

 private:
  unsigned long abs_index(long n) {
    if (n == 0) fail(Errc::IndexOutOfRange, "index 0");
    return n < 0 ? -(unsigned long)n : (unsigned long)n;
  }

  const Atom* indicator_or_null(unsigned long lj) {
    ledger_.build(lj);
    const Atom* best = nullptr;
    for (int id : ledger_.atoms_of_origin(lj)) {
      const Atom& a = ledger_.atom(id);
      if (best == nullptr || a.value > best->value) best = &a;
    }
    return best;
  }

  const Atom& indicator_at(unsigned long lj) {
    unsigned long ell;
    unsigned j;
    if (!is_prime_power(lj, &ell, &j))
      fail(Errc::IndexOutOfRange, std::to_string(lj) + " is not a prime power");
    if (lj > ledger_.seq().config().n_max)
      fail(Errc::IndexOutOfRange, "prime power " + std::to_string(lj) + " exceeds n_max");
    const Atom* best = indicator_or_null(lj);
    if (best == nullptr)
      fail(Errc::NoPrimitivePart, "no primitive part at origin " + std::to_string(lj));
    return *best;
  }

  void compute_m0() {
    M0Report rep;
    rep.horizon = m0_horizon_;
    for (unsigned long ell = 2; ell <= rep.horizon; ++ell) {
      bool prime = true;
      for (unsigned long p = 2; p * p <= ell; ++p)
        if (ell % p == 0) prime = false;
      if (!prime) continue;
      EllReport er{ell, 1, {}, 0};
      unsigned j = 0;
      for (unsigned long lj = ell; lj <= rep.horizon; lj *= ell) {
        ++j;
        er.max_j_checked = j;
        ledger_.build(lj);
        if (ledger_.atoms_of_origin(lj).empty()) er.empty_j.push_back(j);
        if (lj > rep.horizon / ell) break;  // overflow guard
      }
      if (!er.empty_j.empty()) er.a_ell = er.empty_j.back() + 1;
      rep.per_ell.push_back(er);
    }
    Int m0 = 1;
    for (const EllReport& er : rep.per_ell)
      for (unsigned long i = 1; i < er.a_ell; ++i) m0 *= er.ell;
    rep.m0 = m0.get_ui();
    m0_ = std::move(rep);
  }

  Ledger& ledger_;
  unsigned long m0_horizon_;
  std::optional<M0Report> m0_;
};

}  // namespace eds
