#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "eds/curve.hpp"

namespace eds {

struct ApparitionRecord {
  Int q;
  unsigned long n_q = 0;                 // rank of apparition = order of P in E(F_q)
  std::optional<unsigned long> base_val; // ord_q den_x(n_q); set when n_q <= n_max
};

/// Independent oracle over reduced curves E(F_q). Orders are found by
/// iterated point addition, so q must fit the iteration budget.
class ApparitionOracle {
 public:
  static constexpr unsigned long kOrderCap = 20'000'000;

  explicit ApparitionOracle(const CurveSeq& seq) : seq_(seq) {}

  /// Order of P mod q in E(F_q) by repeated addition. q good, q <= kOrderCap.
  static unsigned long order_mod(const CurveConfig& cfg, unsigned long q) {
    auto md = [&](const Int& v) -> uint64_t {
      Int r = v % Int(q);
      if (r < 0) r += Int(q);
      return r.get_ui();
    };
    uint64_t a = md(cfg.a);
    uint64_t xg = mulmod(md(num(cfg.gen_x)), invmod(md(den(cfg.gen_x)), q), q);
    uint64_t yg = mulmod(md(num(cfg.gen_y)), invmod(md(den(cfg.gen_y)), q), q);

    uint64_t x = xg, y = yg;
    unsigned long count = 1;
    const unsigned long bound = q + 1 + 2 * (unsigned long)(std::sqrt((double)q) + 2);
    while (true) {
      // [count+1]P = (x,y) + (xg,yg)
      if (x == xg && (y + yg) % q == 0) return count + 1;
      uint64_t lam;
      if (x == xg) {
        uint64_t numt = (mulmod(3, mulmod(x, x, q), q) + a) % q;
        lam = mulmod(numt, invmod((2 * y) % q, q), q);
      } else {
        uint64_t dy = (yg + q - y) % q;
        uint64_t dx = (xg + q - x) % q;
        lam = mulmod(dy, invmod(dx, q), q);
      }
      uint64_t x3 = (mulmod(lam, lam, q) + 2 * q - x - xg) % q;
      uint64_t y3 = (mulmod(lam, (x + q - x3) % q, q) + q - y) % q;
      x = x3;
      y = y3;
      ++count;
      if (count > bound) fail(Errc::Internal, "order search exceeded the Hasse bound");
    }
  }

  const ApparitionRecord& record(const Int& q) const {
    if (seq_.is_bad(q)) fail(Errc::BadPrime, "prime " + q.get_str() + " is in S_bad");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(q);
    if (it != cache_.end()) return it->second;
    if (q > Int(kOrderCap))
      fail(Errc::OutOfRange, "prime " + q.get_str() + " exceeds the order-search cap");
    ApparitionRecord rec;
    rec.q = q;
    rec.n_q = order_mod(seq_.config(), q.get_ui());
    if (rec.n_q <= seq_.config().n_max) {
      rec.base_val = valuation(seq_.den_x(static_cast<long>(rec.n_q)), q);
      if (*rec.base_val == 0) fail(Errc::Internal, "apparition index does not divide the denominator");
    }
    auto [pos, inserted] = cache_.emplace(q, std::move(rec));
    return pos->second;
  }

  /// ord_q den_x(n) by the order-change law: base + 2 v_q(n / n_q) when
  /// n_q | n, else 0. Never touches the exact coordinates of [n]P.
  unsigned long law_valuation(const Int& q, long n) const {
    unsigned long an = n < 0 ? -(unsigned long)n : (unsigned long)n;
    if (an == 0) fail(Errc::IndexOutOfRange, "index 0");
    const ApparitionRecord& rec = record(q);
    if (an % rec.n_q != 0) return 0;
    if (!rec.base_val) fail(Errc::Internal, "base valuation not materialized");
    Int ratio(an / rec.n_q);
    return *rec.base_val + 2 * valuation(ratio, q);
  }

  /// Records for all good primes q <= qmax, ascending.
  std::vector<ApparitionRecord> table(unsigned long qmax) const {
    std::vector<ApparitionRecord> out;
    Factorizer fac(FactorBudget{std::max<unsigned long>(qmax, 3), 0, 25});
    for (uint32_t p : fac.small_primes()) {
      if (p > qmax) break;
      if (seq_.is_bad(Int(p))) continue;
      out.push_back(record(Int(p)));
    }
    return out;
  }

 private:
  static uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return (uint64_t)((unsigned __int128)a * b % m);
  }

  static uint64_t invmod(uint64_t a, uint64_t m) {
    int64_t t = 0, newt = 1;
    int64_t r = (int64_t)m, newr = (int64_t)(a % m);
    while (newr != 0) {
      int64_t qq = r / newr;
      t -= qq * newt;
      std::swap(t, newt);
      r -= qq * newr;
      std::swap(r, newr);
    }
    if (r != 1) fail(Errc::Internal, "non-invertible residue");
    if (t < 0) t += (int64_t)m;
    return (uint64_t)t;
  }

  const CurveSeq& seq_;
  mutable std::mutex mu_;
  mutable std::map<Int, ApparitionRecord, IntLess> cache_;
};

}  // namespace eds
