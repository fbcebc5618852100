#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eds/factor.hpp"
#include "eds/numeric.hpp"

namespace eds {

/// Affine point on y^2 = x^3 + ax + b, or the point at infinity.
class Point {
 public:
  static Point infinity() { return Point(); }
  Point(Rat x, Rat y) : inf_(false), x_(std::move(x)), y_(std::move(y)) {}

  bool is_infinity() const { return inf_; }
  const Rat& x() const { return x_; }
  const Rat& y() const { return y_; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
    return a.x_ == b.x_ && a.y_ == b.y_;
  }

 private:
  Point() : inf_(true) {}
  bool inf_;
  Rat x_, y_;
};

struct CurveConfig {
  Int a = 0;
  Int b = -2;
  Rat gen_x = 3;
  Rat gen_y = 5;
  unsigned long n_max = 48;
  FactorBudget budget;

  Int discriminant() const { return Int(-16) * (4 * a * a * a + 27 * b * b); }

  void validate() const {
    if (discriminant() == 0) fail(Errc::ConfigInvalid, "singular curve: discriminant is zero");
    if (gen_y * gen_y != gen_x * gen_x * gen_x + Rat(a) * gen_x + Rat(b))
      fail(Errc::ConfigInvalid, "generator is not on the curve");
    if (gen_y == 0) fail(Errc::ConfigInvalid, "generator is 2-torsion (y = 0)");
    if (n_max == 0) fail(Errc::ConfigInvalid, "n_max must be positive");
    // Guard rule: cofactor primes must provably exceed every in-scope index.
    if (!(n_max < budget.trial))
      fail(Errc::ConfigInvalid, "guard rule violated: n_max must be < factor budget");
  }

  std::string gen_string() const {
    return num(gen_x).get_str() + "/" + den(gen_x).get_str() + "," + num(gen_y).get_str() + "/" +
           den(gen_y).get_str();
  }

  bool same_curve(const CurveConfig& o) const {
    return a == o.a && b == o.b && gen_x == o.gen_x && gen_y == o.gen_y;
  }
};

struct MultipleRecord {
  long n = 0;
  Point point = Point::infinity();
  Int den_x = 1;  // denominator of x_n in lowest terms
  Int den_y = 1;
};

struct TorsionReport {
  std::vector<Point> candidates;  // confirmed torsion points
  bool conclusive = true;
};

/// Exact arithmetic on the fixed curve plus the memoized sequence [n]P.
class CurveSeq {
 public:
  explicit CurveSeq(CurveConfig cfg) : cfg_(std::move(cfg)), fac_(cfg_.budget) {
    cfg_.validate();
  }

  const CurveConfig& config() const { return cfg_; }
  const Factorizer& factorizer() const { return fac_; }

  bool on_curve(const Point& p) const {
    if (p.is_infinity()) return true;
    return p.y() * p.y() == p.x() * p.x() * p.x() + Rat(cfg_.a) * p.x() + Rat(cfg_.b);
  }

  Point negate(const Point& p) const {
    if (p.is_infinity()) return p;
    return Point(p.x(), -p.y());
  }

  Point add(const Point& p, const Point& q) const {
    if (p.is_infinity()) return q;
    if (q.is_infinity()) return p;
    Rat lambda;
    if (p.x() == q.x()) {
      if (p.y() == -q.y()) return Point::infinity();
      // doubling; p.y() != 0 since the inverse case was handled
      lambda = (3 * p.x() * p.x() + Rat(cfg_.a)) / (2 * p.y());
    } else {
      lambda = (q.y() - p.y()) / (q.x() - p.x());
    }
    Rat x3 = lambda * lambda - p.x() - q.x();
    Rat y3 = lambda * (p.x() - x3) - p.y();
    return Point(std::move(x3), std::move(y3));
  }

  /// [n]P with exact coordinates, memoized; n != 0, |n| <= n_max.
  MultipleRecord multiple(long n) const {
    if (n == 0) fail(Errc::IndexOutOfRange, "index 0 has no affine multiple");
    unsigned long an = n < 0 ? -(unsigned long)n : (unsigned long)n;
    if (an > cfg_.n_max) fail(Errc::IndexOutOfRange, "index " + std::to_string(n) + " exceeds n_max");
    std::lock_guard<std::mutex> lock(mu_);
    const MultipleRecord& rec = multiple_locked(an);
    if (n > 0) return rec;
    MultipleRecord neg = rec;
    neg.n = n;
    neg.point = negate(rec.point);
    return neg;
  }

  Int den_x(long n) const { return multiple(n).den_x; }

  Int den_x_nobad(long n) const {
    Int d = multiple(n).den_x;
    for (const Int& p : bad_primes()) d = remove_factor(d, p).first;
    return d;
  }

  /// S_bad: 2, primes of the discriminant, primes where P is non-integral.
  const std::set<Int, IntLess>& bad_primes() const {
    std::lock_guard<std::mutex> lock(bad_mu_);
    if (!bad_) {
      std::set<Int, IntLess> s;
      s.insert(2);
      auto absorb = [&](const Int& v, const char* what) {
        if (v == 1 || v == -1) return;
        FactorResult f = fac_.factor(v);
        if (f.leftover != 1)
          fail(Errc::ConfigInvalid, std::string("cannot certify bad-prime set: unfactored ") + what);
        for (const auto& [p, e] : f.primes) s.insert(p);
      };
      absorb(cfg_.discriminant(), "discriminant");
      absorb(den(cfg_.gen_x), "generator x-denominator");
      absorb(den(cfg_.gen_y), "generator y-denominator");
      bad_ = std::move(s);
    }
    return *bad_;
  }

  bool is_bad(const Int& p) const { return bad_primes().count(p) > 0; }

  /// Bounded Lutz-Nagell search for torsion points: integral (x,y) with
  /// y = 0 or y^2 | disc, confirmed by finding a vanishing small multiple.
  TorsionReport torsion_scan() const {
    TorsionReport rep;
    Int D = cfg_.discriminant();
    if (D < 0) D = -D;

    std::vector<Int> ys{0};
    FactorResult df = fac_.factor(D);
    if (df.leftover != 1) rep.conclusive = false;
    // enumerate y with y^2 | factored part of disc
    std::vector<Int> divs{1};
    for (const auto& [p, e] : df.primes) {
      std::vector<Int> next;
      for (const Int& d : divs) {
        Int pk = 1;
        for (unsigned long i = 0; 2 * i <= e; ++i) {
          next.push_back(d * pk);
          pk *= p;
        }
      }
      divs = std::move(next);
    }
    for (const Int& d : divs)
      if (d != 0) ys.push_back(d);
    std::sort(ys.begin(), ys.end(), IntLess{});
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    for (const Int& y : ys) {
      // integer roots x of x^3 + a x + (b - y^2)
      Int c = cfg_.b - y * y;
      std::vector<Int> roots;
      if (c == 0) {
        roots.push_back(0);
        if (cfg_.a <= 0 && is_perfect_square(-cfg_.a)) {
          Int r = isqrt(-cfg_.a);
          roots.push_back(r);
          roots.push_back(-r);
        }
      } else {
        FactorResult cf = fac_.factor(c);
        if (cf.leftover != 1) {
          rep.conclusive = false;
          continue;
        }
        std::vector<Int> cds{1};
        for (const auto& [p, e] : cf.primes) {
          std::vector<Int> next;
          for (const Int& d : cds) {
            Int pk = 1;
            for (unsigned long i = 0; i <= e; ++i) {
              next.push_back(d * pk);
              pk *= p;
            }
          }
          cds = std::move(next);
        }
        for (const Int& d : cds) {
          for (int sign : {1, -1}) {
            Int x = sign * d;
            if (x * x * x + cfg_.a * x + c == 0) roots.push_back(x);
          }
        }
      }
      for (const Int& x : roots) {
        Point cand{Rat(x), Rat(y)};
        if (!on_curve(cand)) continue;
        // torsion over Q has order <= 12; check [m]cand for m <= 12
        Point acc = cand;
        bool tors = false;
        for (int m = 2; m <= 12 + 1; ++m) {
          acc = add(acc, cand);
          if (acc.is_infinity()) {
            tors = true;
            break;
          }
        }
        if (y == 0) tors = true;  // y = 0 is 2-torsion by definition
        if (tors) {
          bool dup = false;
          for (const Point& p : rep.candidates) dup = dup || p == cand;
          if (!dup) rep.candidates.push_back(cand);
        }
      }
    }
    return rep;
  }

 private:
  const MultipleRecord& multiple_locked(unsigned long n) const {
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
    Point pt = Point::infinity();
    if (n == 1) {
      pt = Point(cfg_.gen_x, cfg_.gen_y);
    } else if (n % 2 == 0) {
      const Point& h = multiple_locked(n / 2).point;
      pt = add(h, h);
    } else {
      pt = add(multiple_locked(n - 1).point, multiple_locked(1).point);
    }
    if (pt.is_infinity())
      fail(Errc::TorsionCollision,
           "[" + std::to_string(n) + "]P is the identity; generator has finite order");
    MultipleRecord rec;
    rec.n = static_cast<long>(n);
    rec.point = pt;
    rec.den_x = den(pt.x());
    rec.den_y = den(pt.y());
    auto [pos, inserted] = memo_.emplace(n, std::move(rec));
    return pos->second;
  }

  CurveConfig cfg_;
  Factorizer fac_;
  mutable std::mutex mu_;
  mutable std::map<unsigned long, MultipleRecord> memo_;
  mutable std::mutex bad_mu_;
  mutable std::optional<std::set<Int, IntLess>> bad_;
};

}  // namespace eds
