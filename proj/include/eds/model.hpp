#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "eds/ring.hpp"

namespace eds {

using Transcript = std::vector<std::string>;

inline void note(Transcript* t, std::string line) {
  if (t) t->push_back(std::move(line));
}

/// (U, V, X, Y) with U/V = x_{m0 k} and X/Y = y_{m0 k} for the index k.
struct Quadruple {
  Rat U, V, X, Y;

  Rat x() const { return U / V; }
  Rat y() const { return X / Y; }
};

/// A coprime numerator/denominator pair for (U/V)^{h_K}; h_K = 1 here,
/// so this is the lowest-terms form of the x-coordinate over Z.
struct ReducedPair {
  Int A;
  Int B;  // > 0
};

struct SquareResult {
  long k4 = 0;                      // the shift-confirmed square
  std::vector<long> raw_survivors;  // every k4 passing the literal conditions
  Transcript transcript;
};

/// The class Diophantine model: quadruple encodings of multiples of P,
/// the relations Plus / Divide / direct products, index squaring, and the
/// composed times relation, all decided within the materialization horizon.
class Model {
 public:
  Model(const CurveSeq& seq, PrimeSets& sets, RingCtx& ring)
      : seq_(seq), sets_(sets), ring_(ring) {}

  long horizon() { return (long)(seq_.config().n_max / sets_.m0()); }

  Quadruple encode(long k) {
    long n = checked_full_index(k);
    const MultipleRecord rec = seq_.multiple(n);
    Quadruple q;
    q.U = Rat(num(rec.point.x()));
    q.V = Rat(den(rec.point.x()));
    q.X = Rat(num(rec.point.y()));
    q.Y = Rat(den(rec.point.y()));
    return q;
  }

  /// Recovers the signed index from the materialized table.
  long decode(const Quadruple& q) {
    if (q.V == 0 || q.Y == 0) fail(Errc::NotOnCurve, "V*Y must be nonzero");
    Rat x = q.x(), y = q.y();
    const CurveConfig& cfg = seq_.config();
    if (y * y != x * x * x + Rat(cfg.a) * x + Rat(cfg.b))
      fail(Errc::NotOnCurve, "quadruple does not satisfy the Weierstrass equation");
    ensure_decode_table();
    auto it = decode_x_.find(x);
    if (it == decode_x_.end())
      fail(Errc::DecodeNotFound, "x-coordinate matches no multiple within the horizon");
    long n = it->second;
    Rat yn = seq_.multiple(n).point.y();
    long full = (y == yn) ? n : -n;
    long m0 = (long)sets_.m0();
    if (full % m0 != 0) fail(Errc::DecodeNotFound, "index is not a multiple of m0");
    return full / m0;
  }

  bool in_E(const Quadruple& q) {
    try {
      decode(q);
      return true;
    } catch (const Error& e) {
      if (e.code() == Errc::DecodeNotFound || e.code() == Errc::NotOnCurve) return false;
      throw;
    }
  }

  bool equivalent(const Quadruple& a, const Quadruple& b) {
    if (a.V == 0 || a.Y == 0 || b.V == 0 || b.Y == 0) return false;
    return a.x() == b.x() && a.y() == b.y();
  }

  ReducedPair reduced_pair(const Quadruple& q) {
    Rat x = q.x();  // canonical form over Z implies W-coprimality
    return ReducedPair{num(x), den(x)};
  }

  /// Plus: exact group-law addition on the decoded points.
  bool plus_check(const Quadruple& a, const Quadruple& b, const Quadruple& c,
                  Transcript* tr = nullptr) {
    Point pa(a.x(), a.y()), pb(b.x(), b.y()), pc(c.x(), c.y());
    if (!seq_.on_curve(pa) || !seq_.on_curve(pb) || !seq_.on_curve(pc)) return false;
    Point sum = seq_.add(pa, pb);
    bool ok = !sum.is_infinity() && sum == pc;
    note(tr, std::string("plus: group-law sum ") + (ok ? "matches" : "does not match"));
    return ok;
  }

  /// Divide: B_1 |_W B_2 for the reduced pairs; equivalent to k_1 | k_2.
  bool divide_check(const Quadruple& a, const Quadruple& b, Transcript* tr = nullptr) {
    ReducedPair pa = reduced_pair(a), pb = reduced_pair(b);
    bool ok = ring_.divides(Rat(pa.B), Rat(pb.B), tr);
    note(tr, std::string("divide: B1 |_W B2 is ") + (ok ? "true" : "false"));
    return ok;
  }

  /// (B1,B2)_W = 1 and B1 B2 |_W B3 and B3 |_W B1^3 B2^3; characterizes
  /// |k3| = |k1 k2| for coprime k1, k2.
  bool direct_product_check(const Quadruple& a, const Quadruple& b, const Quadruple& c,
                            Transcript* tr = nullptr) {
    Rat B1(reduced_pair(a).B), B2(reduced_pair(b).B), B3(reduced_pair(c).B);
    bool cop = ring_.coprime(B1, B2, tr);
    note(tr, std::string("(B1,B2)_W = 1: ") + (cop ? "true" : "false"));
    if (!cop) return false;
    bool lower = ring_.divides(B1 * B2, B3, tr);
    note(tr, std::string("B1*B2 |_W B3: ") + (lower ? "true" : "false"));
    bool upper = ring_.divides(B3, B1 * B1 * B1 * B2 * B2 * B2, tr);
    note(tr, std::string("B3 |_W B1^3*B2^3: ") + (upper ? "true" : "false"));
    return lower && upper;
  }

  /// The index-squaring gadget: searches k3 != 0 with k2 = k1 + 1,
  /// B1 B2 |_W B3 and B3 |_W B1^3 B2^3, sets k4 = k3 - k1 and filters by
  /// (k1 - 1) | (k4 - 1). Returns the shift-confirmed k4 plus every raw
  /// survivor of the literal conditions.
  SquareResult square_of_index(const Quadruple& q1) {
    long k1 = decode(q1);
    if (std::abs(k1) <= 4) fail(Errc::OutOfRange, "the squaring gadget needs |k1| > 4");
    if (!gadget_fits(k1))
      fail(Errc::HorizonExceeded, "k1(k1+1) or k1^2 is beyond the materialization horizon");
    SquareResult res;
    res.raw_survivors = gadget_survivors(k1, &res.transcript);
    if (res.raw_survivors.empty()) fail(Errc::NoWitness, "no k3 in the search space survives");
    std::optional<long> confirmed;
    for (long s : res.raw_survivors) {
      if (sq_rel(k1, s, &res.transcript)) {
        if (confirmed) fail(Errc::Internal, "two shift-confirmed squares");
        confirmed = s;
      }
    }
    if (!confirmed) fail(Errc::NoWitness, "no survivor is shift-confirmed");
    res.k4 = *confirmed;
    if (res.k4 != k1 * k1)
      fail(Errc::Internal, "confirmed square differs from k1^2");  // would falsify the law
    return res;
  }

  /// Times: decides k3 = k1 k2 through polarization over the squaring
  /// gadget, additive splits, and Plus glue; sign-aware.
  bool times_check(const Quadruple& a, const Quadruple& b, const Quadruple& c,
                   Transcript* tr = nullptr) {
    long k1 = decode(a), k2 = decode(b), k3 = decode(c);
    note(tr, "times: decoded indices (" + std::to_string(k1) + ", " + std::to_string(k2) + ", " +
                 std::to_string(k3) + ")");
    return times_rel(k1, k2, k3, tr);
  }

  bool times_rel(long a, long b, long c, Transcript* tr = nullptr) {
    auto key = std::tuple(a, b, c);
    auto it = times_memo_.find(key);
    if (it != times_memo_.end()) return it->second;
    bool v = times_rel_uncached(a, b, c, tr);
    times_memo_[key] = v;
    return v;
  }

  /// s = t^2 as a relation: the gadget where it fits, otherwise a constant
  /// shift t -> t + c with the expansion glued by Plus chains.
  bool sq_rel(long t, long s, Transcript* tr = nullptr) {
    auto key = std::pair(t, s);
    auto it = sq_memo_.find(key);
    if (it != sq_memo_.end()) return it->second;
    bool v = sq_rel_uncached(t, s, tr);
    sq_memo_[key] = v;
    return v;
  }

 private:
  long checked_full_index(long k) {
    if (k == 0) fail(Errc::IndexOutOfRange, "index 0 is not in E");
    long m0 = (long)sets_.m0();
    long n = k * m0;
    if (std::abs(n) > (long)seq_.config().n_max)
      fail(Errc::IndexOutOfRange, "m0*k exceeds n_max");
    return n;
  }

  void ensure_decode_table() {
    unsigned long n_max = seq_.config().n_max;
    if (decode_built_ == n_max) return;
    decode_x_.clear();
    for (unsigned long n = 1; n <= n_max; ++n)
      decode_x_.emplace(seq_.multiple((long)n).point.x(), (long)n);
    decode_built_ = n_max;
  }

  bool gadget_fits(long t) {
    long H = horizon();
    return std::abs(t) > 4 && std::abs(t) <= H && t + 1 != 0 && std::abs(t + 1) <= H &&
           std::abs(t) * std::abs(t + 1) <= H && t * t <= H && std::abs(t - 1) <= H;
  }

  std::vector<long> gadget_survivors(long t, Transcript* tr) {
    auto it = gadget_memo_.find(t);
    if (it != gadget_memo_.end()) return it->second;
    long H = horizon();
    long k2 = t + 1;
    Rat B1(den(seq_.multiple(checked_full_index(t)).point.x()));
    Rat B2(den(seq_.multiple(checked_full_index(k2)).point.x()));
    std::vector<long> survivors;
    for (long k3 = -H; k3 <= H; ++k3) {
      if (k3 == 0) continue;
      long k4 = k3 - t;
      if (k4 == 0 || std::abs(k4) > H) continue;
      Rat B3(den(seq_.multiple(checked_full_index(k3)).point.x()));
      if (!ring_.divides(B1 * B2, B3) || !ring_.divides(B3, B1 * B1 * B1 * B2 * B2 * B2)) continue;
      bool sign_ok;
      if (k4 == 1) {
        sign_ok = true;  // (k1-1) | 0 holds arithmetically; index 0 has no encoding
        note(tr, "gadget(" + std::to_string(t) + "): k4 = 1, divisibility by zero shift is vacuous");
      } else if (std::abs(k4 - 1) <= H) {
        sign_ok = ring_.divides(Rat(seq_.den_x(checked_full_index(t - 1))),
                                Rat(seq_.den_x(checked_full_index(k4 - 1))));
      } else {
        sign_ok = (k4 - 1) % (t - 1) == 0;  // shifted encoding out of horizon
        note(tr, "gadget(" + std::to_string(t) + "): k4 - 1 = " + std::to_string(k4 - 1) +
                     " has no encoding in the horizon; divisibility checked arithmetically");
      }
      note(tr, "gadget(" + std::to_string(t) + "): k3 = " + std::to_string(k3) +
                   " passes the divisor sandwich; k4 = " + std::to_string(k4) + "; (k1-1)|(k4-1) " +
                   (sign_ok ? "holds" : "fails"));
      if (sign_ok) survivors.push_back(k4);
    }
    gadget_memo_[t] = survivors;
    return survivors;
  }

  bool sq_rel_uncached(long t, long s, Transcript* tr) {
    long H = horizon();
    if (t == 0 || std::abs(t) > H || s == 0 || std::abs(s) > H) return false;
    if (gadget_fits(t)) {
      std::vector<long> sv = gadget_survivors(t, tr);
      bool member = std::find(sv.begin(), sv.end(), s) != sv.end();
      if (!member) return false;
      if (sv.size() == 1) return true;
      note(tr, "gadget(" + std::to_string(t) + ") is ambiguous; disambiguating by shift");
    }
    // shift: s = t^2  iff  s + 2ct + c^2 = (t+c)^2
    for (long c : {1L, -1L, 2L, -2L, 3L, -3L, 4L, -4L, 5L, -5L, 6L, -6L, 7L, -7L, 8L, -8L, 9L,
                   -9L, 10L, -10L, 11L, -11L, 12L, -12L}) {
      long tc = t + c;
      if (!gadget_fits(tc) || tc == t) continue;
      std::vector<long> sv = gadget_survivors(tc, nullptr);
      if (sv.size() != 1) continue;
      long target = s + 2 * c * t + c * c;
      if (target == 0 || std::abs(target) > H) continue;
      bool glued = plus_chain_glues(s, t, 2 * c, c * c, target, tr) ||
                   (plus_chain_glues(s, c * c, 1, 0, s + c * c, nullptr) &&
                    plus_chain_glues(s + c * c, t, 2 * c, 0, target, tr));
      if (!glued) continue;
      bool ok = (sv[0] == target);
      note(tr, "sq(" + std::to_string(t) + ", " + std::to_string(s) + ") via shift c=" +
                   std::to_string(c) + ": target " + std::to_string(target) +
                   (ok ? " equals" : " differs from") + " the unique gadget square of " +
                   std::to_string(tc));
      return ok;
    }
    fail(Errc::HorizonExceeded,
         "no usable shift for squaring index " + std::to_string(t) + " within the horizon");
  }

  /// Verifies target = start + reps * step + constant as a chain of Plus
  /// relations on encodable indices (reps may be negative).
  bool plus_chain_glues(long start, long step, long reps, long constant, long target,
                        Transcript* tr) {
    long H = horizon();
    long stride = reps >= 0 ? step : -step;
    long count = std::abs(reps);
    if (count > 0 && (stride == 0 || std::abs(stride) > H)) return false;
    if (start == 0 || std::abs(start) > H) return false;
    long cur = start;
    std::vector<std::pair<long, long>> additions;
    for (long i = 0; i < count; ++i) {
      long next = cur + stride;
      if (next == 0 || std::abs(next) > H) return false;
      additions.emplace_back(cur, stride);
      cur = next;
    }
    if (constant != 0) {
      long next = cur + constant;
      if (next == 0 || std::abs(next) > H || std::abs(constant) > H || constant == 0) return false;
      additions.emplace_back(cur, constant);
      cur = next;
    }
    if (cur != target) return false;
    for (auto [from, delta] : additions) {
      if (!plus_check(encode(from), encode(delta), encode(from + delta))) {
        note(tr, "plus glue failed at " + std::to_string(from) + " + " + std::to_string(delta));
        return false;
      }
    }
    note(tr, "plus glue: " + std::to_string(start) + " + " + std::to_string(reps) + "*" +
                 std::to_string(step) + " + " + std::to_string(constant) + " = " +
                 std::to_string(target) + " verified in " + std::to_string(additions.size()) +
                 " steps");
    return true;
  }

  bool times_rel_uncached(long a, long b, long c, Transcript* tr) {
    long H = horizon();
    if (a == 0 || b == 0 || c == 0) return false;
    if (std::abs(a) > H || std::abs(b) > H || std::abs(c) > H) return false;
    if (b < 0) {
      // negation is the y-flip on quadruples
      note(tr, "times: reducing (a, b, c) to (a, -b, -c)");
      return times_rel(a, -b, -c, tr);
    }
    if (b == 1) {
      bool ok = equivalent(encode(a), encode(c));
      note(tr, "times base: c ~ a is " + std::string(ok ? "true" : "false"));
      return ok;
    }
    // polarization: c = a*b iff (a+b)^2 = a^2 + b^2 + 2c
    long sum = a + b;
    if (sum != 0) {
      long sa = a * a, sb = b * b, ss = sa + sb + 2 * c;
      if (sa <= H && sb <= H && ss != 0 && std::abs(ss) <= H && sum * sum <= H) {
        bool glued = plus_chain_glues(sa, c, 2, sb, ss, nullptr) ||
                     plus_chain_glues(sa, sb, 1, 2 * c, ss, nullptr) ||
                     plus_chain_glues(sb, c, 2, sa, ss, nullptr) ||
                     plus_chain_glues(ss, -c, 2, -sb, sa, nullptr);
        if (glued) {
          try {
            bool ok = sq_rel(a, sa, tr) && sq_rel(b, sb, tr) && sq_rel(sum, ss, tr);
            note(tr, "times via polarization: (a+b)^2 = a^2 + b^2 + 2c is " +
                         std::string(ok ? "true" : "false"));
            return ok;
          } catch (const Error& e) {
            if (e.code() != Errc::HorizonExceeded) throw;
            note(tr, "times: polarization hit the horizon; falling back to a split");
          }
        }
      }
    }
    // additive split: b = b1 + b2 with a*b1 pinned recursively
    long b1 = b / 2, b2 = b - b1;
    long c1 = a * b1, c2 = c - c1;
    if (c2 == 0 || std::abs(c2) > H || std::abs(c1) > H) {
      note(tr, "times split: c - a*b1 is not encodable, so c != a*b");
      return false;
    }
    bool ok = times_rel(a, b1, c1, tr) && times_rel(a, b2, c2, tr) &&
              plus_check(encode(c1), encode(c2), encode(c));
    note(tr, "times via split b = " + std::to_string(b1) + " + " + std::to_string(b2) + ": " +
                 (ok ? "true" : "false"));
    return ok;
  }

  const CurveSeq& seq_;
  PrimeSets& sets_;
  RingCtx& ring_;
  std::map<Rat, long, RatLess> decode_x_;
  unsigned long decode_built_ = 0;
  std::map<std::tuple<long, long, long>, bool> times_memo_;
  std::map<std::pair<long, long>, bool> sq_memo_;
  std::map<long, std::vector<long>> gadget_memo_;
};

}  // namespace eds
