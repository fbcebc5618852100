#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "test_util.hpp"

using namespace eds;

TEST_CASE("membership verdicts") {
  auto& fx = test::shared();
  CHECK(fx.ring.membership(Rat(129, 100)) == Membership::NotInRing);  // 5 is p_2
  CHECK(fx.ring.membership(Rat(7)) == Membership::InRing);
  CHECK(fx.ring.membership(Rat(-12345)) == Membership::InRing);
  CHECK(fx.ring.membership(Rat(0)) == Membership::InRing);
  // 7 has apparition index 7 but is not the indicator there: inverted
  CHECK(fx.ring.membership(Rat(1, 7)) == Membership::InRing);
  // 43 appears first at index 6, not a prime power: inverted
  CHECK(fx.ring.membership(Rat(1, 43)) == Membership::InRing);
  // 1/5 has negative valuation at the indicator 5
  CHECK(fx.ring.membership(Rat(1, 5)) == Membership::NotInRing);
  CHECK(fx.ring.membership(Rat(1, 19)) == Membership::NotInRing);
  CHECK(fx.ring.membership(Rat(1, 2)) == Membership::InRing);  // bad primes are inverted
  CHECK(fx.ring.membership(Rat(1, 6)) == Membership::InRing);
}

TEST_CASE("certified-inverted primes via apparition, and unclassifiable content") {
  auto& fx = test::shared();
  // 11 first appears at index 12 (not a prime power): certified inverted
  CHECK(fx.ring.membership(Rat(1, 11)) == Membership::InRing);
  // 37 has apparition index 49 = 7^2 beyond the horizon: no certificate
  CHECK(fx.ring.membership(Rat(1, 37)) == Membership::Unclassifiable);
  // a large prime outside every certificate route
  CHECK(fx.ring.membership(Rat(Int(1), Int("100000000000000000039"))) ==
        Membership::Unclassifiable);
}

TEST_CASE("divides in the ring") {
  auto& fx = test::shared();
  CHECK(fx.ring.divides(Rat(25), Rat(100)));
  CHECK_FALSE(fx.ring.divides(Rat(361), Rat(25)));
  CHECK(fx.ring.divides(Rat(7), Rat(1)));  // 7 is a unit at every indicator atom
  CHECK(fx.ring.divides(Rat(5), Rat(0)));
  std::vector<std::string> transcript;
  CHECK(fx.ring.divides(Rat(25), Rat(25 * 19), &transcript));
  CHECK_FALSE(transcript.empty());
}

TEST_CASE("divisibility is a preorder compatible with multiplication") {
  auto& fx = test::shared();
  std::vector<Rat> xs{Rat(25), Rat(100), Rat(361), Rat(7), Rat(25 * 361), Rat(5 * 5 * 19 * 19), Rat(1)};
  for (const Rat& a : xs) CHECK(fx.ring.divides(a, a));
  for (const Rat& a : xs)
    for (const Rat& b : xs)
      for (const Rat& c : xs) {
        if (fx.ring.divides(a, b) && fx.ring.divides(b, c)) CHECK(fx.ring.divides(a, c));
        if (fx.ring.divides(a, b)) CHECK(fx.ring.divides(a * c, b * c));
      }
}

TEST_CASE("coprimality in the ring") {
  auto& fx = test::shared();
  CHECK(fx.ring.coprime(Rat(25), Rat(361)));
  CHECK_FALSE(fx.ring.coprime(Rat(25), Rat(100)));
  CHECK(fx.ring.coprime(Rat(7), Rat(7)));
  // integer coprimality implies ring coprimality
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    long a = (long)(rng() % 100000) + 2, b = (long)(rng() % 100000) + 2;
    if (std::gcd(a, b) != 1) continue;
    CHECK(fx.ring.coprime(Rat(a), Rat(b)));
  }
}

TEST_CASE("bridging: reduced denominators carry exactly f_k") {
  auto& fx = test::shared();
  for (long k = 1; k <= 48; ++k) {
    Rat x = fx.seq.multiple(k).point.x();
    Int B = den(x);
    DivisorVector nn = fx.ring.nn_w(Rat(B));
    CHECK(nn == fx.sets.f_divisor(k));
  }
}

TEST_CASE("product transfer between denominators and f-divisors") {
  auto& fx = test::shared();
  auto B = [&](long k) { return Rat(fx.seq.den_x(k)); };
  auto F = [&](long k) { return fx.sets.f_divisor(k); };
  struct Case {
    std::vector<long> lhs, rhs;
  };
  for (const Case& c : {Case{{2}, {6}}, Case{{2, 3}, {6}}, Case{{4}, {6}}, Case{{2, 5}, {10}},
                        Case{{6}, {2, 3}}, Case{{3, 4}, {12}}, Case{{2, 2}, {4}}}) {
    Rat bl = 1, br = 1;
    DivisorVector fl, fr;
    for (long k : c.lhs) {
      bl *= B(k);
      fl = fl * F(k);
    }
    for (long k : c.rhs) {
      br *= B(k);
      fr = fr * F(k);
    }
    CHECK(fx.ring.divides(bl, br) == fl.divides(fr));
  }
}

TEST_CASE("valuations at atoms, including blocks") {
  auto& fx = test::shared();
  int id5 = *fx.ledger.find_atom(Int(5));
  CHECK(fx.ring.val_at(Rat(250), id5) == 3);
  CHECK(fx.ring.val_at(Rat(3, 25), id5) == -2);

  // any unsplit block divides its own origin denominator exactly once
  for (const Atom& a : fx.ledger.atoms()) {
    if (a.kind != AtomKind::PrimitiveCofactor) continue;
    CHECK(fx.ring.val_at(Rat(fx.seq.den_x((long)a.origin)), a.id) == 1);
  }
}

TEST_CASE("ring element views of curve denominators are fully classified") {
  auto& fx = test::shared();
  for (long n : {2L, 6L, 11L, 16L, 25L, 37L, 48L}) {
    RingView v = fx.ring.view(make_rat(1, fx.seq.den_x(n)));
    CHECK(v.den_unknown.empty());
    CHECK(fx.ring.membership_of(v) == Membership::NotInRing);
  }
}
