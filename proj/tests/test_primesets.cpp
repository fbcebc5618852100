#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "test_util.hpp"

using namespace eds;

namespace {
std::set<Int, IntLess> values(PrimeSets& sets, const std::set<int>& ids) {
  std::set<Int, IntLess> v;
  for (int id : ids) v.insert(sets.ledger().atom(id).value);
  return v;
}
}  // namespace

TEST_CASE("supports of small indices") {
  auto& fx = test::shared();
  CHECK(values(fx.sets, fx.sets.support(2)) == std::set<Int, IntLess>{5});
  CHECK(values(fx.sets, fx.sets.support(3)) == std::set<Int, IntLess>{19});
  CHECK(fx.sets.support(-3) == fx.sets.support(3));
  auto s6 = values(fx.sets, fx.sets.support(6));
  CHECK(s6 == std::set<Int, IntLess>{5, 19, 43, 71, 4339});
}

TEST_CASE("gcd law for supports") {
  auto& fx = test::shared();
  for (long m = 1; m <= 40; ++m) {
    for (long n = m; n <= 40; ++n) {
      auto sm = fx.sets.support(m);
      auto sn = fx.sets.support(n);
      std::set<int> inter;
      std::set_intersection(sm.begin(), sm.end(), sn.begin(), sn.end(),
                            std::inserter(inter, inter.begin()));
      CHECK(inter == fx.sets.support(std::gcd(m, n)));
    }
  }
}

TEST_CASE("indicator atoms of small prime powers") {
  auto& fx = test::shared();
  CHECK(fx.sets.indicator(2, 1).value == 5);
  CHECK(fx.sets.indicator(3, 1).value == 19);
  CHECK(fx.sets.indicator(2, 2).value == 383);
  CHECK(fx.sets.indicator(5, 1).value == 2069);
  CHECK(fx.sets.indicator(7, 1).value == 1487809);
  CHECK(fx.sets.indicator(2, 3).value == 111721);
  CHECK_THROWS_AS(fx.sets.indicator(7, 2), Error);  // 49 > 48
}

TEST_CASE("m0 is 1 on the default curve") {
  auto& fx = test::shared();
  const auto& rep = fx.sets.m0_report();
  CHECK(rep.m0 == 1);
  CHECK(rep.horizon == 48);
  for (const auto& er : rep.per_ell) {
    CHECK(er.a_ell == 1);
    CHECK(er.empty_j.empty());
  }
  // the shifted indicator coincides with the plain one at m0 = 1
  CHECK(fx.sets.indicator_shifted(2, 1).id == fx.sets.indicator(2, 1).id);
}

TEST_CASE("classification marks exactly one indicator per prime-power origin") {
  auto& fx = test::shared();
  std::map<unsigned long, int> per_origin;
  for (const Atom& a : fx.sets.ledger().atoms()) {
    AtomClass c = fx.sets.classify(a.id);
    if (!is_prime_power(a.origin)) {
      CHECK(c == AtomClass::Inverted);
    }
    if (c == AtomClass::Indicator) per_origin[a.origin]++;
  }
  for (unsigned long lj : {2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 9ul, 11ul, 16ul, 25ul, 27ul, 32ul}) {
    CHECK(per_origin[lj] == 1);
  }
  CHECK(per_origin.count(6) == 0);
}

TEST_CASE("f-divisor values") {
  auto& fx = test::shared();
  auto as_values = [&](const DivisorVector& v) {
    std::map<Int, unsigned long, IntLess> out;
    for (const auto& [id, e] : v.e) out[fx.sets.ledger().atom(id).value] = e;
    return out;
  };
  using M = std::map<Int, unsigned long, IntLess>;
  CHECK(as_values(fx.sets.f_divisor(2)) == M{{5, 2}});
  // atoms of origin 6 are inverted (6 is not a prime power)
  CHECK(as_values(fx.sets.f_divisor(6)) == M{{5, 2}, {19, 2}});
  CHECK(as_values(fx.sets.f_divisor(12)) == M{{5, 2}, {19, 2}, {383, 2}});
  CHECK(as_values(fx.sets.f_divisor(-12)) == as_values(fx.sets.f_divisor(12)));
  CHECK(as_values(fx.sets.f_divisor(10)) == M{{5, 4}, {2069, 2}});
}

TEST_CASE("indicator membership tracks prime-power divisibility") {
  auto& fx = test::shared();
  for (unsigned long lj : {2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 9ul, 16ul, 25ul, 27ul, 32ul}) {
    unsigned long ell;
    unsigned j;
    REQUIRE(is_prime_power(lj, &ell, &j));
    int ind = fx.sets.indicator(ell, j).id;
    for (long k = 1; k <= 48; ++k) {
      bool in_support = fx.sets.support(k).count(ind) > 0;
      CHECK(in_support == (k % (long)lj == 0));
    }
  }
}

TEST_CASE("Y-set union for coprime products") {
  auto& fx = test::shared();
  for (long m = 2; m <= 48; ++m) {
    for (long k = 2; m * k <= 48; ++k) {
      if (std::gcd(m, k) != 1) continue;
      auto ym = fx.sets.f_divisor(m).support();
      auto yk = fx.sets.f_divisor(k).support();
      auto ymk = fx.sets.f_divisor(m * k).support();
      std::set<int> uni = ym;
      uni.insert(yk.begin(), yk.end());
      CHECK(uni == ymk);
    }
  }
}

TEST_CASE("divisor order and equality of f-divisors") {
  auto& fx = test::shared();
  std::vector<DivisorVector> f(49);
  for (long n = 1; n <= 48; ++n) f[(size_t)n] = fx.sets.f_divisor(n);
  for (long k = 1; k <= 48; ++k) {
    for (long n = 1; n <= 48; ++n) {
      CHECK(f[(size_t)k].divides(f[(size_t)n]) == (n % k == 0));
      if (k != n) CHECK_FALSE(f[(size_t)k] == f[(size_t)n]);
    }
  }
}

TEST_CASE("sandwich: f_m f_k | f_mk | f_m^3 f_k^3 for coprime m,k") {
  auto& fx = test::shared();
  for (long m = 1; m <= 48; ++m) {
    for (long k = 1; m * k <= 48; ++k) {
      if (std::gcd(m, k) != 1) continue;
      DivisorVector fm = fx.sets.f_divisor(m), fk = fx.sets.f_divisor(k);
      DivisorVector fmk = fx.sets.f_divisor(m * k);
      CHECK((fm * fk).divides(fmk));
      CHECK(fmk.divides(fm.pow(3) * fk.pow(3)));
    }
  }
}

TEST_CASE("product reconstruction (converse of the sandwich)") {
  auto& fx = test::shared();
  std::vector<DivisorVector> f(49);
  for (long n = 1; n <= 48; ++n) f[(size_t)n] = fx.sets.f_divisor(n);
  for (long k = 1; k <= 48; ++k) {
    for (long m = 1; m <= 48; ++m) {
      for (long n = 1; n <= 48; ++n) {
        bool conds = f[(size_t)k].coprime(f[(size_t)m]) &&
                     (f[(size_t)k] * f[(size_t)m]).divides(f[(size_t)n]) &&
                     f[(size_t)n].divides(f[(size_t)k].pow(3) * f[(size_t)m].pow(3));
        bool expect = (std::gcd(k, m) == 1) && (n == k * m);
        CHECK(conds == expect);
      }
    }
  }
}
