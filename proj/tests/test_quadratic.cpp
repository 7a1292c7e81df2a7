#include "doctest.h"
#include "obd/quadratic.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <random>

using namespace obd;
using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<120>>;

namespace {

QuadraticReal gamma21() { return QuadraticReal(-3, 1, 21, 6); }

Dec approx(const QuadraticReal& x) {
  Dec r = Dec(x.a().str()) + Dec(x.b().str()) * sqrt(Dec(x.radicand().str()));
  return r / Dec(x.c().str());
}

// partial quotients from a 120-digit decimal approximation
std::vector<int> decimal_cf(Dec x, int count) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    x = 1 / x;
    Dec f = floor(x);
    out.push_back(f.convert_to<int>());
    x -= f;
  }
  return out;
}

const std::vector<std::vector<int>> kCatalog = {{3, 1}, {2}, {1}, {4, 1, 1, 1}, {1, 2}, {5, 2, 7}, {1, 1, 3}};

}  // namespace

TEST_CASE("normalization and arithmetic") {
  auto g = gamma21();
  CHECK(g + g * QuadraticReal::rational(2) == QuadraticReal(-3, 1, 21, 2));
  CHECK(QuadraticReal::rational(1) + QuadraticReal::rational(3) * g == QuadraticReal(-1, 1, 21, 2));
  CHECK(QuadraticReal(2, 4, 8, 2) == QuadraticReal(1, 4, 2, 1));
  CHECK(QuadraticReal(4, 0, 5, 6) == QuadraticReal::rational(2, 3));
  CHECK(QuadraticReal(3, 1, 21, -6) == QuadraticReal(-3, -1, 21, 6));
  CHECK((g - g).sign() == 0);
  CHECK((g * g.reciprocal()) == QuadraticReal::rational(1));
  CHECK_THROWS_AS(g + QuadraticReal(0, 1, 2, 1), MathError);
  CHECK_THROWS_AS(QuadraticReal::rational(1, 0), MathError);
}

TEST_CASE("exact comparison") {
  auto g = gamma21();
  CHECK(g > QuadraticReal::rational(1, 4));
  CHECK(g < QuadraticReal::rational(1, 3));
  CHECK(QuadraticReal(0, 1, 2, 1) > QuadraticReal::rational(1414, 1000));
  CHECK(QuadraticReal(0, 1, 2, 1) < QuadraticReal::rational(1415, 1000));
  CHECK(g.to_string() == "(-3+sqrt(21))/6");
}

TEST_CASE("floor") {
  auto g = gamma21();
  CHECK(qr_floor(g) == 0);
  CHECK(qr_floor(QuadraticReal::rational(5) * g) == 1);
  CHECK(qr_floor(QuadraticReal(0, 4, 2, 1)) == 5);
  CHECK(qr_floor(QuadraticReal::rational(-7, 2)) == -4);
  CHECK(qr_floor(-QuadraticReal(0, 1, 2, 1)) == -2);
}

TEST_CASE("floor brackets the value on random inputs") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> coef(-500, 500), den(1, 60), rad(2, 200);
  for (int i = 0; i < 3000; ++i) {
    int d = rad(rng);
    BigInt r = isqrt(BigInt(d));
    if (r * r == d) continue;
    QuadraticReal x(coef(rng), coef(rng), d, den(rng));
    BigInt n = qr_floor(x);
    CHECK(QuadraticReal::rational(n) <= x);
    CHECK(x < QuadraticReal::rational(n + 1));
  }
}

TEST_CASE("continued fraction values") {
  CHECK(cf_value(PeriodicCF({3, 1})) == gamma21());
  CHECK(cf_value(PeriodicCF({2})) == QuadraticReal(-1, 1, 2, 1));
  CHECK(cf_value(PeriodicCF({4, 1, 1, 1})) == QuadraticReal(-2, 1, 7, 3));
  CHECK(cf_value(PeriodicCF({1})) == QuadraticReal(-1, 1, 5, 2));
  CHECK_THROWS(PeriodicCF({}));
  CHECK_THROWS(PeriodicCF({2, 0}));
}

TEST_CASE("expansion") {
  CHECK(cf_expand(gamma21(), 6) == std::vector<BigInt>{3, 1, 3, 1, 3, 1});
  CHECK(cf_expand(QuadraticReal(-1, 1, 2, 1), 4) == std::vector<BigInt>{2, 2, 2, 2});
  CHECK(cf_expand(QuadraticReal(-1, 1, 5, 2), 5) == std::vector<BigInt>{1, 1, 1, 1, 1});
  CHECK_THROWS(cf_expand(QuadraticReal::rational(1, 3), 3));
}

TEST_CASE("value round trip against a decimal oracle") {
  for (const auto& p : kCatalog) {
    PeriodicCF cf(p);
    auto v = cf_value(cf);
    for (int k = 1; k <= 5; ++k) {
      auto got = cf_expand(v, k * cf.length());
      std::vector<int> want;
      for (int j = 0; j < k; ++j) want.insert(want.end(), p.begin(), p.end());
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == want[i]);
    }
    CHECK(decimal_cf(approx(v), 4 * cf.length()) == [&] {
      std::vector<int> w;
      for (int j = 0; j < 4; ++j) w.insert(w.end(), p.begin(), p.end());
      return w;
    }());
  }
}

TEST_CASE("convergent recurrences and period identity") {
  auto t = convergents(PeriodicCF({3, 1}), 5);
  std::vector<BigInt> q;
  for (int i = 0; i <= 5; ++i) q.push_back(t.q(i));
  CHECK(q == std::vector<BigInt>{1, 3, 4, 15, 19, 72});
  CHECK(convergents(PeriodicCF({2}), 3).q(3) == 12);
  auto t7 = convergents(PeriodicCF({4, 1, 1, 1}), 4);
  CHECK(t7.q(4) == 14);
  CHECK(t7.q(3) == 9);
  for (const auto& p : kCatalog) {
    PeriodicCF cf(p);
    int m = cf.length();
    auto c = convergents(cf, 30 + m);
    CHECK(c.p(-1) == 1);
    CHECK(c.q(-1) == 0);
    CHECK(c.p(0) == 0);
    CHECK(c.q(0) == 1);
    // running matrix product of [[a_j,1],[1,0]]
    BigInt m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    for (int i = 1; i <= 30; ++i) {
      int a = cf.partial_quotient(i);
      CHECK(c.q(i) == a * c.q(i - 1) + c.q(i - 2));
      CHECK(c.p(i) == a * c.p(i - 1) + c.p(i - 2));
      BigInt n00 = m00 * a + m01, n10 = m10 * a + m11;
      m01 = m00;
      m11 = m10;
      m00 = n00;
      m10 = n10;
      // the product starts from a_0 = 0
      CHECK(c.p(i) == m10);
      CHECK(c.q(i) == m00);
      CHECK(c.q(i + m) == c.q(m) * c.q(i) + c.q(m - 1) * c.p(i));
    }
  }
}

TEST_CASE("rotation") {
  auto r = period_rotate(PeriodicCF({1, 3}));
  CHECK(r.period == PeriodicCF({3, 1}));
  CHECK_FALSE(r.all_ones_warning);
  CHECK(period_rotate(PeriodicCF({2})).period == PeriodicCF({2}));
  auto ones = period_rotate(PeriodicCF({1, 1}));
  CHECK(ones.period == PeriodicCF({1, 1}));
  CHECK(ones.all_ones_warning);
}
