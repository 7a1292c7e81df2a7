#include "doctest.h"
#include "obd/beatty.hpp"
#include "obd/logic.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

using namespace obd;

namespace {

using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<80>>;

SystemPtr sys(std::vector<int> p) { return std::make_shared<NumerationSystem>("msd_t", PeriodicCF(std::move(p))); }

// [0; p, p, ...] by backward iteration
Dec gamma_of(const std::vector<int>& p) {
  Dec x = 0;
  for (int i = 400; i >= 1; --i) x = 1 / (p[static_cast<std::size_t>((i - 1) % p.size())] + x);
  return x;
}

long floor_of(const Dec& x) { return static_cast<long>(boost::multiprecision::floor(x)); }

const std::vector<std::vector<int>> kCatalog = {{1}, {2}, {3, 1}, {1, 2}, {4, 1, 1, 1}};

void check_function(const Automaton& a, const std::function<long(long)>& f, long from, long to) {
  for (long n = 0; n <= to; ++n) {
    long want = n >= from ? f(n) : -1;
    for (long z = 0; z <= want + 3; ++z) {
      INFO("n=" << n << " z=" << z << " want " << want);
      CHECK(a.accepts_values(std::vector<BigInt>{n, z}) == (z == want));
    }
  }
}

}  // namespace

TEST_CASE("floor of n gamma") {
  for (const auto& p : kCatalog) {
    auto s = sys(p);
    Dec g = gamma_of(p);
    auto a = floor_gamma_sync(s);
    check_function(a, [&](long n) { return floor_of(n * g); }, 0, 120);
  }
}

TEST_CASE("golden ratio sizes") {
  auto s = sys({1});
  // floor(n phi) = floor(n gamma) + n with gamma = phi - 1
  auto a = beatty_sync(s, {0, 1, 1, 0, 0});
  Dec g = gamma_of({1});
  check_function(a, [&](long n) { return floor_of(n * g); }, 1, 80);
  auto phin = beatty_sync(s, {1, 1, 1, 0, 0});
  check_function(phin, [&](long n) { return floor_of(n * (g + 1)); }, 1, 80);
}

TEST_CASE("inhomogeneous specs") {
  struct Case {
    std::vector<int> p;
    BeattySpec s;
  };
  std::vector<Case> cases = {
      {{1}, {1, 2, 1, 0, 0}}, {{1}, {0, 1, 2, 1, 1}}, {{2}, {3, 2, 5, 1, 1}},
      {{3, 1}, {0, 3, 2, 1, 0}}, {{1, 2}, {2, 1, 3, 0, 2}}, {{1}, {-1, 2, 1, 0, 0}},
  };
  for (const auto& c : cases) {
    auto s = sys(c.p);
    Dec g = gamma_of(c.p);
    Dec alpha = (c.s.a + c.s.b * g) / c.s.c;
    Dec beta = (c.s.d + c.s.e * g) / c.s.c;
    auto a = beatty_sync(s, c.s, true);
    check_function(a, [&](long n) { return floor_of(n * alpha + beta); }, 0, 60);
  }
}

TEST_CASE("spec validation") {
  auto s = sys({1});
  CHECK_THROWS_AS(check_beatty_spec(*s, {0, -1, 1, 0, 0}), MathError);
  CHECK_THROWS_AS(check_beatty_spec(*s, {0, 1, 0, 0, 0}), MathError);
  CHECK_THROWS_AS(check_beatty_spec(*s, {-1, 1, 1, 0, 0}), MathError);
  CHECK_THROWS_AS(check_beatty_spec(*s, {1, 0, 1, -3, 0}), MathError);
  CHECK_THROWS_AS(check_beatty_spec(*s, {0, 1, 1, 5, -2}), MathError);
  CHECK_NOTHROW(check_beatty_spec(*s, {0, 1, 1, 0, 0}));
  CHECK_THROWS_AS(beatty_sync(s, {1, 1, 1, -2, 0}, true), MathError);
}

TEST_CASE("affine composition") {
  auto s = sys({3, 1});
  Dec g = gamma_of({3, 1});
  auto f = floor_gamma_sync(s);
  auto h = affine_compose(f, 2, 1, 1, 3, 2);
  check_function(h, [&](long n) { return (floor_of((2 * n + 1) * g) + n + 3) / 2; }, 0, 60);
}
