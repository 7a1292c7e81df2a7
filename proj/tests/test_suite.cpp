#include "doctest.h"
#include "obd/session.hpp"
#include "obd/suite.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <set>
#include <sstream>

using namespace obd;

namespace {

using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<60>>;

SystemPtr sys(const std::string& name, std::vector<int> p) {
  return std::make_shared<NumerationSystem>(name, PeriodicCF(std::move(p)));
}

Dec gamma_of(const std::vector<int>& p) {
  Dec x = 0;
  for (int i = 300; i >= 1; --i) x = 1 / (p[static_cast<std::size_t>((i - 1) % p.size())] + x);
  return x;
}

std::vector<long long> terms(const std::vector<int>& p, const BeattySpec& s, int from, int count) {
  Dec g = gamma_of(p);
  Dec alpha = (s.a + s.b * g) / s.c, beta = (s.d + s.e * g) / s.c;
  std::vector<long long> out;
  for (int n = from; n < from + count; ++n) {
    out.push_back(static_cast<long long>(boost::multiprecision::floor(n * alpha + beta)));
  }
  return out;
}

// naturals below the largest term that are not sums of h terms
std::vector<BigInt> non_sums(const std::vector<long long>& t, int h) {
  long long bound = t.back();
  std::set<long long> reach{0};
  for (int k = 0; k < h; ++k) {
    std::set<long long> next;
    for (long long v : reach) {
      for (long long x : t) {
        if (v + x < bound) next.insert(v + x);
      }
    }
    reach = std::move(next);
  }
  std::vector<BigInt> out;
  for (long long v = 0; v < bound; ++v) {
    if (!reach.count(v)) out.emplace_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("basis order of the s13 sequence") {
  BeattySpec spec{2, 6, 2, 3, 3};
  auto r = find_min_basis_order(sys("msd_s13", {3, 1}), spec, 3);
  CHECK(r.verdict == BasisVerdict::AsymptoticBasis);
  CHECK(r.order == 2);
  CHECK(r.exceptional == non_sums(terms({3, 1}, spec, 1, 300), 2));
  CHECK(std::find(r.exceptional.begin(), r.exceptional.end(), BigInt(11)) != r.exceptional.end());
  CHECK(r.alpha.to_string() == "(-1+sqrt(21))/2");
}

TEST_CASE("basis order of floor(n phi + 1/2) from n = 0") {
  BeattySpec spec{2, 2, 2, 1, 0};
  auto r = find_min_basis_order(sys("msd_fib", {1}), spec, 3, 0);
  CHECK(r.order == 2);
  CHECK(r.exceptional == std::vector<BigInt>{1});
  CHECK(r.exceptional == non_sums(terms({1}, spec, 0, 400), 2));
}

TEST_CASE("degenerate and failing searches") {
  auto f = sys("msd_fib", {1});
  auto one = find_min_basis_order(f, {1, 0, 1, 0, 0}, 1);
  CHECK(one.order == 1);
  CHECK(one.verdict == BasisVerdict::AsymptoticBasis);
  CHECK(one.exceptional == std::vector<BigInt>{0});
  auto all = find_min_basis_order(f, {1, 0, 1, 0, 0}, 1, 0);
  CHECK(all.verdict == BasisVerdict::Basis);
  CHECK(all.exceptional.empty());
  auto even = find_min_basis_order(f, {2, 0, 1, 0, 0}, 2);
  CHECK(even.verdict == BasisVerdict::NotBasisAtCap);
  CHECK(even.order == 0);
  CHECK_THROWS_AS(find_min_basis_order(f, {1, 0, 1, 0, 0}, 0), MathError);
}

TEST_CASE("sums-complement against brute force") {
  BeattySpec spec{3, 1, 1, 0, 0};  // phi + 2
  auto a = sums_complement(sys("msd_fib", {1}), spec);
  auto t = terms({1}, spec, 1, 1500);
  std::set<long long> diffs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i; j-- > 0;) {
      if (t[i] - t[j] >= 200) break;
      diffs.insert(t[i] - t[j]);
    }
  }
  for (long long n = 0; n < 200; ++n) {
    INFO("n = " << n);
    CHECK(a.accepts_values(std::vector<BigInt>{n}) == (n >= 1 && !diffs.count(n)));
  }
}

TEST_CASE("script automata agree with exact arithmetic") {
  std::ostringstream out, err;
  Session s("", out);
  std::string script = R"obd(
ost s13 [0] [3 1]:
shift shift13 msd_s13:
def beattyg "?msd_s13 (n=0 & z=0) | (Eu,v n=u+1 & $shift13(u,v) & v=3*z+4*u)":
def beatty "?msd_s13 Eu $beattyg(6*n+3,u) & z=(u+2*n+3)/2":
)obd";
  REQUIRE(s.run_script(script, "t", err) == ExitCode::Ok);
  const auto& g = s.environment().predicate("beattyg").automaton;
  const auto& b = s.environment().predicate("beatty").automaton;
  auto gt = terms({3, 1}, {0, 1, 1, 0, 0}, 0, 3000);
  auto bt = terms({3, 1}, {2, 6, 2, 3, 3}, 1, 3000);
  for (long long n = 0; n < 3000; ++n) {
    CHECK(g.accepts_values(std::vector<BigInt>{n, gt[static_cast<std::size_t>(n)]}));
    CHECK_FALSE(g.accepts_values(std::vector<BigInt>{n, gt[static_cast<std::size_t>(n)] + 1}));
    if (n >= 1) CHECK(b.accepts_values(std::vector<BigInt>{n, bt[static_cast<std::size_t>(n - 1)]}));
  }
}

TEST_CASE("reproduce reports") {
  auto rep = reproduce("s7");
  CHECK(rep.passed());
  CHECK(rep.error.empty());
  auto bad = reproduce("s99");
  CHECK_FALSE(bad.passed());
  CHECK(bad.error.find("unknown section") != std::string::npos);
  std::ostringstream x;
  write_junit(x, {rep, bad});
  CHECK(x.str().find("<testsuite name=\"s7\" tests=\"2\" failures=\"0\"") != std::string::npos);
  CHECK(x.str().find("<error message=\"unknown section s99\"/>") != std::string::npos);
  CHECK(reproducible_sections(false) == std::vector<std::string>{"s6", "s7", "s8", "s9", "s10", "s12"});
  CHECK(reproducible_sections(true).size() == 7);
}
