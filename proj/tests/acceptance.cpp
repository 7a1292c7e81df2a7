// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include "obd/relations.hpp"
#include "obd/session.hpp"
#include "obd/suite.hpp"
#include "oracle.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace obd;
namespace fs = std::filesystem;

namespace {

using Dec = boost::multiprecision::number<boost::multiprecision::cpp_dec_float<60>>;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

fs::path work_root() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / ("obd-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
  }();
  return root;
}

SystemPtr sys(const std::string& name, std::vector<int> p) {
  return std::make_shared<NumerationSystem>(name, PeriodicCF(std::move(p)));
}

Dec gamma_of(const std::vector<int>& p) {
  Dec x = 0;
  for (int i = 300; i >= 1; --i) x = 1 / (p[static_cast<std::size_t>((i - 1) % p.size())] + x);
  return x;
}

long long dec_floor(const Dec& x) { return static_cast<long long>(boost::multiprecision::floor(x)); }

// floor(n alpha + beta) for alpha = (a + b g)/c, beta = (d + e g)/c
std::vector<long long> beatty_terms(const std::vector<int>& p, const BeattySpec& s, int from, int count) {
  Dec g = gamma_of(p);
  Dec alpha = (s.a + s.b * g) / s.c, beta = (s.d + s.e * g) / s.c;
  std::vector<long long> out;
  for (int n = from; n < from + count; ++n) out.push_back(dec_floor(n * alpha + beta));
  return out;
}

// Runs a scripted section and folds its checks into the outcome; the
// session directory stays available for reloading.
SectionReport section(const std::string& name, Outcome& o) {
  ReproduceOptions opts;
  opts.work_dir = work_root();
  auto rep = reproduce(name, opts);
  o.require(rep.error.empty(), name + " script error: " + rep.error);
  for (const auto& c : rep.checks) o.require(c.pass, c.name + " = " + c.actual + ", expected " + c.expected);
  if (o.pass) {
    for (const auto& c : rep.checks) o.detail += (o.detail.empty() ? "" : ", ") + c.name + " " + c.actual;
  }
  return rep;
}

bool has_check(const SectionReport& rep, const std::string& name) {
  for (const auto& c : rep.checks) {
    if (c.name == name) return c.pass;
  }
  return false;
}

Outcome criterion1() {
  Outcome o;
  auto rep = section("s6", o);
  o.require(has_check(rep, "beattyg") && has_check(rep, "beatty"), "state counts");
  std::ostringstream sink;
  Session s(work_root() / "s6", sink);
  const auto& g = s.predicate("beattyg").automaton;
  const auto& b = s.predicate("beatty").automaton;
  auto gt = beatty_terms({3, 1}, {0, 1, 1, 0, 0}, 0, 10000);
  auto bt = beatty_terms({3, 1}, {2, 6, 2, 3, 3}, 1, 9999);
  bool ok = true;
  for (long long n = 0; n < 10000 && ok; ++n) {
    long long z = gt[static_cast<std::size_t>(n)];
    ok = g.accepts_values(std::vector<BigInt>{n, z}) && !g.accepts_values(std::vector<BigInt>{n, z + 1});
    if (ok && n >= 1) {
      long long w = bt[static_cast<std::size_t>(n - 1)];
      ok = b.accepts_values(std::vector<BigInt>{n, w}) && !b.accepts_values(std::vector<BigInt>{n, w + 1});
    }
  }
  o.require(ok, "automata disagree with exact arithmetic below 10^4");
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto rep = section("s6", o);
  o.require(has_check(rep, "check2"), "check2");
  auto t = beatty_terms({3, 1}, {2, 6, 2, 3, 3}, 1, 20);
  bool found = false;
  for (long long u : t) {
    for (long long v : t) found |= u + v == 11;
  }
  o.require(!found, "11 is a sum of two terms");
  o.detail += ", 11 not a sum of two";
  return o;
}

Outcome criterion3() {
  Outcome o;
  auto rep = section("s7", o);
  o.require(has_check(rep, "test"), "test");
  auto r = find_min_basis_order(sys("msd_fib", {1}), {2, 2, 2, 1, 0}, 3, 0);
  o.require(r.verdict == BasisVerdict::AsymptoticBasis && r.order == 2, "basis order");
  o.require(r.exceptional == std::vector<BigInt>{1}, "exceptional set");
  o.detail += ", order " + std::to_string(r.order) + " exceptional {1}";
  return o;
}

Outcome criterion4() {
  Outcome o;
  section("s8", o);
  return o;
}

Outcome criterion5() {
  Outcome o;
  auto rep = section("s9", o);
  o.require(has_check(rep, "diff values"), "diff values");
  std::ostringstream sink;
  Session s(work_root() / "s9", sink);
  const auto& diff = s.predicate("diff").automaton;
  // c~(n): n-th positive integer outside {floor(i phi^4)} and {floor(i phi^3)}
  Dec phi = 1 + gamma_of({1});
  const int limit = 3000;
  std::set<long long> taken;
  for (int i = 1; dec_floor(i * phi * phi * phi) < 4 * limit; ++i) {
    taken.insert(dec_floor(i * phi * phi * phi));
    taken.insert(dec_floor(i * phi * phi * phi * phi));
  }
  long long x = 0;
  bool ok = true;
  for (long long n = 1; n <= limit && ok; ++n) {
    do ++x;
    while (taken.count(x));
    long long want = dec_floor(n * phi) - x;
    ok = diff.output_for(std::vector<BigInt>{n}) == want && want >= 0 && want <= 2;
  }
  o.require(ok, "difference automaton disagrees with brute force");
  return o;
}

Outcome criterion6() {
  Outcome o;
  auto rep = section("s10", o);
  for (const char* name : {"checkeven", "checkodd", "kimber"}) o.require(has_check(rep, name), name);
  return o;
}

Outcome criterion7() {
  Outcome o;
  auto rep = section("s12", o);
  int rows = 0;
  for (const auto& c : rep.checks) rows += c.name.rfind("table ", 0) == 0 ? 1 : 0;
  o.require(rows == 7, "expected 7 table rows, got " + std::to_string(rows));
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto rep = section("s11", o);
  o.require(has_check(rep, "a276873 largest intermediate"), "largest intermediate");
  return o;
}

Outcome criterion9() {
  Outcome o;
  const std::vector<std::vector<int>> identity_systems = {{1}, {2}, {3, 1}, {4, 1, 1, 1}};
  for (const auto& p : identity_systems) {
    NumerationSystem s("t", PeriodicCF(p));
    const int m = s.period_length();
    bool ok = true;
    for (int n = 1; n <= 10000 && ok; ++n) {
      auto x = encode(s, n - 1);
      x.digits.insert(x.digits.end(), static_cast<std::size_t>(m), 0);
      ok = decode(s, x) == s.q(m) * (n - 1) + s.q(m - 1) * qr_floor(QuadraticReal::rational(n) * s.gamma());
    }
    o.require(ok, "shifted representation identity");
  }

  const std::vector<std::vector<int>> catalog = {{3, 1}, {2}, {1}, {4, 1, 1, 1}};
  for (const auto& p : catalog) {
    NumerationSystem s("t", PeriodicCF(p));
    bool ok = true;
    for (long long n = 0; n <= 100000 && ok; ++n) {
      auto x = encode(s, n);
      ok = is_canonical(s, x) && decode(s, x) == n;
    }
    o.require(ok, "encode/decode bijection");
  }

  struct Lin {
    std::vector<std::int64_t> c;
    std::int64_t c0;
  };
  const std::vector<Lin> lins = {{{1, 1, -1}, 0}, {{1, -2}, 0}, {{3, 4, -1}, 0}, {{1, -1}, 3}, {{2, -3}, -1}};
  for (const auto& p : catalog) {
    auto s = sys("t", p);
    for (const auto& l : lins) {
      auto a = linear_relation(s, {l.c, l.c0});
      const int k = static_cast<int>(l.c.size());
      bool ok = true;
      for (std::size_t len = 0; len <= 6 && ok; ++len) {
        oracle::canonical_tuples(p, k, len, [&](const auto& t) {
          long long sum = 0;
          for (int j = 0; j < k; ++j) sum += l.c[static_cast<std::size_t>(j)] * oracle::value(p, t[static_cast<std::size_t>(j)]);
          ok = ok && a.accepts(oracle::word(a, t)) == (sum == l.c0);
        });
      }
      o.require(ok, "linear relation vs exhaustive oracle");
    }
  }

  std::mt19937 rng(20);
  for (const auto& p : catalog) {
    auto s = sys("t", p);
    std::vector<Automaton> two = {order_relation(s, Order::Lt), order_relation(s, Order::Leq),
                                  order_relation(s, Order::Eq), shift_relation(s),
                                  linear_relation(s, {{1, -2}, 0}), linear_relation(s, {{2, -3}, -1})};
    for (const auto& a : two) {
      for (const auto& b : two) {
        o.require(isomorphic(complement(product(a, b, BoolOp::And)),
                             product(complement(a), complement(b), BoolOp::Or)),
                  "de morgan");
        o.require(isomorphic(complement(product(a, b, BoolOp::Or)),
                             product(complement(a), complement(b), BoolOp::And)),
                  "de morgan");
      }
      // E x (A or B) = (E x A) or (E x B)
      auto ab = project(product(a, two[0], BoolOp::Or), 1);
      o.require(isomorphic(ab, product(project(a, 1), project(two[0], 1), BoolOp::Or)), "projection over or");
      o.require(isomorphic(project(a, std::vector<int>{0, 1}), project(project(a, 1), 0)),
                "projection of both tracks");
    }
    auto closed = two;
    closed.push_back(complement(two[3]));
    closed.push_back(product(two[0], two[3], BoolOp::Or));
    for (const auto& a : closed) {
      bool ok = true;
      for (int i = 0; i < 2000 && ok; ++i) {
        std::vector<Letter> w(rng() % 12);
        for (auto& l : w) l = static_cast<Letter>(rng() % a.alphabet_size());
        std::vector<Letter> z(1 + rng() % 3, 0);
        z.insert(z.end(), w.begin(), w.end());
        ok = a.accepts(w) == a.accepts(z);
      }
      o.require(ok, "zero-padding closure");
    }
  }
  if (o.pass) o.detail = "all property checks";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, 30, criterion1},  {2, 60, criterion2},  {3, 30, criterion3},
      {4, 60, criterion4},  {5, 120, criterion5}, {6, 120, criterion6},
      {7, 60, criterion7},  {8, 1800, criterion8}, {9, 600, criterion9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << c.number << ": " << (o.pass ? "PASS" : "FAIL") << " (" << std::fixed
              << std::setprecision(1) << secs << " s) " << o.detail << std::endl;
  }
  fs::remove_all(work_root());
  return failures == 0 ? 0 : 1;
}
