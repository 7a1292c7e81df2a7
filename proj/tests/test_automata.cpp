#include "doctest.h"
#include "obd/relations.hpp"
#include "oracle.hpp"

#include <random>
#include <sstream>

using namespace obd;

namespace {

SystemPtr sys(std::vector<int> p, std::string name = "t") {
  return std::make_shared<NumerationSystem>(std::move(name), PeriodicCF(std::move(p)));
}

bool accepts(const Automaton& a, std::vector<BigInt> v) { return a.accepts_values(v); }

Automaton empty_of(const SystemPtr& s, int k) { return Automaton(s, k); }

Automaton universal(const SystemPtr& s, int k) {
  Automaton a(s, k);
  a.set_accepting(0, true);
  return a;
}

// {x : x is a multiple of 3}, via x = 3w projected
Automaton multiples_of_three(const SystemPtr& s) {
  return project(linear_relation(s, {{1, -3}, 0}), 1);
}

std::vector<Automaton> catalog(const SystemPtr& s) {
  std::vector<Automaton> out;
  out.push_back(order_relation(s, Order::Lt));
  out.push_back(order_relation(s, Order::Eq));
  out.push_back(linear_relation(s, {{1, -2}, 1}));
  out.push_back(shift_relation(s));
  out.push_back(linear_range_relation(s, std::vector<std::int64_t>{2, -5}, 0, 3));
  return out;
}

}  // namespace

TEST_CASE("boolean products") {
  auto s = sys({3, 1});
  auto lt = order_relation(s, Order::Lt);
  CHECK(is_empty(product(lt, empty_of(s, 2), BoolOp::And)));
  CHECK(equivalent(product(lt, universal(s, 2), BoolOp::And), lt));
  CHECK(product(lt, universal(s, 2), BoolOp::And).state_count() == lt.state_count());
  // transitivity of equality via aligned tracks (x, y, z)
  auto eq = order_relation(s, Order::Eq);
  auto xy_yz = product(eq, std::vector<int>{0, 1}, eq, std::vector<int>{1, 2}, 3, BoolOp::And);
  auto xz = product(eq, std::vector<int>{0, 2}, *canonical_recognizer(s, 3), std::vector<int>{0, 1, 2}, 3, BoolOp::And);
  CHECK(is_empty(product(xy_yz, xz, BoolOp::AndNot)));
  auto other = sys({2}, "u");
  CHECK_THROWS_AS(product(lt, order_relation(other, Order::Lt), BoolOp::And), AutomatonError);
}

TEST_CASE("complement") {
  auto s = sys({3, 1});
  auto c = complement(empty_of(s, 1));
  CHECK(equivalent(c, *canonical_recognizer(s, 1)));
  auto lt = order_relation(s, Order::Lt);
  CHECK(isomorphic(complement(complement(lt)), lt));
  auto geq = permute_tracks(order_relation(s, Order::Leq), std::vector<int>{1, 0});
  CHECK(isomorphic(complement(lt), geq));
  auto cl = complement(lt);
  for (std::size_t len = 0; len <= 5; ++len) {
    oracle::canonical_tuples({3, 1}, 2, len, [&](const auto& t) {
      REQUIRE(cl.accepts(oracle::word(cl, t)) == (oracle::value({3, 1}, t[0]) >= oracle::value({3, 1}, t[1])));
    });
  }
}

TEST_CASE("de morgan on catalog automata") {
  for (auto p : std::vector<std::vector<int>>{{3, 1}, {2}, {1}}) {
    auto s = sys(p);
    auto cat = catalog(s);
    for (const auto& a : cat) {
      for (const auto& b : cat) {
        if (a.arity() != b.arity()) continue;
        auto lhs = complement(product(a, b, BoolOp::And));
        auto rhs = product(complement(a), complement(b), BoolOp::Or);
        CHECK(isomorphic(lhs, rhs));
      }
    }
  }
}

TEST_CASE("projection") {
  auto s = sys({3, 1});
  auto eq = order_relation(s, Order::Eq);
  CHECK(isomorphic(project(eq, 1), *canonical_recognizer(s, 1)));
  auto add = linear_relation(s, {{1, 1, -1}, 0});
  CHECK(is_empty(complement(project(add, 2))));
  // 2x = z with z odd
  auto dbl = linear_relation(s, {{2, -1}, 0});
  auto odd = project(linear_relation(s, {{2, -1}, -1}), 0);  // z = 2y + 1
  auto both = product(dbl, std::vector<int>{0, 1}, odd, std::vector<int>{1}, 2, BoolOp::And);
  CHECK(is_empty(project(both, 0)));
  // witnesses longer than the kept track need leading-zero saturation
  auto three = multiples_of_three(s);
  for (long long x = 0; x < 500; ++x) REQUIRE(accepts(three, {x}) == (x % 3 == 0));
  auto halves = project(linear_relation(s, {{2, -1}, 0}), 0);  // even numbers in track of z
  for (long long z = 0; z < 500; ++z) REQUIRE(accepts(halves, {z}) == (z % 2 == 0));
  // everything below a value: E y (x < y) is all x, projecting to arity 0 gives true
  auto all = project(order_relation(s, Order::Lt), std::vector<int>{0, 1});
  CHECK(all.arity() == 0);
  CHECK_FALSE(is_empty(all));
}

TEST_CASE("minimization") {
  auto s = sys({3, 1});
  for (const auto& a : catalog(s)) {
    auto m = minimize(a);
    CHECK(minimize(m).state_count() == m.state_count());
    CHECK(to_text(minimize(m)) == to_text(m));
  }
  // language preserved on random words, including a blown-up copy
  auto lt = order_relation(s, Order::Lt);
  Automaton big(s, 2, lt.num_states() * 2, 0);
  for (State q = 0; q < lt.num_states(); ++q) {
    for (int copy = 0; copy < 2; ++copy) {
      State src = q + copy * lt.num_states();
      big.set_accepting(src, lt.accepting(q));
      for (Letter l = 0; l < lt.alphabet_size(); ++l) big.set_next(src, l, lt.next(q, l) + ((l + q) % 2) * lt.num_states());
    }
  }
  big.set_initial(lt.initial());
  auto m = minimize(big);
  CHECK(m.state_count() == lt.state_count());
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    std::vector<Letter> w(rng() % 12);
    for (auto& l : w) l = rng() % lt.alphabet_size();
    REQUIRE(m.accepts(w) == big.accepts(w));
  }
}

TEST_CASE("zero padding closure after operations") {
  auto s = sys({3, 1});
  std::mt19937 rng(11);
  auto cat = catalog(s);
  cat.push_back(complement(cat[0]));
  cat.push_back(project(linear_relation(s, {{1, 1, -1}, 0}), 0));
  cat.push_back(normalize_zeros(multiples_of_three(s)));
  for (const auto& a : cat) {
    for (int i = 0; i < 2000; ++i) {
      std::vector<Letter> w(rng() % 10);
      for (auto& l : w) l = rng() % a.alphabet_size();
      std::vector<Letter> z{0};
      z.insert(z.end(), w.begin(), w.end());
      REQUIRE(a.accepts(w) == a.accepts(z));
    }
  }
}

TEST_CASE("normalize zeros") {
  auto s = sys({2});
  // words 0^k 1: accepted only with an even number of leading zeros
  Automaton a(s, 1, 4, 0);
  for (Letter l = 0; l < a.alphabet_size(); ++l) {
    for (State q = 0; q < 4; ++q) a.set_next(q, l, 3);
  }
  a.set_next(0, 0, 1);
  a.set_next(1, 0, 0);
  a.set_next(0, 1, 2);
  a.set_accepting(2, true);
  CHECK(a.accepts(std::vector<Letter>{1}));
  CHECK_FALSE(a.accepts(std::vector<Letter>{0, 1}));
  auto n = normalize_zeros(a);
  CHECK(n.accepts(std::vector<Letter>{1}));
  CHECK(n.accepts(std::vector<Letter>{0, 1}));
  CHECK(n.accepts(std::vector<Letter>{0, 0, 0, 1}));
  CHECK_FALSE(n.accepts(std::vector<Letter>{1, 0}));
}

TEST_CASE("decision procedures") {
  auto s = sys({3, 1});
  auto d = decide(empty_of(s, 1));
  CHECK(d.empty);
  auto lt = order_relation(s, Order::Lt);
  auto w = decide(lt);
  REQUIRE_FALSE(w.empty);
  CHECK(w.witness == std::vector<BigInt>{0, 1});
  CHECK_FALSE(is_finite(lt));
  auto small = product(order_relation(s, Order::Lt), std::vector<int>{0, 1},
                       linear_relation(s, {{1}, 9}), std::vector<int>{1}, 2, BoolOp::And);  // x < 9 on track 0
  auto xs = project(small, 1);
  CHECK(is_finite(xs));
  auto all = enumerate(xs, -1);
  REQUIRE(all.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(all[static_cast<std::size_t>(i)][0] == i);
  CHECK_THROWS(enumerate(lt, -1));
  auto first = enumerate(lt, 4);
  CHECK(first.size() == 4);
  CHECK(is_finite(empty_of(s, 2)));
  CHECK(enumerate(empty_of(s, 2), -1).empty());
}

TEST_CASE("enumeration matches a brute-force filter") {
  for (auto p : std::vector<std::vector<int>>{{3, 1}, {2}}) {
    auto s = sys(p);
    for (const auto& a : catalog(s)) {
      std::vector<std::vector<std::vector<int>>> want;
      for (std::size_t len = 0; len <= 6; ++len) {
        oracle::canonical_tuples(p, a.arity(), len, [&](const auto& t) {
          if (len > 0) {
            bool lead = true;
            for (const auto& x : t) lead = lead && x[0] == 0;
            if (lead) return;
          }
          if (a.accepts(oracle::word(a, t))) want.push_back(t);
        });
      }
      // the first words up to length 6 in length-then-lex order of letters
      std::stable_sort(want.begin(), want.end(), [&](const auto& x, const auto& y) {
        auto wx = oracle::word(a, x), wy = oracle::word(a, y);
        if (wx.size() != wy.size()) return wx.size() < wy.size();
        return wx < wy;
      });
      auto got = enumerate(a, static_cast<long>(want.size()));
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        for (int j = 0; j < a.arity(); ++j) {
          REQUIRE(got[i][static_cast<std::size_t>(j)] == oracle::value(p, want[i][static_cast<std::size_t>(j)]));
        }
      }
    }
  }
}

TEST_CASE("combine") {
  auto s = sys({3, 1});
  auto none = empty_of(s, 1);
  std::vector<CombinePart> parts{{&none, 1, "none"}};
  auto c = combine(parts, 0);
  for (long long n = 0; n < 50; ++n) CHECK(c.output_for(std::vector<BigInt>{n}) == 0);

  auto three = multiples_of_three(s);
  auto one = project(linear_relation(s, {{1, -3}, 1}), 1);
  auto overlap = project(linear_relation(s, {{1, -2}, 0}), 1);
  std::vector<CombinePart> p2{{&three, -1, "three"}, {&one, 1, "one"}};
  auto mod = combine(p2, 5);
  CHECK(mod.has_outputs());
  for (long long n = 0; n < 200; ++n) {
    std::int64_t want = n % 3 == 0 ? -1 : n % 3 == 1 ? 1 : 5;
    REQUIRE(mod.output_for(std::vector<BigInt>{n}) == want);
  }
  CHECK(equivalent(output_equals(mod, 5), project(linear_relation(s, {{1, -3}, 2}), 1)));
  std::vector<CombinePart> bad{{&three, 0, "three"}, {&overlap, 1, "even"}};
  CHECK_THROWS_WITH_AS(combine(bad, 0), doctest::Contains("overlap"), AutomatonError);
}

TEST_CASE("text format round trip") {
  auto s = sys({3, 1}, "msd_s");
  auto lookup = [&](const std::string& name) -> SystemPtr {
    if (name == "msd_s") return s;
    throw std::runtime_error("unknown");
  };
  auto lt = order_relation(s, Order::Lt);
  auto text = to_text(lt);
  CHECK(text.rfind("system msd_s arity 2 dmax 3\n", 0) == 0);
  auto back = from_text(text, lookup);
  CHECK(to_text(back) == text);
  CHECK(equivalent(back, lt));
  auto three = multiples_of_three(s);
  std::vector<CombinePart> parts{{&three, 7, "three"}};
  auto out = combine(parts, 2);
  auto out_text = to_text(out);
  CHECK(out_text.find("outputs") != std::string::npos);
  auto out_back = from_text(out_text, lookup);
  CHECK(to_text(out_back) == out_text);
  for (long long n = 0; n < 30; ++n) CHECK(out_back.output_for(std::vector<BigInt>{n}) == out.output_for(std::vector<BigInt>{n}));
  auto e = empty_of(s, 1);
  CHECK(to_text(from_text(to_text(e), lookup)) == to_text(minimize(e)));
  CHECK_THROWS(from_text("system x arity 1 dmax 3\n", lookup));
  std::ostringstream dot;
  write_dot(dot, lt, "lt");
  CHECK(dot.str().find("digraph") != std::string::npos);
  CHECK(dot.str().find("[0,1]") != std::string::npos);
}

TEST_CASE("intermediate observer") {
  auto s = sys({3, 1});
  std::size_t largest = 0;
  set_intermediate_observer([&](std::size_t n) { largest = std::max(largest, n); });
  project(linear_relation(s, {{1, 1, -1}, 0}), 0);
  set_intermediate_observer(nullptr);
  CHECK(largest > 0);
}
