#include "obd/regex.hpp"

#include "obd/relations.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cctype>
#include <numeric>

namespace obd {

RegexError::RegexError(const std::string& message, std::size_t position)
    : std::runtime_error("regex position " + std::to_string(position) + ": " + message), position_(position) {}

namespace {

// Thompson NFA: each state has letter edges and epsilon edges.
struct Nfa {
  std::vector<std::vector<std::pair<Letter, int>>> edges;
  std::vector<std::vector<int>> eps;

  int add() {
    edges.emplace_back();
    eps.emplace_back();
    return static_cast<int>(edges.size()) - 1;
  }
};

struct Frag {
  int start, end;
};

class RegexParser {
 public:
  RegexParser(std::string_view text, const Automaton& shape,
              const std::optional<std::vector<std::vector<int>>>& alphabets, Nfa& nfa)
      : text_(text), shape_(shape), alphabets_(alphabets), nfa_(nfa) {}

  Frag run() {
    Frag f = alternation();
    skip();
    if (i_ < text_.size()) fail("unexpected '" + std::string(1, text_[i_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw RegexError(msg, i_); }

  void skip() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
  }

  bool atom_start(std::size_t j) const {
    while (j < text_.size() && std::isspace(static_cast<unsigned char>(text_[j]))) ++j;
    return j < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '[' || text_[j] == '(');
  }

  Frag empty() {
    int s = nfa_.add(), e = nfa_.add();
    nfa_.eps[static_cast<std::size_t>(s)].push_back(e);
    return {s, e};
  }

  Frag alternation() {
    Frag f = concatenation();
    while (true) {
      skip();
      if (i_ < text_.size() && (text_[i_] == '|' || (text_[i_] == '+' && atom_start(i_ + 1)))) {
        ++i_;
        Frag g = concatenation();
        int s = nfa_.add(), e = nfa_.add();
        nfa_.eps[static_cast<std::size_t>(s)] = {f.start, g.start};
        nfa_.eps[static_cast<std::size_t>(f.end)].push_back(e);
        nfa_.eps[static_cast<std::size_t>(g.end)].push_back(e);
        f = {s, e};
      } else {
        return f;
      }
    }
  }

  Frag concatenation() {
    skip();
    if (!atom_start(i_)) return empty();
    Frag f = repetition();
    while (atom_start(i_)) {
      Frag g = repetition();
      nfa_.eps[static_cast<std::size_t>(f.end)].push_back(g.start);
      f.end = g.end;
    }
    return f;
  }

  Frag repetition() {
    Frag f = atom();
    while (true) {
      skip();
      if (i_ >= text_.size()) return f;
      char c = text_[i_];
      if (c == '*' || c == '?' || (c == '+' && !atom_start(i_ + 1))) {
        ++i_;
        int s = nfa_.add(), e = nfa_.add();
        nfa_.eps[static_cast<std::size_t>(s)].push_back(f.start);
        nfa_.eps[static_cast<std::size_t>(f.end)].push_back(e);
        if (c != '+') nfa_.eps[static_cast<std::size_t>(s)].push_back(e);
        if (c != '?') nfa_.eps[static_cast<std::size_t>(f.end)].push_back(f.start);
        f = {s, e};
      } else {
        return f;
      }
    }
  }

  int digit() {
    skip();
    if (i_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[i_]))) fail("expected a digit");
    int d = 0;
    while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) {
      d = d * 10 + (text_[i_] - '0');
      if (d > 1000000) fail("digit too large");
      ++i_;
    }
    return d;
  }

  Frag atom() {
    skip();
    std::size_t at = i_;
    if (text_[i_] == '(') {
      ++i_;
      Frag f = alternation();
      skip();
      if (i_ >= text_.size() || text_[i_] != ')') fail("expected ')'");
      ++i_;
      return f;
    }
    std::vector<int> ds;
    if (text_[i_] == '[') {
      ++i_;
      ds.push_back(digit());
      skip();
      while (i_ < text_.size() && text_[i_] == ',') {
        ++i_;
        ds.push_back(digit());
        skip();
      }
      if (i_ >= text_.size() || text_[i_] != ']') fail("expected ']'");
      ++i_;
    } else {
      // bare digits are single letters of a one-track expression
      if (shape_.arity() != 1) fail("bare digit in a " + std::to_string(shape_.arity()) + "-track expression");
      ds.push_back(text_[i_] - '0');
      ++i_;
    }
    if (static_cast<int>(ds.size()) != shape_.arity()) {
      throw RegexError("letter has " + std::to_string(ds.size()) + " digits, expected " + std::to_string(shape_.arity()), at);
    }
    for (std::size_t j = 0; j < ds.size(); ++j) {
      if (ds[j] > shape_.system().dmax()) {
        throw RegexError("digit " + std::to_string(ds[j]) + " exceeds the largest digit " +
                             std::to_string(shape_.system().dmax()),
                         at);
      }
      if (alphabets_) {
        const auto& alph = (*alphabets_)[j];
        if (std::find(alph.begin(), alph.end(), ds[j]) == alph.end()) {
          throw RegexError("digit " + std::to_string(ds[j]) + " not in the alphabet of track " + std::to_string(j + 1), at);
        }
      }
    }
    int s = nfa_.add(), e = nfa_.add();
    nfa_.edges[static_cast<std::size_t>(s)].push_back({shape_.letter(ds), e});
    return {s, e};
  }

  std::string_view text_;
  const Automaton& shape_;
  const std::optional<std::vector<std::vector<int>>>& alphabets_;
  Nfa& nfa_;
  std::size_t i_ = 0;
};

void closure(const Nfa& nfa, std::vector<int>& set) {
  std::vector<char> seen(nfa.edges.size(), 0);
  for (int s : set) seen[static_cast<std::size_t>(s)] = 1;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (int t : nfa.eps[static_cast<std::size_t>(set[i])]) {
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        set.push_back(t);
      }
    }
  }
  std::sort(set.begin(), set.end());
}

}  // namespace

Automaton regex_compile(const SystemPtr& sys, int arity, std::string_view pattern,
                        const std::optional<std::vector<std::vector<int>>>& alphabets) {
  if (arity < 1) throw RegexError("regular expressions need at least one track", 0);
  if (alphabets && static_cast<int>(alphabets->size()) != arity) throw RegexError("alphabet count does not match arity", 0);
  Automaton shape(sys, arity);
  Nfa nfa;
  Frag f = RegexParser(pattern, shape, alphabets, nfa).run();
  const Letter sigma = shape.alphabet_size();

  absl::flat_hash_map<std::vector<int>, State> ids;
  std::vector<std::vector<int>> subsets{{}};
  std::vector<State> delta(sigma, 0);
  auto intern = [&](std::vector<int> s) -> State {
    closure(nfa, s);
    auto [it, inserted] = ids.try_emplace(s, static_cast<State>(subsets.size()));
    if (inserted) {
      subsets.push_back(std::move(s));
      delta.resize(delta.size() + sigma, 0);
    }
    return it->second;
  };
  ids.emplace(std::vector<int>{}, 0);
  State init = intern({f.start});
  std::vector<std::vector<int>> buckets(sigma);
  for (State s = 1; s < subsets.size(); ++s) {
    for (auto& b : buckets) b.clear();
    for (int q : subsets[s]) {
      for (auto [l, t] : nfa.edges[static_cast<std::size_t>(q)]) buckets[l].push_back(t);
    }
    for (Letter l = 0; l < sigma; ++l) {
      if (buckets[l].empty()) continue;
      State t = intern(buckets[l]);
      delta[std::size_t(s) * sigma + l] = t;
    }
  }
  Automaton dfa(sys, arity, static_cast<State>(subsets.size()), init);
  for (State s = 0; s < subsets.size(); ++s) {
    dfa.set_accepting(s, std::binary_search(subsets[s].begin(), subsets[s].end(), f.end));
    for (Letter l = 0; l < sigma; ++l) dfa.set_next(s, l, delta[std::size_t(s) * sigma + l]);
  }
  std::vector<int> id(static_cast<std::size_t>(arity));
  std::iota(id.begin(), id.end(), 0);
  Automaton canon = product(minimize(dfa), id, *canonical_recognizer(sys, arity), id, arity, BoolOp::And);
  return product(normalize_zeros(canon), id, *canonical_recognizer(sys, arity), id, arity, BoolOp::And);
}

}  // namespace obd
