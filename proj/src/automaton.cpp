#include "obd/automaton.hpp"

#include "obd/relations.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace obd {

namespace {
thread_local std::function<void(std::size_t)> g_observer;
}

void set_intermediate_observer(std::function<void(std::size_t)> observer) {
  g_observer = std::move(observer);
}

const std::function<void(std::size_t)>& intermediate_observer() { return g_observer; }

void report_intermediate(std::size_t states) {
  if (g_observer) g_observer(states);
}

namespace {
thread_local std::size_t g_budget = SIZE_MAX;
}

StateBudget::StateBudget(std::size_t limit) : saved_(g_budget) { g_budget = limit; }
StateBudget::~StateBudget() { g_budget = saved_; }

void check_budget(std::size_t states) {
  if (states > g_budget) throw BudgetExceeded("state budget of " + std::to_string(g_budget) + " exceeded");
}

bool apply(BoolOp op, bool x, bool y) {
  switch (op) {
    case BoolOp::And: return x && y;
    case BoolOp::Or: return x || y;
    case BoolOp::AndNot: return x && !y;
    case BoolOp::Xor: return x != y;
    case BoolOp::Iff: return x == y;
  }
  return false;
}

Automaton::Automaton(SystemPtr system, int arity, State num_states, State initial)
    : system_(std::move(system)), arity_(arity), num_states_(num_states), initial_(initial) {
  if (!system_) throw AutomatonError("automaton needs a numeration system");
  if (arity_ < 0) throw AutomatonError("negative arity");
  base_ = system_->dmax() + 1;
  std::uint64_t size = 1;
  for (int i = 0; i < arity_; ++i) {
    size *= static_cast<std::uint64_t>(base_);
    if (size > (1u << 24)) throw AutomatonError("alphabet too large for arity " + std::to_string(arity_));
  }
  alphabet_ = static_cast<Letter>(size);
  if (num_states_ == 0) throw AutomatonError("automaton needs at least one state");
  delta_.assign(std::size_t(num_states_) * alphabet_, 0);
  accepting_.assign(num_states_, 0);
}

void Automaton::set_output(State s, std::int64_t v) {
  if (outputs_.empty()) outputs_.assign(num_states_, 0);
  outputs_[s] = v;
}

State Automaton::add_state() {
  State s = num_states_++;
  delta_.resize(std::size_t(num_states_) * alphabet_, 0);
  accepting_.push_back(0);
  if (!outputs_.empty()) outputs_.push_back(0);
  return s;
}

std::vector<int> Automaton::digits(Letter l) const {
  std::vector<int> out(static_cast<std::size_t>(arity_));
  for (int j = arity_ - 1; j >= 0; --j) {
    out[static_cast<std::size_t>(j)] = static_cast<int>(l % static_cast<Letter>(base_));
    l /= static_cast<Letter>(base_);
  }
  return out;
}

Letter Automaton::letter(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != arity_) throw AutomatonError("letter arity mismatch");
  Letter l = 0;
  for (int d : digits) {
    if (d < 0 || d >= base_) throw AutomatonError("digit out of range: " + std::to_string(d));
    l = l * static_cast<Letter>(base_) + static_cast<Letter>(d);
  }
  return l;
}

std::string Automaton::letter_name(Letter l) const {
  std::string out = "[";
  auto ds = digits(l);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ds[i]);
  }
  return out + "]";
}

bool Automaton::is_sink(State s) const {
  if (accepting(s)) return false;
  for (State t : row(s)) {
    if (t != s) return false;
  }
  return true;
}

namespace {

std::vector<char> reachable_states(const Automaton& a) {
  std::vector<char> seen(a.num_states(), 0);
  std::vector<State> stack{a.initial()};
  seen[a.initial()] = 1;
  while (!stack.empty()) {
    State s = stack.back();
    stack.pop_back();
    for (State t : a.row(s)) {
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

}  // namespace

// Reachable states from which an accepting state is reachable.
std::vector<char> live_states(const Automaton& a) {
  auto reach = reachable_states(a);
  const State n = a.num_states();
  std::vector<std::uint32_t> start(std::size_t(n) + 1, 0);
  for (State s = 0; s < n; ++s) {
    if (!reach[s]) continue;
    for (State t : a.row(s)) ++start[t + 1];
  }
  for (State s = 0; s < n; ++s) start[s + 1] += start[s];
  std::vector<State> preds(start[n]);
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  for (State s = 0; s < n; ++s) {
    if (!reach[s]) continue;
    for (State t : a.row(s)) preds[fill[t]++] = s;
  }
  std::vector<char> live(n, 0);
  std::vector<State> stack;
  for (State s = 0; s < n; ++s) {
    if (reach[s] && a.accepting(s)) {
      live[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    State t = stack.back();
    stack.pop_back();
    for (std::uint32_t i = start[t]; i < start[t + 1]; ++i) {
      State s = preds[i];
      if (!live[s]) {
        live[s] = 1;
        stack.push_back(s);
      }
    }
  }
  return live;
}

std::size_t Automaton::state_count() const {
  auto live = live_states(*this);
  std::size_t count = static_cast<std::size_t>(std::count(live.begin(), live.end(), 1));
  return std::max<std::size_t>(count, 1);
}

bool Automaton::accepts(std::span<const Letter> word) const {
  State s = initial_;
  for (Letter l : word) s = next(s, l);
  return accepting(s);
}

std::vector<Letter> encode_word(const Automaton& shape, std::span<const BigInt> values) {
  if (static_cast<int>(values.size()) != shape.arity()) {
    throw AutomatonError("expected " + std::to_string(shape.arity()) + " values, got " +
                         std::to_string(values.size()));
  }
  std::vector<DigitString> reps;
  for (const auto& v : values) reps.push_back(encode(shape.system(), v));
  auto padded = pad_parallel(reps);
  std::size_t len = padded.empty() ? 0 : padded[0].digits.size();
  std::vector<Letter> word(len);
  std::vector<int> ds(values.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < values.size(); ++j) ds[j] = padded[j].digits[i];
    word[i] = shape.letter(ds);
  }
  return word;
}

bool Automaton::accepts_values(std::span<const BigInt> values) const {
  return accepts(encode_word(*this, values));
}

std::int64_t Automaton::output_for(std::span<const BigInt> values) const {
  State s = initial_;
  for (Letter l : encode_word(*this, values)) s = next(s, l);
  return output(s);
}

// ---------------------------------------------------------------------------
// Decision procedures

DecideResult decide(const Automaton& a) {
  // breadth-first search over words without leading zero letters
  std::vector<State> parent(a.num_states(), UINT32_MAX);
  std::vector<Letter> via(a.num_states(), 0);
  std::deque<State> queue{a.initial()};
  parent[a.initial()] = a.initial();
  State found = UINT32_MAX;
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    if (a.accepting(s)) {
      found = s;
      break;
    }
    for (Letter l = 0; l < a.alphabet_size(); ++l) {
      State t = a.next(s, l);
      if (parent[t] == UINT32_MAX) {
        parent[t] = s;
        via[t] = l;
        queue.push_back(t);
      }
    }
  }
  DecideResult r;
  if (found == UINT32_MAX) return r;
  r.empty = false;
  std::vector<Letter> word;
  for (State s = found; s != a.initial(); s = parent[s]) word.push_back(via[s]);
  std::reverse(word.begin(), word.end());
  std::vector<DigitString> tracks(static_cast<std::size_t>(a.arity()));
  for (Letter l : word) {
    auto ds = a.digits(l);
    for (int j = 0; j < a.arity(); ++j) tracks[static_cast<std::size_t>(j)].digits.push_back(ds[static_cast<std::size_t>(j)]);
  }
  for (const auto& t : tracks) r.witness.push_back(decode(a.system(), t));
  return r;
}

bool is_empty(const Automaton& a) { return decide(a).empty; }

namespace {

// Live states reachable without a leading zero letter, plus whether a cycle
// exists among them.  Leading zeros are the zero loop on the initial state of
// a zero-normalized automaton.
bool has_value_cycle(const Automaton& a) {
  auto live = live_states(a);
  if (!live[a.initial()]) return false;
  // iterative three-colour DFS on live states, skipping the leading-zero loop
  std::vector<std::uint8_t> colour(a.num_states(), 0);
  struct Frame {
    State s;
    Letter next_letter;
  };
  std::vector<Frame> stack{{a.initial(), 0}};
  colour[a.initial()] = 1;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_letter == a.alphabet_size()) {
      colour[f.s] = 2;
      stack.pop_back();
      continue;
    }
    Letter l = f.next_letter++;
    if (f.s == a.initial() && l == 0) continue;
    State t = a.next(f.s, l);
    if (!live[t]) continue;
    if (colour[t] == 1) return true;
    if (colour[t] == 0) {
      colour[t] = 1;
      stack.push_back({t, 0});
    }
  }
  return false;
}

}  // namespace

bool is_finite(const Automaton& a) {
  Automaton m = minimize(a);
  if (m.next(m.initial(), 0) != m.initial()) m = normalize_zeros(m);
  return !has_value_cycle(m);
}

std::vector<std::vector<BigInt>> enumerate(const Automaton& a, long limit) {
  Automaton m = minimize(a);
  if (m.next(m.initial(), 0) != m.initial()) m = normalize_zeros(m);
  bool finite = !has_value_cycle(m);
  if (limit < 0 && !finite) throw AutomatonError("enumerate of an infinite language needs a limit");
  auto live = live_states(m);
  std::vector<std::vector<BigInt>> out;
  if (!live[m.initial()]) return out;
  const std::size_t max_len = finite ? m.num_states() + 1 : SIZE_MAX;
  // accept_in[r][s]: s reaches acceptance in exactly r steps
  std::vector<std::vector<char>> accept_in;
  accept_in.emplace_back(m.num_states(), 0);
  for (State s = 0; s < m.num_states(); ++s) accept_in[0][s] = m.accepting(s) ? 1 : 0;
  auto ensure = [&](std::size_t r) {
    while (accept_in.size() <= r) {
      const auto& prev = accept_in.back();
      std::vector<char> cur(m.num_states(), 0);
      for (State s = 0; s < m.num_states(); ++s) {
        if (!live[s]) continue;
        for (State t : m.row(s)) {
          if (prev[t]) {
            cur[s] = 1;
            break;
          }
        }
      }
      accept_in.push_back(std::move(cur));
    }
  };
  auto emit = [&](const std::vector<Letter>& word) {
    std::vector<DigitString> tracks(static_cast<std::size_t>(m.arity()));
    for (Letter l : word) {
      auto ds = m.digits(l);
      for (int j = 0; j < m.arity(); ++j) tracks[static_cast<std::size_t>(j)].digits.push_back(ds[static_cast<std::size_t>(j)]);
    }
    std::vector<BigInt> values;
    for (const auto& t : tracks) values.push_back(decode(m.system(), t));
    out.push_back(std::move(values));
  };
  if (m.accepting(m.initial())) emit({});
  std::vector<Letter> word;
  for (std::size_t len = 1; len <= max_len; ++len) {
    if (limit >= 0 && static_cast<long>(out.size()) >= limit) break;
    ensure(len);
    if (!accept_in[len][m.initial()]) {
      // no word of this length; stop once nothing can follow
      bool any = false;
      for (std::size_t r = len; r < len + m.num_states() + 1 && !any; ++r) {
        ensure(r);
        any = accept_in[r][m.initial()] != 0;
      }
      if (!any) break;
      continue;
    }
    // depth-first, lexicographic, first letter nonzero
    struct Frame {
      State s;
      Letter next_letter;
    };
    std::vector<Frame> stack{{m.initial(), 1}};
    word.clear();
    while (!stack.empty()) {
      if (limit >= 0 && static_cast<long>(out.size()) >= limit) break;
      Frame& f = stack.back();
      std::size_t depth = stack.size() - 1;
      if (f.next_letter >= m.alphabet_size()) {
        stack.pop_back();
        if (!word.empty()) word.pop_back();
        continue;
      }
      Letter l = f.next_letter++;
      State t = m.next(f.s, l);
      std::size_t remaining = len - depth - 1;
      if (!accept_in[remaining][t]) continue;
      word.push_back(l);
      if (remaining == 0) {
        emit(word);
        word.pop_back();
      } else {
        stack.push_back({t, 0});
      }
    }
  }
  return out;
}

bool equivalent(const Automaton& a, const Automaton& b) {
  if (a.arity() != b.arity()) return false;
  return is_empty(product(a, b, BoolOp::Xor));
}

bool isomorphic(const Automaton& a, const Automaton& b) {
  if (a.arity() != b.arity()) return false;
  if (a.system_ptr() != b.system_ptr() &&
      (a.system().name() != b.system().name() || !(a.system().period() == b.system().period()))) {
    return false;
  }
  return to_text(minimize(a)) == to_text(minimize(b));
}

std::uint64_t structural_hash(const Automaton& a) {
  std::string text = to_text(minimize(a));
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Automaton output_equals(const Automaton& word, std::int64_t value) {
  if (!word.has_outputs()) throw AutomatonError("not an output automaton");
  Automaton out = word;
  for (State s = 0; s < out.num_states(); ++s) {
    out.set_accepting(s, word.accepting(s) && word.output(s) == value);
  }
  out.clear_outputs();
  return minimize(out);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

// Live reachable states in canonical order, dead state (if any) excluded.
struct Listing {
  std::vector<State> order;
  std::vector<State> id;  // UINT32_MAX for omitted states
};

Listing list_states(const Automaton& a) {
  auto live = live_states(a);
  Listing l;
  l.id.assign(a.num_states(), UINT32_MAX);
  if (!live[a.initial()]) {
    l.order.push_back(a.initial());
    l.id[a.initial()] = 0;
    return l;
  }
  std::deque<State> queue{a.initial()};
  l.id[a.initial()] = 0;
  l.order.push_back(a.initial());
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    for (State t : a.row(s)) {
      if (live[t] && l.id[t] == UINT32_MAX) {
        l.id[t] = static_cast<State>(l.order.size());
        l.order.push_back(t);
        queue.push_back(t);
      }
    }
  }
  return l;
}

}  // namespace

void write_text(std::ostream& os, const Automaton& a) {
  Listing l = list_states(a);
  os << "system " << a.system().name() << " arity " << a.arity() << " dmax " << a.system().dmax() << "\n";
  os << "states " << l.order.size() << " initial 0\n";
  os << "accepting";
  for (std::size_t i = 0; i < l.order.size(); ++i) {
    if (a.accepting(l.order[i])) os << ' ' << i;
  }
  os << "\n";
  if (a.has_outputs()) {
    os << "outputs";
    for (std::size_t i = 0; i < l.order.size(); ++i) {
      if (a.accepting(l.order[i])) os << ' ' << i << ':' << a.output(l.order[i]);
    }
    os << "\n";
  }
  for (std::size_t i = 0; i < l.order.size(); ++i) {
    for (Letter c = 0; c < a.alphabet_size(); ++c) {
      State t = a.next(l.order[i], c);
      if (l.id[t] == UINT32_MAX) continue;
      os << i << ' ' << a.letter_name(c) << ' ' << l.id[t] << "\n";
    }
  }
}

std::string to_text(const Automaton& a) {
  std::ostringstream os;
  write_text(os, a);
  return os.str();
}

Automaton read_text(std::istream& is, const std::function<SystemPtr(const std::string&)>& lookup) {
  auto fail = [](const std::string& what) { throw AutomatonError("automaton text: " + what); };
  std::string line, word, name;
  int arity = 0, dmax = 0;
  State n = 0, init = 0;
  if (!std::getline(is, line)) fail("missing header");
  {
    std::istringstream ls(line);
    std::string k1, k2, k3;
    if (!(ls >> k1 >> name >> k2 >> arity >> k3 >> dmax) || k1 != "system" || k2 != "arity" || k3 != "dmax") {
      fail("bad header line: " + line);
    }
  }
  SystemPtr sys = lookup(name);
  if (!sys) fail("unknown system " + name);
  if (sys->dmax() != dmax) fail("dmax mismatch for system " + name);
  if (!std::getline(is, line)) fail("missing states line");
  {
    std::istringstream ls(line);
    std::string k1, k2;
    if (!(ls >> k1 >> n >> k2 >> init) || k1 != "states" || k2 != "initial" || n == 0 || init >= n) {
      fail("bad states line: " + line);
    }
  }
  Automaton a(sys, arity, n + 1, init);
  const State sink = n;
  for (State s = 0; s <= n; ++s) {
    for (Letter c = 0; c < a.alphabet_size(); ++c) a.set_next(s, c, sink);
  }
  if (!std::getline(is, line)) fail("missing accepting line");
  {
    std::istringstream ls(line);
    ls >> word;
    if (word != "accepting") fail("bad accepting line: " + line);
    State s;
    while (ls >> s) {
      if (s >= n) fail("accepting state out of range");
      a.set_accepting(s, true);
    }
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("outputs", 0) == 0) {
      std::istringstream ls(line.substr(7));
      std::string item;
      while (ls >> item) {
        auto colon = item.find(':');
        if (colon == std::string::npos) fail("bad output item " + item);
        a.set_output(static_cast<State>(std::stoul(item.substr(0, colon))), std::stoll(item.substr(colon + 1)));
      }
      if (!a.has_outputs()) a.set_output(sink, 0);
      continue;
    }
    std::istringstream ls(line);
    State src, dst;
    std::string letter;
    if (!(ls >> src >> letter >> dst) || src >= n || dst >= n) fail("bad transition line: " + line);
    if (letter.size() < 2 || letter.front() != '[' || letter.back() != ']') fail("bad letter " + letter);
    std::vector<int> ds;
    std::string inner = letter.substr(1, letter.size() - 2);
    std::istringstream ds_in(inner);
    std::string part;
    while (std::getline(ds_in, part, ',')) ds.push_back(std::stoi(part));
    a.set_next(src, a.letter(ds), dst);
  }
  return a;
}

Automaton from_text(const std::string& text, const std::function<SystemPtr(const std::string&)>& lookup) {
  std::istringstream is(text);
  return read_text(is, lookup);
}

void write_dot(std::ostream& os, const Automaton& a, const std::string& name) {
  Listing l = list_states(a);
  os << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=circle];\n";
  os << "  init [shape=point];\n  init -> 0;\n";
  for (std::size_t i = 0; i < l.order.size(); ++i) {
    State s = l.order[i];
    os << "  " << i << " [label=\"" << i;
    if (a.has_outputs() && a.accepting(s)) os << "/" << a.output(s);
    os << "\"";
    if (a.accepting(s)) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (std::size_t i = 0; i < l.order.size(); ++i) {
    for (Letter c = 0; c < a.alphabet_size(); ++c) {
      State t = a.next(l.order[i], c);
      if (l.id[t] == UINT32_MAX) continue;
      os << "  " << i << " -> " << l.id[t] << " [label=\"" << a.letter_name(c) << "\"];\n";
    }
  }
  os << "}\n";
}

}  // namespace obd
