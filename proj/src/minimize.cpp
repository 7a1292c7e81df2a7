// Partition-refinement minimization (Valmari-Lehtinen), run on the partial
// automaton obtained by dropping transitions into trivial sinks.

#include "obd/automaton.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace obd {

namespace {

struct Partition {
  int z = 0;
  std::vector<int> elems, loc, set_of, first, past;

  void init(int n) {
    z = n > 0 ? 1 : 0;
    elems.resize(n);
    loc.resize(n);
    set_of.assign(n, 0);
    first.assign(std::max(n, 1), 0);
    past.assign(std::max(n, 1), 0);
    std::iota(elems.begin(), elems.end(), 0);
    std::iota(loc.begin(), loc.end(), 0);
    if (n > 0) past[0] = n;
  }
};

class Minimizer {
 public:
  Minimizer(int states, std::vector<int> tails, std::vector<int> labels, std::vector<int> heads)
      : nn_(states), mm_(static_cast<int>(tails.size())), tail_(std::move(tails)),
        label_(std::move(labels)), head_(std::move(heads)) {}

  // keys: initial block key per state, -1 for non-accepting.
  void run(int initial, const std::vector<std::int64_t>& keys, const std::vector<char>& accepting) {
    blocks_.init(nn_);
    marked_.assign(static_cast<std::size_t>(std::max(nn_, mm_)) + 1, 0);
    adj_.resize(static_cast<std::size_t>(mm_));
    off_.resize(static_cast<std::size_t>(nn_) + 1);

    reach(initial);
    remove_unreachable(tail_, head_);
    int reached_initial = blocks_.past[0];
    for (int q = 0; q < nn_; ++q) {
      if (accepting[static_cast<std::size_t>(q)] && blocks_.loc[q] < reached_initial) reach(q);
    }
    final_count_ = rr_;
    remove_unreachable(head_, tail_);
    initial_alive_ = blocks_.loc[initial] < blocks_.past[0];
    live_.assign(static_cast<std::size_t>(nn_), 0);
    for (int i = 0; i < blocks_.past[0]; ++i) live_[static_cast<std::size_t>(blocks_.elems[i])] = 1;

    // initial partition: live states split by acceptance, then by key
    if (final_count_ > 0) {
      marked_[0] = final_count_;
      work_.push_back(0);
      split(blocks_);
      // refine the accepting block by output key
      std::map<std::int64_t, std::vector<int>> groups;
      for (int i = 0; i < final_count_; ++i) {
        int q = blocks_.elems[i];
        groups[keys[static_cast<std::size_t>(q)]].push_back(q);
      }
      if (groups.size() > 1) {
        auto it = groups.begin();
        for (++it; it != groups.end(); ++it) {
          for (int q : it->second) mark(blocks_, q);
          split(blocks_);
        }
      }
    }

    // transition partition by label
    cords_.init(mm_);
    if (mm_ > 0) {
      std::sort(cords_.elems.begin(), cords_.elems.end(),
                [&](int i, int j) { return label_[i] < label_[j]; });
      cords_.z = 0;
      marked_[0] = 0;
      int a = label_[cords_.elems[0]];
      for (int i = 0; i < mm_; ++i) {
        int t = cords_.elems[i];
        if (label_[t] != a) {
          a = label_[t];
          cords_.past[cords_.z++] = i;
          cords_.first[cords_.z] = i;
          marked_[cords_.z] = 0;
        }
        cords_.set_of[t] = cords_.z;
        cords_.loc[t] = i;
      }
      cords_.past[cords_.z++] = mm_;
    }

    make_adjacent(head_);
    int b = 1, c = 0;
    while (c < cords_.z) {
      for (int i = cords_.first[c]; i < cords_.past[c]; ++i) mark(blocks_, tail_[cords_.elems[i]]);
      split(blocks_);
      ++c;
      while (b < blocks_.z) {
        for (int i = blocks_.first[b]; i < blocks_.past[b]; ++i) {
          for (int j = off_[blocks_.elems[i]]; j < off_[blocks_.elems[i] + 1]; ++j) mark(cords_, adj_[j]);
        }
        split(cords_);
        ++b;
      }
    }
  }

  bool initial_alive() const { return initial_alive_; }
  int block_count() const { return blocks_.z; }
  int block_of(int q) const { return blocks_.set_of[q]; }
  bool live(int q) const { return live_[static_cast<std::size_t>(q)] != 0; }
  int transitions() const { return mm_; }
  int tail(int t) const { return tail_[t]; }
  int head(int t) const { return head_[t]; }
  int label(int t) const { return label_[t]; }

 private:
  void mark(Partition& p, int e) {
    int s = p.set_of[e], i = p.loc[e], j = p.first[s] + marked_[s];
    p.elems[i] = p.elems[j];
    p.loc[p.elems[i]] = i;
    p.elems[j] = e;
    p.loc[e] = j;
    if (!marked_[s]++) work_.push_back(s);
  }

  void split(Partition& p) {
    while (!work_.empty()) {
      int s = work_.back();
      work_.pop_back();
      int j = p.first[s] + marked_[s];
      if (j == p.past[s]) {
        marked_[s] = 0;
        continue;
      }
      if (marked_[s] <= p.past[s] - j) {
        p.first[p.z] = p.first[s];
        p.past[p.z] = p.first[s] = j;
      } else {
        p.past[p.z] = p.past[s];
        p.first[p.z] = p.past[s] = j;
      }
      for (int i = p.first[p.z]; i < p.past[p.z]; ++i) p.set_of[p.elems[i]] = p.z;
      marked_[s] = marked_[p.z++] = 0;
    }
  }

  void make_adjacent(const std::vector<int>& key) {
    std::fill(off_.begin(), off_.end(), 0);
    for (int t = 0; t < mm_; ++t) ++off_[key[t]];
    for (int q = 0; q < nn_; ++q) off_[q + 1] += off_[q];
    for (int t = mm_; t--;) adj_[--off_[key[t]]] = t;
  }

  void reach(int q) {
    int i = blocks_.loc[q];
    if (i >= rr_) {
      blocks_.elems[i] = blocks_.elems[rr_];
      blocks_.loc[blocks_.elems[i]] = i;
      blocks_.elems[rr_] = q;
      blocks_.loc[q] = rr_++;
    }
  }

  void remove_unreachable(std::vector<int>& from, std::vector<int>& to) {
    make_adjacent(from);
    for (int i = 0; i < rr_; ++i) {
      for (int j = off_[blocks_.elems[i]]; j < off_[blocks_.elems[i] + 1]; ++j) reach(to[adj_[j]]);
    }
    int j = 0;
    for (int t = 0; t < mm_; ++t) {
      if (blocks_.loc[from[t]] < rr_) {
        head_[j] = head_[t];
        label_[j] = label_[t];
        tail_[j] = tail_[t];
        ++j;
      }
    }
    mm_ = j;
    blocks_.past[0] = rr_;
    rr_ = 0;
  }

  int nn_, mm_;
  std::vector<int> tail_, label_, head_;
  Partition blocks_, cords_;
  std::vector<int> marked_, work_;
  std::vector<char> live_;
  std::vector<int> adj_, off_;
  int rr_ = 0;
  int final_count_ = 0;
  bool initial_alive_ = false;
};

}  // namespace

Automaton minimize(const Automaton& a) {
  const State n = a.num_states();
  const Letter sigma = a.alphabet_size();
  std::vector<char> sink(n);
  for (State s = 0; s < n; ++s) sink[s] = a.is_sink(s) ? 1 : 0;

  std::vector<int> tails, labels, heads;
  for (State s = 0; s < n; ++s) {
    if (sink[s]) continue;
    for (Letter c = 0; c < sigma; ++c) {
      State t = a.next(s, c);
      if (sink[t]) continue;
      tails.push_back(static_cast<int>(s));
      labels.push_back(static_cast<int>(c));
      heads.push_back(static_cast<int>(t));
    }
  }
  std::vector<std::int64_t> keys(n, -1);
  std::vector<char> acc(n);
  for (State s = 0; s < n; ++s) {
    acc[s] = a.accepting(s) ? 1 : 0;
    if (acc[s]) keys[s] = a.output(s);
  }

  Minimizer m(static_cast<int>(n), std::move(tails), std::move(labels), std::move(heads));
  m.run(static_cast<int>(a.initial()), keys, acc);

  if (!m.initial_alive()) {
    Automaton empty(a.system_ptr(), a.arity(), 1, 0);
    if (a.has_outputs()) empty.set_output(0, 0);
    return empty;
  }

  // blocks 0..z-1 are the live classes; add a sink at index z
  const int z = m.block_count();
  const State sink_id = static_cast<State>(z);
  Automaton raw(a.system_ptr(), a.arity(), static_cast<State>(z + 1), static_cast<State>(m.block_of(static_cast<int>(a.initial()))));
  for (State s = 0; s <= sink_id; ++s) {
    for (Letter c = 0; c < sigma; ++c) raw.set_next(s, c, sink_id);
  }
  for (int t = 0; t < m.transitions(); ++t) {
    int b = m.block_of(m.tail(t));
    raw.set_next(static_cast<State>(b), static_cast<Letter>(m.label(t)), static_cast<State>(m.block_of(m.head(t))));
  }
  for (State s = 0; s < n; ++s) {
    if (!m.live(static_cast<int>(s)) || !acc[s]) continue;
    State b = static_cast<State>(m.block_of(static_cast<int>(s)));
    raw.set_accepting(b, true);
    if (a.has_outputs()) raw.set_output(b, a.output(s));
  }
  if (a.has_outputs()) raw.set_output(sink_id, 0);

  // canonical breadth-first renumbering, sink last
  std::vector<State> id(raw.num_states(), UINT32_MAX);
  std::vector<State> order;
  std::deque<State> queue{raw.initial()};
  id[raw.initial()] = 0;
  order.push_back(raw.initial());
  while (!queue.empty()) {
    State s = queue.front();
    queue.pop_front();
    for (Letter c = 0; c < sigma; ++c) {
      State t = raw.next(s, c);
      if (t == sink_id || id[t] != UINT32_MAX) continue;
      id[t] = static_cast<State>(order.size());
      order.push_back(t);
      queue.push_back(t);
    }
  }
  const State live_count = static_cast<State>(order.size());
  bool need_sink = false;
  for (State s : order) {
    for (State t : raw.row(s)) {
      if (t == sink_id) need_sink = true;
    }
  }
  const State total = live_count + (need_sink ? 1 : 0);
  Automaton out(a.system_ptr(), a.arity(), total, 0);
  const State out_sink = need_sink ? live_count : 0;
  for (State i = 0; i < live_count; ++i) {
    State s = order[i];
    for (Letter c = 0; c < sigma; ++c) {
      State t = raw.next(s, c);
      out.set_next(i, c, t == sink_id ? out_sink : id[t]);
    }
    out.set_accepting(i, raw.accepting(s));
    if (a.has_outputs()) out.set_output(i, raw.output(s));
  }
  if (need_sink) {
    for (Letter c = 0; c < sigma; ++c) out.set_next(out_sink, c, out_sink);
    if (a.has_outputs()) out.set_output(out_sink, 0);
  }
  return out;
}

}  // namespace obd
