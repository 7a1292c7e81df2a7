#include "obd/automaton.hpp"
#include "obd/relations.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <numeric>

namespace obd {

namespace {

void require_same_system(const Automaton& a, const Automaton& b) {
  if (a.system_ptr() == b.system_ptr()) return;
  if (a.system().name() == b.system().name() && a.system().period() == b.system().period()) return;
  throw AutomatonError("numeration system mismatch: " + a.system().name() + " vs " + b.system().name());
}

std::vector<char> sinks_of(const Automaton& a) {
  std::vector<char> out(a.num_states());
  for (State s = 0; s < a.num_states(); ++s) out[s] = a.is_sink(s) ? 1 : 0;
  return out;
}

// For every letter of `out`, the letter of `in` that reads tracks pos[j].
std::vector<Letter> letter_map(const Automaton& out, const Automaton& in, std::span<const int> pos) {
  std::vector<Letter> map(out.alphabet_size());
  std::vector<int> ds(static_cast<std::size_t>(in.arity()));
  for (Letter l = 0; l < out.alphabet_size(); ++l) {
    auto od = out.digits(l);
    for (int j = 0; j < in.arity(); ++j) ds[static_cast<std::size_t>(j)] = od[static_cast<std::size_t>(pos[static_cast<std::size_t>(j)])];
    map[l] = in.letter(ds);
  }
  return map;
}

bool dead_pair(BoolOp op, bool a_sink, bool b_sink) {
  switch (op) {
    case BoolOp::And: return a_sink || b_sink;
    case BoolOp::AndNot: return a_sink;
    case BoolOp::Or:
    case BoolOp::Xor: return a_sink && b_sink;
    case BoolOp::Iff: return false;
  }
  return false;
}

// Pair construction without canonical restriction or minimization.
Automaton product_raw(const Automaton& a, std::span<const int> a_pos, const Automaton& b,
                      std::span<const int> b_pos, int out_arity, BoolOp op) {
  require_same_system(a, b);
  if (static_cast<int>(a_pos.size()) != a.arity() || static_cast<int>(b_pos.size()) != b.arity()) {
    throw AutomatonError("track alignment does not match arity");
  }
  Automaton shape(a.system_ptr(), out_arity);
  auto map_a = letter_map(shape, a, a_pos);
  auto map_b = letter_map(shape, b, b_pos);
  auto sink_a = sinks_of(a);
  auto sink_b = sinks_of(b);
  const Letter sigma = shape.alphabet_size();
  const std::uint64_t nb = b.num_states();

  // state 0 is the dead state
  std::vector<std::pair<State, State>> pairs{{0, 0}};
  std::vector<State> delta(sigma, 0);
  std::vector<char> acc{0};
  absl::flat_hash_map<std::uint64_t, State> ids;
  auto intern = [&](State x, State y) -> State {
    if (dead_pair(op, sink_a[x], sink_b[y])) return 0;
    auto [it, inserted] = ids.try_emplace(x * nb + y, static_cast<State>(pairs.size()));
    if (inserted) {
      pairs.emplace_back(x, y);
      acc.push_back(apply(op, a.accepting(x), b.accepting(y)) ? 1 : 0);
      delta.resize(delta.size() + sigma, 0);
      check_budget(pairs.size());
    }
    return it->second;
  };
  State init = intern(a.initial(), b.initial());
  for (State s = 1; s < pairs.size(); ++s) {
    auto [x, y] = pairs[s];
    for (Letter l = 0; l < sigma; ++l) {
      State t = intern(a.next(x, map_a[l]), b.next(y, map_b[l]));
      delta[std::size_t(s) * sigma + l] = t;
    }
  }
  Automaton out(a.system_ptr(), out_arity, static_cast<State>(pairs.size()), init);
  for (State s = 0; s < pairs.size(); ++s) {
    out.set_accepting(s, acc[s] != 0);
    for (Letter l = 0; l < sigma; ++l) out.set_next(s, l, delta[std::size_t(s) * sigma + l]);
  }
  report_intermediate(pairs.size());
  return out;
}

std::vector<int> identity(int k) {
  std::vector<int> v(static_cast<std::size_t>(k));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

bool covers_all(std::span<const int> a_pos, std::span<const int> b_pos, int out_arity) {
  std::vector<char> seen(static_cast<std::size_t>(out_arity), 0);
  for (int p : a_pos) seen[static_cast<std::size_t>(p)] = 1;
  for (int p : b_pos) seen[static_cast<std::size_t>(p)] = 1;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

// Subset construction.  `step` fills one bucket of successor states per
// output letter for a given subset.
template <class Step>
Automaton determinize(const SystemPtr& sys, int arity, std::vector<State> start,
                      const std::function<bool(State)>& accepting, Step step) {
  Automaton shape(sys, arity);
  const Letter sigma = shape.alphabet_size();
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());

  absl::flat_hash_map<std::vector<State>, State> ids;
  std::vector<std::vector<State>> subsets;
  std::vector<State> delta;
  auto intern = [&](std::vector<State>&& s) -> State {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    State id = static_cast<State>(subsets.size());
    ids.emplace(s, id);
    subsets.push_back(std::move(s));
    delta.resize(delta.size() + sigma, 0);
    check_budget(subsets.size());
    return id;
  };
  intern({});  // the empty subset is the dead state
  State init = intern(std::move(start));
  std::vector<std::vector<State>> buckets(sigma);
  for (State s = 1; s < subsets.size(); ++s) {
    for (auto& b : buckets) b.clear();
    step(subsets[s], buckets);
    for (Letter l = 0; l < sigma; ++l) {
      auto& b = buckets[l];
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      delta[std::size_t(s) * sigma + l] = intern(std::vector<State>(b));
    }
    if (subsets.size() > 50'000'000) throw AutomatonError("determinization exceeded 5e7 states");
  }
  Automaton out(sys, arity, static_cast<State>(subsets.size()), init);
  for (State s = 0; s < subsets.size(); ++s) {
    bool acc = std::any_of(subsets[s].begin(), subsets[s].end(), accepting);
    out.set_accepting(s, acc);
    for (Letter l = 0; l < sigma; ++l) out.set_next(s, l, delta[std::size_t(s) * sigma + l]);
  }
  report_intermediate(subsets.size());
  return out;
}

}  // namespace

Automaton product(const Automaton& a, std::span<const int> a_pos, const Automaton& b,
                  std::span<const int> b_pos, int out_arity, BoolOp op) {
  Automaton raw = product_raw(a, a_pos, b, b_pos, out_arity, op);
  if (op == BoolOp::And && covers_all(a_pos, b_pos, out_arity)) return minimize(raw);
  Automaton m = minimize(raw);
  auto canon = canonical_recognizer(a.system_ptr(), out_arity);
  auto id = identity(out_arity);
  return minimize(product_raw(m, id, *canon, id, out_arity, BoolOp::And));
}

Automaton product(const Automaton& a, const Automaton& b, BoolOp op) {
  if (a.arity() != b.arity()) throw AutomatonError("product of automata with different arity");
  auto id = identity(a.arity());
  return product(a, id, b, id, a.arity(), op);
}

Automaton complement(const Automaton& a) {
  auto canon = canonical_recognizer(a.system_ptr(), a.arity());
  auto id = identity(a.arity());
  Automaton plain = a;
  plain.clear_outputs();
  return minimize(product_raw(*canon, id, plain, id, a.arity(), BoolOp::AndNot));
}

Automaton project(const Automaton& a, std::span<const int> tracks) {
  std::vector<char> drop(static_cast<std::size_t>(a.arity()), 0);
  for (int t : tracks) {
    if (t < 0 || t >= a.arity()) throw AutomatonError("projection track out of range");
    drop[static_cast<std::size_t>(t)] = 1;
  }
  std::vector<int> keep;
  for (int j = 0; j < a.arity(); ++j) {
    if (!drop[static_cast<std::size_t>(j)]) keep.push_back(j);
  }
  if (static_cast<int>(keep.size()) == a.arity()) return minimize(a);
  Automaton src = minimize(a);
  Automaton shape(src.system_ptr(), static_cast<int>(keep.size()));
  std::vector<Letter> dest(src.alphabet_size());
  std::vector<Letter> zero_letters;
  std::vector<int> ds(keep.size());
  for (Letter l = 0; l < src.alphabet_size(); ++l) {
    auto sd = src.digits(l);
    for (std::size_t j = 0; j < keep.size(); ++j) ds[j] = sd[static_cast<std::size_t>(keep[j])];
    dest[l] = shape.letter(ds);
    if (dest[l] == 0) zero_letters.push_back(l);
  }
  auto sink = sinks_of(src);

  // leading-zero saturation: every state reachable from the initial state
  // through letters that are zero on the kept tracks
  std::vector<State> start;
  std::vector<char> in_start(src.num_states(), 0);
  auto push = [&](State s) {
    if (!sink[s] && !in_start[s]) {
      in_start[s] = 1;
      start.push_back(s);
    }
  };
  push(src.initial());
  for (std::size_t i = 0; i < start.size(); ++i) {
    for (Letter l : zero_letters) push(src.next(start[i], l));
  }

  Automaton det = determinize(
      src.system_ptr(), static_cast<int>(keep.size()), start,
      [&](State s) { return src.accepting(s); },
      [&](const std::vector<State>& subset, std::vector<std::vector<State>>& buckets) {
        for (State s : subset) {
          const State* row = src.row(s).data();
          for (Letter l = 0; l < src.alphabet_size(); ++l) {
            State t = row[l];
            if (!sink[t]) buckets[dest[l]].push_back(t);
          }
        }
      });
  return minimize(det);
}

Automaton project(const Automaton& a, int track) {
  int t[1] = {track};
  return project(a, t);
}

Automaton permute_tracks(const Automaton& a, std::span<const int> perm) {
  if (static_cast<int>(perm.size()) != a.arity()) throw AutomatonError("permutation size mismatch");
  std::vector<int> inverse(perm.size(), -1);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    int p = perm[i];
    if (p < 0 || p >= a.arity() || inverse[static_cast<std::size_t>(p)] != -1) {
      throw AutomatonError("not a permutation");
    }
    inverse[static_cast<std::size_t>(p)] = static_cast<int>(i);
  }
  Automaton out(a.system_ptr(), a.arity(), a.num_states(), a.initial());
  // letter map: out letter -> a letter reading out track i as a track perm[i]
  std::vector<int> pos(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) pos[j] = inverse[j];
  auto map = letter_map(out, a, pos);
  for (State s = 0; s < a.num_states(); ++s) {
    out.set_accepting(s, a.accepting(s));
    if (a.has_outputs()) out.set_output(s, a.output(s));
    for (Letter l = 0; l < out.alphabet_size(); ++l) out.set_next(s, l, a.next(s, map[l]));
  }
  return minimize(out);
}

Automaton normalize_zeros(const Automaton& a) {
  Automaton src = minimize(a);
  auto sink = sinks_of(src);
  const State iota = src.num_states();  // extra state looping on the zero letter
  std::vector<State> zero_closure;
  std::vector<char> seen(src.num_states(), 0);
  auto push = [&](State s) {
    if (!sink[s] && !seen[s]) {
      seen[s] = 1;
      zero_closure.push_back(s);
    }
  };
  push(src.initial());
  for (std::size_t i = 0; i < zero_closure.size(); ++i) push(src.next(zero_closure[i], 0));
  std::vector<State> start = zero_closure;
  start.push_back(iota);
  Automaton det = determinize(
      src.system_ptr(), src.arity(), start,
      [&](State s) { return s != iota && src.accepting(s); },
      [&](const std::vector<State>& subset, std::vector<std::vector<State>>& buckets) {
        for (State s : subset) {
          if (s == iota) {
            buckets[0].push_back(iota);
            buckets[0].insert(buckets[0].end(), zero_closure.begin(), zero_closure.end());
            continue;
          }
          for (Letter l = 0; l < src.alphabet_size(); ++l) {
            State t = src.next(s, l);
            if (!sink[t]) buckets[l].push_back(t);
          }
        }
      });
  return minimize(det);
}

Automaton combine(std::span<const CombinePart> parts, std::int64_t default_value) {
  if (parts.empty()) throw AutomatonError("combine needs at least one part");
  const SystemPtr& sys = parts[0].automaton->system_ptr();
  for (const auto& p : parts) {
    if (p.automaton->arity() != 1) throw AutomatonError("combine part " + p.name + " must have one track");
    require_same_system(*parts[0].automaton, *p.automaton);
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      auto both = product(*parts[i].automaton, *parts[j].automaton, BoolOp::And);
      auto d = decide(both);
      if (!d.empty) {
        throw AutomatonError("combine parts " + parts[i].name + " and " + parts[j].name +
                             " overlap, e.g. at " + d.witness[0].str());
      }
    }
  }
  auto canon = canonical_recognizer(sys, 1);
  std::vector<const Automaton*> autos{canon.get()};
  for (const auto& p : parts) autos.push_back(p.automaton);
  const std::size_t k = autos.size();
  const Letter sigma = canon->alphabet_size();

  absl::flat_hash_map<std::vector<State>, State> ids;
  std::vector<std::vector<State>> tuples;
  auto intern = [&](std::vector<State> t) -> State {
    auto [it, inserted] = ids.try_emplace(t, static_cast<State>(tuples.size()));
    if (inserted) tuples.push_back(std::move(t));
    return it->second;
  };
  std::vector<State> init(k);
  for (std::size_t i = 0; i < k; ++i) init[i] = autos[i]->initial();
  intern(init);
  std::vector<State> delta;
  for (State s = 0; s < tuples.size(); ++s) {
    for (Letter l = 0; l < sigma; ++l) {
      std::vector<State> next(k);
      for (std::size_t i = 0; i < k; ++i) next[i] = autos[i]->next(tuples[s][i], l);
      State t = intern(std::move(next));
      delta.push_back(t);
    }
  }
  Automaton out(sys, 1, static_cast<State>(tuples.size()), 0);
  for (State s = 0; s < tuples.size(); ++s) {
    for (Letter l = 0; l < sigma; ++l) out.set_next(s, l, delta[std::size_t(s) * sigma + l]);
    bool acc = canon->accepting(tuples[s][0]);
    out.set_accepting(s, acc);
    std::int64_t v = default_value;
    if (acc) {
      for (std::size_t i = 1; i < k; ++i) {
        if (autos[i]->accepting(tuples[s][i])) v = parts[i - 1].value;
      }
    }
    out.set_output(s, acc ? v : 0);
  }
  return minimize(out);
}

}  // namespace obd
