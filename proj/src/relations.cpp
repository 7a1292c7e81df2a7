#include "obd/relations.hpp"

#include <absl/container/flat_hash_map.h>
#include <absl/hash/hash.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace obd {

namespace {

constexpr std::size_t kStateCap = 20'000'000;

std::vector<int> identity(int k) {
  std::vector<int> v(static_cast<std::size_t>(k));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Necessary condition for a rolling-basis pair (s, t) at a consumed position
// p = phase (mod m) to still reach a residual in [lo, hi]: for some such p,
// s*q_p + t*q_{p-1} + R hits [lo, hi] with R in [-cneg(q_p-1), cpos(q_p-1)].
class Liveness {
 public:
  Liveness(const NumerationSystem& sys, std::int64_t cpos, std::int64_t cneg, std::int64_t lo,
           std::int64_t hi)
      : m_(sys.period_length()), cpos_(cpos), cneg_(cneg), lo_(lo), hi_(hi), small_(m_), rho_(m_) {
    const BigInt limit = BigInt(1) << 50;
    for (int p = 0;; ++p) {
      BigInt q = sys.q(p);
      if (q >= limit) {
        if (p >= 2 * m_) break;
      } else {
        small_[static_cast<std::size_t>(p % m_)].emplace_back(static_cast<std::int64_t>(q),
                                                               static_cast<std::int64_t>(sys.q(p - 1)));
      }
    }
    for (int r = 0; r < m_; ++r) {
      // q_{p-1}/q_p = [0; a_p, ..., a_1]; iterate far along the class of r
      int p = r + m_ * 40;
      long double x = 0;
      for (int j = 1; j <= p; ++j) x = 1.0L / (sys.period().partial_quotient(j) + x);
      rho_[static_cast<std::size_t>(r)] = x;
    }
  }

  bool operator()(int phase, std::int64_t s, std::int64_t t) {
    auto key = std::make_tuple(phase, s, t);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    bool v = compute(phase, s, t);
    cache_.emplace(key, v);
    return v;
  }

 private:
  bool compute(int phase, std::int64_t s, std::int64_t t) const {
    using I = __int128;
    for (auto [q, q1] : small_[static_cast<std::size_t>(phase)]) {
      I base = I(s) * q + I(t) * q1;
      I top = base + I(cpos_) * (q - 1);
      I bottom = base - I(cneg_) * (q - 1);
      if (top >= lo_ && bottom <= hi_) return true;
    }
    long double x = s + t * rho_[static_cast<std::size_t>(phase)];
    long double eps = 1e-9L * (std::fabs(static_cast<long double>(t)) + std::fabs(static_cast<long double>(s)) + 1);
    return x <= cneg_ + eps && x >= -cpos_ - eps;
  }

  int m_;
  std::int64_t cpos_, cneg_, lo_, hi_;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> small_;
  std::vector<long double> rho_;
  absl::flat_hash_map<std::tuple<int, std::int64_t, std::int64_t>, bool> cache_;
};

// Phase-hypothesis construction shared by the canonical recognizer and the
// linear relations.  A state holds, for each phase r of the next position to
// be read, either nothing (refuted) or the saturation flags of the previous
// digit and the rolling imbalance (s, t).
Automaton hypothesis_automaton(const SystemPtr& sys, std::span<const std::int64_t> coeffs,
                               std::int64_t lo, std::int64_t hi) {
  const int k = static_cast<int>(coeffs.size());
  const int m = sys->period_length();
  const auto& period = sys->period().period();
  Automaton shape(sys, k);
  const Letter sigma = shape.alphabet_size();
  std::int64_t cpos = 0, cneg = 0;
  bool trivial = true;
  for (auto c : coeffs) {
    if (c > 0) cpos += c;
    if (c < 0) cneg -= c;
    if (c != 0) trivial = false;
  }
  Liveness live(*sys, cpos, cneg, lo, hi);

  std::vector<std::vector<int>> letter_digits(sigma);
  std::vector<std::int64_t> letter_sum(sigma, 0);
  for (Letter l = 0; l < sigma; ++l) {
    letter_digits[l] = shape.digits(l);
    for (int j = 0; j < k; ++j) letter_sum[l] += coeffs[static_cast<std::size_t>(j)] * letter_digits[l][static_cast<std::size_t>(j)];
  }

  using Key = std::vector<std::int64_t>;  // 3 entries per phase: flags (-1 = none), s, t
  absl::flat_hash_map<Key, State> ids;
  std::vector<Key> states;
  std::vector<State> delta;
  auto intern = [&](Key&& key) -> State {
    bool any = false;
    for (int r = 0; r < m; ++r) any |= key[static_cast<std::size_t>(3 * r)] >= 0;
    if (!any) return 0;
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    State id = static_cast<State>(states.size());
    ids.emplace(key, id);
    states.push_back(std::move(key));
    delta.resize(delta.size() + sigma, 0);
    if (states.size() > kStateCap) throw AutomatonError("linear relation exceeded the state cap");
    check_budget(states.size());
    return id;
  };
  states.emplace_back(static_cast<std::size_t>(3 * m), -1);  // dead state
  delta.resize(sigma, 0);
  Key start(static_cast<std::size_t>(3 * m), 0);
  State init = intern(std::move(start));

  for (State id = 1; id < states.size(); ++id) {
    for (Letter l = 0; l < sigma; ++l) {
      const Key& cur = states[id];
      Key nxt(static_cast<std::size_t>(3 * m), -1);
      const auto& ds = letter_digits[l];
      for (int r = 0; r < m; ++r) {
        std::int64_t flags = cur[static_cast<std::size_t>(3 * r)];
        if (flags < 0) continue;
        const int bound = period[static_cast<std::size_t>(r)];
        std::int64_t nf = 0;
        bool ok = true;
        for (int j = 0; j < k && ok; ++j) {
          int d = ds[static_cast<std::size_t>(j)];
          if (d > bound || ((flags >> j) & 1 && d != 0)) ok = false;
          if (d == bound) nf |= std::int64_t(1) << j;
        }
        if (!ok) continue;
        std::int64_t s = cur[static_cast<std::size_t>(3 * r + 1)];
        std::int64_t t = cur[static_cast<std::size_t>(3 * r + 2)];
        std::int64_t ns = trivial ? 0 : s * bound + t + letter_sum[l];
        std::int64_t nt = trivial ? 0 : s;
        if (!trivial && !live(r, ns, nt)) continue;
        int nr = (r + m - 1) % m;
        nxt[static_cast<std::size_t>(3 * nr)] = nf;
        nxt[static_cast<std::size_t>(3 * nr + 1)] = ns;
        nxt[static_cast<std::size_t>(3 * nr + 2)] = nt;
      }
      State to = intern(std::move(nxt));
      delta[std::size_t(id) * sigma + l] = to;
    }
  }

  Automaton out(sys, k, static_cast<State>(states.size()), init);
  for (State id = 0; id < states.size(); ++id) {
    const Key& key = states[id];
    const std::size_t r = static_cast<std::size_t>(m - 1);
    bool acc = key[3 * r] == 0 && key[3 * r + 1] >= lo && key[3 * r + 1] <= hi;
    out.set_accepting(id, acc);
    for (Letter l = 0; l < sigma; ++l) out.set_next(id, l, delta[std::size_t(id) * sigma + l]);
  }
  report_intermediate(states.size());
  return minimize(out);
}

Automaton restrict_canonical(const Automaton& a) {
  auto canon = canonical_recognizer(a.system_ptr(), a.arity());
  auto id = identity(a.arity());
  return product(a, id, *canon, id, a.arity(), BoolOp::And);
}

}  // namespace

std::shared_ptr<const Automaton> canonical_recognizer(const SystemPtr& sys, int arity) {
  if (arity < 0) throw AutomatonError("negative arity");
  static std::mutex mutex;
  static std::map<std::pair<const NumerationSystem*, int>,
                  std::pair<std::weak_ptr<const NumerationSystem>, std::shared_ptr<const Automaton>>>
      cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find({sys.get(), arity});
    if (it != cache.end() && !it->second.first.expired() && it->second.first.lock() == sys) {
      return it->second.second;
    }
  }
  std::vector<std::int64_t> zeros(static_cast<std::size_t>(arity), 0);
  auto built = std::make_shared<const Automaton>(hypothesis_automaton(sys, zeros, 0, 0));
  std::lock_guard lock(mutex);
  cache[{sys.get(), arity}] = {sys, built};
  return built;
}

Automaton linear_relation(const SystemPtr& sys, const LinearRelationSpec& spec) {
  if (spec.coeffs.empty()) throw AutomatonError("linear relation needs at least one track");
  return hypothesis_automaton(sys, spec.coeffs, spec.constant, spec.constant);
}

Automaton linear_range_relation(const SystemPtr& sys, std::span<const std::int64_t> coeffs,
                                std::int64_t lo, std::int64_t hi) {
  if (coeffs.empty()) throw AutomatonError("linear relation needs at least one track");
  if (lo > hi) return Automaton(sys, static_cast<int>(coeffs.size()));
  return hypothesis_automaton(sys, coeffs, lo, hi);
}

Automaton order_relation(const SystemPtr& sys, Order order) {
  // 0 equal so far, 1 less, 2 greater, 3 dead
  Automaton a(sys, 2, 4, 0);
  for (Letter l = 0; l < a.alphabet_size(); ++l) {
    auto d = a.digits(l);
    a.set_next(0, l, d[0] < d[1] ? 1 : d[0] > d[1] ? 2 : 0);
    a.set_next(1, l, 1);
    a.set_next(2, l, 2);
    a.set_next(3, l, 3);
  }
  a.set_accepting(0, order != Order::Lt);
  a.set_accepting(1, order != Order::Eq);
  return restrict_canonical(a);
}

Automaton shift_relation(const SystemPtr& sys) {
  const int m = sys->period_length();
  Automaton shape(sys, 2);
  const int base = shape.base();
  // state = m buffered digits f_1..f_m, f_1 most significant in the code
  std::size_t count = 1;
  for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(base);
  if (count + 1 > kStateCap) throw AutomatonError("shift relation too large");
  const State dead = static_cast<State>(count);
  Automaton a(sys, 2, dead + 1, 0);
  const std::size_t high = count / static_cast<std::size_t>(base);
  for (std::size_t s = 0; s < count; ++s) {
    const int f1 = static_cast<int>(s / high);
    for (Letter l = 0; l < a.alphabet_size(); ++l) {
      auto d = a.digits(l);
      State t = dead;
      if (d[0] == f1) t = static_cast<State>((s % high) * static_cast<std::size_t>(base) + static_cast<std::size_t>(d[1]));
      a.set_next(static_cast<State>(s), l, t);
    }
  }
  for (Letter l = 0; l < a.alphabet_size(); ++l) a.set_next(dead, l, dead);
  a.set_accepting(0, true);
  return restrict_canonical(a);
}

}  // namespace obd
