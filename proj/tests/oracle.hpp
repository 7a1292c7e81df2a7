#pragma once

// Brute-force reference computations shared by the tests.

#include "obd/automaton.hpp"

#include <functional>
#include <vector>

namespace oracle {

inline std::vector<long long> qs(const std::vector<int>& period, int n) {
  std::vector<long long> q{1};
  long long prev = 0;
  for (int i = 1; i < n; ++i) {
    long long a = period[static_cast<std::size_t>((i - 1) % period.size())];
    long long next = a * q.back() + prev;
    prev = q.back();
    q.push_back(next);
  }
  return q;
}

inline bool canonical(const std::vector<int>& period, const std::vector<int>& msd) {
  std::size_t len = msd.size();
  auto bound = [&](std::size_t i) { return period[i % period.size()]; };
  for (std::size_t i = 0; i < len; ++i) {
    int e = msd[len - 1 - i];
    if (e > bound(i)) return false;
    if (i == 0 && e >= bound(0)) return false;
    if (i > 0 && e == bound(i) && msd[len - i] != 0) return false;
  }
  return true;
}

/// All canonical strings of exactly `len` digits (leading zeros allowed).
inline std::vector<std::vector<int>> canonical_strings(const std::vector<int>& period, std::size_t len) {
  int dmax = 0;
  for (int a : period) dmax = std::max(dmax, a);
  std::vector<std::vector<int>> out;
  std::vector<int> cur(len, 0);
  std::function<void(std::size_t)> gen = [&](std::size_t i) {
    if (i == len) {
      if (canonical(period, cur)) out.push_back(cur);
      return;
    }
    for (int d = 0; d <= dmax; ++d) {
      cur[i] = d;
      gen(i + 1);
    }
  };
  gen(0);
  return out;
}

inline long long value(const std::vector<int>& period, const std::vector<int>& msd) {
  auto q = qs(period, static_cast<int>(msd.size()) + 1);
  long long v = 0;
  for (std::size_t i = 0; i < msd.size(); ++i) v += msd[msd.size() - 1 - i] * q[i];
  return v;
}

/// Parallel word for equal-length digit strings.
inline std::vector<obd::Letter> word(const obd::Automaton& a, const std::vector<std::vector<int>>& tracks) {
  std::size_t len = tracks.empty() ? 0 : tracks[0].size();
  std::vector<obd::Letter> w(len);
  std::vector<int> ds(tracks.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < tracks.size(); ++j) ds[j] = tracks[j][i];
    w[i] = a.letter(ds);
  }
  return w;
}

/// Calls f on every tuple of `k` strings of length `len` over digits 0..dmax.
inline void all_tuples(int dmax, int k, std::size_t len,
                       const std::function<void(const std::vector<std::vector<int>>&)>& f) {
  std::vector<std::vector<int>> cur(static_cast<std::size_t>(k), std::vector<int>(len, 0));
  std::size_t total = len * static_cast<std::size_t>(k);
  std::function<void(std::size_t)> gen = [&](std::size_t i) {
    if (i == total) {
      f(cur);
      return;
    }
    for (int d = 0; d <= dmax; ++d) {
      cur[i / len][i % len] = d;
      gen(i + 1);
    }
  };
  gen(0);
}

/// Calls f on every tuple of canonical strings of length `len`.
inline void canonical_tuples(const std::vector<int>& period, int k, std::size_t len,
                             const std::function<void(const std::vector<std::vector<int>>&)>& f) {
  auto strings = canonical_strings(period, len);
  std::vector<std::vector<int>> cur(static_cast<std::size_t>(k));
  std::function<void(int)> gen = [&](int j) {
    if (j == k) {
      f(cur);
      return;
    }
    for (const auto& s : strings) {
      cur[static_cast<std::size_t>(j)] = s;
      gen(j + 1);
    }
  };
  gen(0);
}

}  // namespace oracle
