#pragma once

// Synchronized automata for homogeneous and inhomogeneous Beatty sequences.

#include "obd/automaton.hpp"
#include "obd/quadratic.hpp"

#include <cstdint>

namespace obd {

/// alpha = (a + b*gamma)/c, beta = (d + e*gamma)/c.
struct BeattySpec {
  std::int64_t a = 0, b = 0, c = 1, d = 0, e = 0;
};

QuadraticReal beatty_alpha(const NumerationSystem& sys, const BeattySpec& spec);
QuadraticReal beatty_beta(const NumerationSystem& sys, const BeattySpec& spec);

/// Throws MathError unless b >= 0, c >= 1, alpha >= 0, alpha + beta >= 0 and
/// b + e >= 0 (the index b*n + e must stay natural for n >= 1).
void check_beatty_spec(const NumerationSystem& sys, const BeattySpec& spec);

/// Pairs (n, floor(n*gamma)) for all n >= 0.
Automaton floor_gamma_sync(const SystemPtr& sys);

/// Pairs (n, floor(n*alpha + beta)) for n >= 1, and also n = 0 when
/// include_zero is set.
Automaton beatty_sync(const SystemPtr& sys, const BeattySpec& spec, bool include_zero = false);

/// Pairs (n, floor((f(b*n + e) + a*n + d) / c)) for a two-track function
/// automaton f.
Automaton affine_compose(const Automaton& f, std::int64_t b, std::int64_t e, std::int64_t a, std::int64_t d,
                         std::int64_t c);

}  // namespace obd
