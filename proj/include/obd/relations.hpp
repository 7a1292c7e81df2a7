#pragma once

// Synchronized relations built directly from the numeration system.

#include "obd/automaton.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace obd {

/// Accepts exactly the k-tuples of zero-padded canonical representations.
/// Results are cached per (system, arity).
std::shared_ptr<const Automaton> canonical_recognizer(const SystemPtr& sys, int arity);

/// {(n_1..n_k) : sum_j coeffs[j] * n_j = constant}.
struct LinearRelationSpec {
  std::vector<std::int64_t> coeffs;
  std::int64_t constant = 0;
};

/// Linear relation; tracks in the order of spec.coeffs.
Automaton linear_relation(const SystemPtr& sys, const LinearRelationSpec& spec);

/// {(n_1..n_k) : lo <= sum_j coeffs[j] * n_j <= hi}.  Used for floor division.
Automaton linear_range_relation(const SystemPtr& sys, std::span<const std::int64_t> coeffs,
                                std::int64_t lo, std::int64_t hi);

enum class Order { Eq, Lt, Leq };

/// Two-track comparison of values by msd-first comparison of the padded
/// canonical strings.
Automaton order_relation(const SystemPtr& sys, Order order);

/// Pairs (u, v) with v's representation equal to u's followed by m zeros,
/// m the period length.
Automaton shift_relation(const SystemPtr& sys);

}  // namespace obd
