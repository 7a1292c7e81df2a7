#pragma once

// Deterministic automata over k-track Ostrowski digit alphabets.
//
// Every automaton is total: letters that lead nowhere go to a rejecting sink.
// Words are read most significant digit first and all public operations keep
// languages closed under prepending the all-zero letter.

#include "obd/numeration.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace obd {

class AutomatonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BoolOp { And, Or, AndNot, Xor, Iff };

bool apply(BoolOp op, bool x, bool y);

using State = std::uint32_t;
using Letter = std::uint32_t;

class Automaton {
 public:
  /// An automaton with `num_states` states, all transitions pointing to
  /// state 0 and nothing accepting.
  Automaton(SystemPtr system, int arity, State num_states = 1, State initial = 0);

  const NumerationSystem& system() const { return *system_; }
  const SystemPtr& system_ptr() const { return system_; }
  int arity() const { return arity_; }
  int base() const { return base_; }
  Letter alphabet_size() const { return alphabet_; }
  State num_states() const { return num_states_; }
  State initial() const { return initial_; }

  State next(State s, Letter l) const { return delta_[std::size_t(s) * alphabet_ + l]; }
  bool accepting(State s) const { return accepting_[s] != 0; }
  bool has_outputs() const { return !outputs_.empty(); }
  std::int64_t output(State s) const { return outputs_.empty() ? 0 : outputs_[s]; }

  void set_initial(State s) { initial_ = s; }
  void set_next(State s, Letter l, State t) { delta_[std::size_t(s) * alphabet_ + l] = t; }
  void set_accepting(State s, bool v) { accepting_[s] = v ? 1 : 0; }
  void set_output(State s, std::int64_t v);
  void clear_outputs() { outputs_.clear(); }
  State add_state();

  /// Digits of a letter, track 0 first.
  std::vector<int> digits(Letter l) const;
  Letter letter(std::span<const int> digits) const;
  std::string letter_name(Letter l) const;

  /// Non-accepting state whose every transition is a self loop.
  bool is_sink(State s) const;
  /// Number of reachable states that can still reach an accepting state,
  /// never less than one.  This is the figure reported to users.
  std::size_t state_count() const;

  std::span<const State> row(State s) const {
    return {delta_.data() + std::size_t(s) * alphabet_, alphabet_};
  }

  bool accepts(std::span<const Letter> word) const;
  /// Runs the automaton on the padded parallel encodings of `values`.
  bool accepts_values(std::span<const BigInt> values) const;
  /// Output after reading the encoding of `values` (output automata).
  std::int64_t output_for(std::span<const BigInt> values) const;

 private:
  SystemPtr system_;
  int arity_;
  int base_;
  Letter alphabet_;
  State num_states_;
  State initial_;
  std::vector<State> delta_;
  std::vector<std::uint8_t> accepting_;
  std::vector<std::int64_t> outputs_;
};

/// Letters of the padded parallel encoding of a value tuple.
std::vector<Letter> encode_word(const Automaton& shape, std::span<const BigInt> values);

/// Minimal automaton with a canonical breadth-first state numbering.
Automaton minimize(const Automaton& a);

/// Boolean combination.  Track j of `a` becomes output track a_pos[j] (same
/// for `b`); the result has `out_arity` tracks, is restricted to canonical
/// representations and is minimal.
Automaton product(const Automaton& a, std::span<const int> a_pos, const Automaton& b,
                  std::span<const int> b_pos, int out_arity, BoolOp op);
Automaton product(const Automaton& a, const Automaton& b, BoolOp op);

/// Complement relative to canonical representations.
Automaton complement(const Automaton& a);

/// Existential projection of the listed tracks, with leading-zero saturation.
Automaton project(const Automaton& a, std::span<const int> tracks);
Automaton project(const Automaton& a, int track);

/// New track i is old track perm[i]; perm must be a permutation.
Automaton permute_tracks(const Automaton& a, std::span<const int> perm);

/// Closes the language under adding and removing leading zero letters.
Automaton normalize_zeros(const Automaton& a);

struct DecideResult {
  bool empty = true;
  std::vector<BigInt> witness;  // values of a shortest accepted word
};
DecideResult decide(const Automaton& a);
bool is_empty(const Automaton& a);
/// True iff finitely many value tuples are accepted.
bool is_finite(const Automaton& a);
/// Accepted value tuples in length-then-lexicographic order of their
/// representations.  `limit` < 0 means all; that requires a finite language.
std::vector<std::vector<BigInt>> enumerate(const Automaton& a, long limit);

/// Language equality.
bool equivalent(const Automaton& a, const Automaton& b);
/// Equality of minimal canonical forms (state-renaming invariant).
bool isomorphic(const Automaton& a, const Automaton& b);
std::uint64_t structural_hash(const Automaton& a);

struct CombinePart {
  const Automaton* automaton;
  std::int64_t value;
  std::string name;
};
/// Output automaton over one track: each canonical input gets the value of
/// the unique part accepting it, else `default_value`.
Automaton combine(std::span<const CombinePart> parts, std::int64_t default_value);

/// Automaton over one track accepting inputs whose output equals `value`.
Automaton output_equals(const Automaton& word, std::int64_t value);

void write_text(std::ostream& os, const Automaton& a);
std::string to_text(const Automaton& a);
Automaton read_text(std::istream& is, const std::function<SystemPtr(const std::string&)>& lookup);
Automaton from_text(const std::string& text, const std::function<SystemPtr(const std::string&)>& lookup);
void write_dot(std::ostream& os, const Automaton& a, const std::string& name);

/// Statistics hook: called with the state count of every intermediate
/// automaton produced by product, projection and determinization.
void set_intermediate_observer(std::function<void(std::size_t)> observer);
const std::function<void(std::size_t)>& intermediate_observer();
void report_intermediate(std::size_t states);

/// Thrown when a construction outgrows the active StateBudget.
class BudgetExceeded : public AutomatonError {
 public:
  using AutomatonError::AutomatonError;
};

/// Caps the state count of constructions on this thread while alive.
/// Budgets nest; the innermost one applies.
class StateBudget {
 public:
  explicit StateBudget(std::size_t limit);
  ~StateBudget();
  StateBudget(const StateBudget&) = delete;
  StateBudget& operator=(const StateBudget&) = delete;

 private:
  std::size_t saved_;
};

/// Throws BudgetExceeded when `states` is over the active budget.
void check_budget(std::size_t states);

}  // namespace obd
