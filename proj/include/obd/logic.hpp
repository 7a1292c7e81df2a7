#pragma once

// First-order formula language over Ostrowski-represented naturals and its
// compilation to synchronized automata.

#include "obd/automaton.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace obd {

/// Syntax or semantic error in a formula.  line/column are 1-based and refer
/// to the formula text; 0 when not tied to a position.
class FormulaError : public std::runtime_error {
 public:
  FormulaError(const std::string& message, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& bare_message() const { return bare_; }

 private:
  std::string bare_;
  int line_;
  int column_;
};

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Term {
  enum class Kind { Var, Const, Add, Sub, Mul, Div };
  Kind kind = Kind::Const;
  std::string name;         // Var
  std::int64_t value = 0;   // Const, Mul factor, Div divisor
  std::vector<Term> kids;   // Add/Sub: 2, Mul/Div: 1
  SourcePos pos;
};

enum class CmpOp { Eq, Neq, Lt, Leq, Gt, Geq };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Compare, Pred, Index, IndexEq, Not, And, Or, Implies, Iff, Exists, Forall };
  Kind kind = Kind::Compare;
  CmpOp op = CmpOp::Eq;           // Compare; Index/IndexEq use Eq or Neq
  std::vector<Term> terms;        // Compare: 2, Pred: args, Index: 1, IndexEq: 2
  std::string name;               // Pred, Index, IndexEq (first word)
  std::string name2;              // IndexEq second word
  std::int64_t value = 0;         // Index: compared output value
  std::vector<std::string> vars;  // Exists/Forall
  std::vector<FormulaPtr> kids;   // connectives and quantifier body
  SourcePos pos;
};

struct ParsedFormula {
  std::optional<std::string> system;  // from a leading ?msd_<name>
  FormulaPtr root;
};

ParsedFormula parse_formula(std::string_view text);
std::set<std::string> free_variables(const Formula& f);
/// Fully parenthesized rendering, parseable again.
std::string format_formula(const Formula& f);

/// A stored relation; track j holds variable vars[j].  Word predicates are
/// one-track output automata usable with W[t] = @v.
struct Predicate {
  Automaton automaton;
  std::vector<std::string> vars;
  std::string formula;
  bool is_word = false;
};

class Environment {
 public:
  /// Registers under sys->name(), which is expected to be msd_<name>.
  void add_system(SystemPtr sys);
  bool has_system(const std::string& name) const { return systems_.count(name) != 0; }
  const SystemPtr& system(const std::string& name) const;
  /// The most recently added system, or null.
  const SystemPtr& default_system() const { return default_; }
  const std::map<std::string, SystemPtr>& systems() const { return systems_; }

  void define(const std::string& name, Predicate p);
  bool has(const std::string& name) const { return predicates_.count(name) != 0; }
  const Predicate& predicate(const std::string& name) const;
  const std::map<std::string, std::shared_ptr<const Predicate>>& predicates() const { return predicates_; }

 private:
  std::map<std::string, SystemPtr> systems_;
  SystemPtr default_;
  std::map<std::string, std::shared_ptr<const Predicate>> predicates_;
};

struct CompiledFormula {
  Automaton automaton;
  std::vector<std::string> vars;  // sorted; track order
};

/// Compiles a parsed formula.  The system is the formula's ?msd_ annotation,
/// else `fallback`, else the environment's default system.
CompiledFormula compile(const Environment& env, const ParsedFormula& f, SystemPtr fallback = nullptr);
CompiledFormula compile(const Environment& env, std::string_view text, SystemPtr fallback = nullptr);

/// Truth value of a sentence; errors when free variables remain.
bool eval_sentence(const Environment& env, std::string_view text);

/// Compiles and stores `name`; returns the stored predicate.
const Predicate& def_predicate(Environment& env, const std::string& name, std::string_view text);

}  // namespace obd
