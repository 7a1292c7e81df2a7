#pragma once

// Command interpreter for obd scripts: numeration systems, predicate
// definitions, evaluation, inspection and on-disk persistence.

#include "obd/logic.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace obd {

/// Exit codes of the command line tool.
enum class ExitCode { Ok = 0, Formula = 1, System = 2 };

/// A failed command.  `code` separates user input errors (bad syntax,
/// unknown names, malformed formulas) from system errors (files, limits).
class SessionError : public std::runtime_error {
 public:
  SessionError(const std::string& message, ExitCode code, int line = 0);
  ExitCode code() const { return code_; }
  int line() const { return line_; }

 private:
  ExitCode code_;
  int line_;
};

/// One command, split off a script.  `terminator` is ":", "::", ";" or empty
/// when the command simply ended with its line.
struct Statement {
  std::string text;
  std::string terminator;
  int line = 1;
};

/// Splits script text into statements.  '#' starts a comment outside quotes;
/// quoted formulas may span lines.
std::vector<Statement> split_statements(std::string_view script);

struct CommandResult {
  std::string command;
  std::string name;
  int line = 0;
  std::optional<bool> truth;         // eval, and def of a sentence
  std::optional<std::size_t> states;  // def, reg, combine, shift, beatty
  std::size_t largest_intermediate = 0;
  std::chrono::milliseconds elapsed{0};
};

class Session {
 public:
  /// With an empty `dir` nothing is written to disk.  An existing session
  /// directory is loaded.
  explicit Session(std::filesystem::path dir, std::ostream& out);

  const std::filesystem::path& directory() const { return dir_; }
  Environment& environment() { return env_; }
  const Environment& environment() const { return env_; }
  const std::vector<CommandResult>& results() const { return results_; }

  CommandResult execute(const Statement& st);
  CommandResult execute(std::string_view command, int line = 1);

  /// Runs every statement, stopping at the first failure; errors are printed
  /// as "<source>:<line>: error: ..." to `err`.
  ExitCode run_script(std::string_view script, const std::string& source, std::ostream& err);

  /// Replays the journal of `dir` into a fresh environment.
  static ExitCode replay(const std::filesystem::path& dir, Session& into, std::ostream& err);

  /// Predicate lookup for the inspection commands, loading nothing new.
  const Predicate& predicate(const std::string& name) const;

  void print_info(const std::string& name);
  void print_enum(const std::string& name, long count);
  std::filesystem::path export_dot(const std::string& name, std::optional<std::filesystem::path> path);

 private:
  void load();
  void persist_system(const SystemPtr& sys);
  void persist_predicate(const std::string& name, const Predicate& p);
  void write_meta();
  void journal(const Statement& st);
  void store(const std::string& name, Predicate p, CommandResult& r);

  CommandResult cmd_ost(const std::vector<std::string>& args, CommandResult r);
  CommandResult cmd_def(const std::vector<std::string>& args, CommandResult r);
  CommandResult cmd_eval(const std::vector<std::string>& args, CommandResult r);
  CommandResult cmd_reg(const std::vector<std::string>& args, CommandResult r);
  CommandResult cmd_combine(const std::vector<std::string>& args, CommandResult r);
  CommandResult cmd_shift(const std::vector<std::string>& args, CommandResult r);
  CommandResult cmd_beatty(const std::vector<std::string>& args, CommandResult r);

  std::filesystem::path dir_;
  std::ostream& out_;
  Environment env_;
  std::vector<std::string> order_;  // predicate definition order
  std::vector<std::string> system_order_;
  std::vector<CommandResult> results_;
};

}  // namespace obd
