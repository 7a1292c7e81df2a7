#include "obd/session.hpp"

#include "obd/beatty.hpp"
#include "obd/regex.hpp"
#include "obd/relations.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace obd {

namespace fs = std::filesystem;
using nlohmann::json;

SessionError::SessionError(const std::string& message, ExitCode code, int line)
    : std::runtime_error(message), code_(code), line_(line) {}

namespace {

[[noreturn]] void usage(const std::string& msg) { throw SessionError(msg, ExitCode::Formula); }

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

// Words, "quoted", {braced} and [bracketed] groups; groups keep delimiters.
std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    char close = c == '"' ? '"' : c == '{' ? '}' : c == '[' ? ']' : 0;
    if (close) {
      std::size_t j = text.find(close, i + 1);
      if (j == std::string::npos) usage(std::string("unterminated ") + c);
      out.push_back(text.substr(i, j - i + 1));
      i = j + 1;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '"' &&
           text[j] != '{' && text[j] != '[') {
      ++j;
    }
    out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_quoted(const std::string& t) { return t.size() >= 2 && t.front() == '"'; }
bool is_braced(const std::string& t) { return !t.empty() && t.front() == '{'; }
bool is_bracketed(const std::string& t) { return !t.empty() && t.front() == '['; }
std::string inner(const std::string& t) { return t.substr(1, t.size() - 2); }

std::vector<long long> numbers(const std::string& body) {
  std::vector<long long> out;
  std::string s = body;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(s);
  std::string w;
  while (is >> w) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != w.size()) usage("not an integer: " + w);
    out.push_back(v);
  }
  return out;
}

std::int64_t integer(const std::string& w) {
  auto v = numbers(w);
  if (v.size() != 1 || w.find(',') != std::string::npos) usage("not an integer: " + w);
  return v[0];
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
  return s;
}

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw SessionError("cannot read " + p.string(), ExitCode::System);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Tracks the largest intermediate automaton while alive.
class IntermediateScope {
 public:
  IntermediateScope() {
    set_intermediate_observer([this](std::size_t n) { largest = std::max(largest, n); });
  }
  ~IntermediateScope() { set_intermediate_observer(nullptr); }
  std::size_t largest = 0;
};

std::vector<std::string> track_names(int k) {
  std::vector<std::string> v;
  for (int i = 1; i <= k; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

}  // namespace

std::vector<Statement> split_statements(std::string_view s) {
  std::vector<Statement> out;
  std::string buf;
  int line = 1, start = 1;
  bool in_quote = false;
  int quote_line = 0;
  auto emit = [&](std::string term) {
    auto b = buf.find_first_not_of(" \t\r\n");
    if (b != std::string::npos) {
      auto e = buf.find_last_not_of(" \t\r\n");
      out.push_back({buf.substr(b, e - b + 1), std::move(term), start});
    } else if (!term.empty()) {
      throw SessionError("empty command", ExitCode::Formula, line);
    }
    buf.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (buf.find_first_not_of(" \t\r\n") == std::string::npos) start = line;
    if (in_quote) {
      buf += c;
      if (c == '\n') ++line;
      if (c == '"') in_quote = false;
      continue;
    }
    if (c == '#') {
      while (i + 1 < s.size() && s[i + 1] != '\n') ++i;
      continue;
    }
    if (c == '"') {
      in_quote = true;
      quote_line = line;
      buf += c;
    } else if (c == ':') {
      if (i + 1 < s.size() && s[i + 1] == ':') {
        ++i;
        emit("::");
      } else {
        emit(":");
      }
    } else if (c == ';') {
      emit(";");
    } else if (c == '\n') {
      emit("");
      ++line;
    } else {
      buf += c;
    }
  }
  if (in_quote) throw SessionError("unterminated quote", ExitCode::Formula, quote_line);
  emit("");
  return out;
}

Session::Session(fs::path dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {
  if (dir_.empty()) return;
  try {
    fs::create_directories(dir_);
  } catch (const fs::filesystem_error& e) {
    throw SessionError(e.what(), ExitCode::System);
  }
  load();
}

void Session::load() {
  fs::path sysmeta = dir_ / "systems.meta";
  if (fs::exists(sysmeta)) {
    std::istringstream in(read_file(sysmeta));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      auto sys = std::make_shared<NumerationSystem>(j.at("name").get<std::string>(),
                                                    PeriodicCF(j.at("period").get<std::vector<int>>()));
      env_.add_system(sys);
      system_order_.push_back(sys->name());
    }
  }
  fs::path meta = dir_ / "predicates.meta";
  if (!fs::exists(meta)) return;
  auto lookup = [this](const std::string& name) { return env_.system(name); };
  std::istringstream in(read_file(meta));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::string name = j.at("name");
    Predicate p{from_text(read_file(dir_ / (name + ".aut")), lookup), j.at("vars").get<std::vector<std::string>>(),
                j.at("formula").get<std::string>(), j.at("word").get<bool>()};
    env_.define(name, std::move(p));
    order_.push_back(name);
  }
}

void Session::persist_system(const SystemPtr& sys) {
  if (std::find(system_order_.begin(), system_order_.end(), sys->name()) == system_order_.end()) {
    system_order_.push_back(sys->name());
  }
  if (dir_.empty()) return;
  std::ofstream os(dir_ / "systems.meta", std::ios::trunc);
  for (const auto& n : system_order_) {
    const auto& s = env_.system(n);
    os << json{{"name", n}, {"period", s->period().period()}}.dump() << "\n";
  }
  if (!os) throw SessionError("cannot write systems.meta", ExitCode::System);
}

void Session::persist_predicate(const std::string& name, const Predicate& p) {
  if (std::find(order_.begin(), order_.end(), name) == order_.end()) order_.push_back(name);
  if (dir_.empty()) return;
  std::ofstream os(dir_ / (name + ".aut"), std::ios::trunc);
  write_text(os, p.automaton);
  if (!os) throw SessionError("cannot write " + name + ".aut", ExitCode::System);
  write_meta();
}

void Session::write_meta() {
  fs::path meta = dir_ / "predicates.meta";
  std::map<std::string, std::string> stamps;
  if (fs::exists(meta)) {
    std::istringstream in(read_file(meta));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      stamps[j.at("name")] = j.value("timestamp", "");
    }
  }
  std::ofstream os(meta, std::ios::trunc);
  for (const auto& n : order_) {
    const Predicate& p = env_.predicate(n);
    std::string stamp = stamps.count(n) && stamps[n] != "" && n != order_.back() ? stamps[n] : timestamp();
    os << json{{"name", n},
               {"system", p.automaton.system().name()},
               {"vars", p.vars},
               {"word", p.is_word},
               {"states", p.automaton.state_count()},
               {"formula", p.formula},
               {"timestamp", stamp}}
              .dump()
       << "\n";
  }
  if (!os) throw SessionError("cannot write predicates.meta", ExitCode::System);
}

void Session::journal(const Statement& st) {
  if (dir_.empty()) return;
  std::ofstream os(dir_ / "journal.obd", std::ios::app);
  os << st.text << (st.terminator.empty() ? ":" : st.terminator) << "\n";
  if (!os) throw SessionError("cannot write journal.obd", ExitCode::System);
}

void Session::store(const std::string& name, Predicate p, CommandResult& r) {
  r.states = p.automaton.state_count();
  env_.define(name, std::move(p));
  persist_predicate(name, env_.predicate(name));
}

const Predicate& Session::predicate(const std::string& name) const {
  if (!env_.has(name)) usage("unknown predicate " + name);
  return env_.predicate(name);
}

CommandResult Session::execute(std::string_view command, int line) {
  return execute(Statement{std::string(command), ":", line});
}

CommandResult Session::execute(const Statement& st) {
  CommandResult r;
  r.line = st.line;
  auto start = std::chrono::steady_clock::now();
  IntermediateScope scope;
  try {
    auto args = tokenize(st.text);
    if (args.empty()) usage("empty command");
    r.command = args[0];
    args.erase(args.begin());
    if (!args.empty() && !is_quoted(args[0])) r.name = args[0];
    const std::string& c = r.command;
    bool journaled = true;
    if (c == "ost") {
      r = cmd_ost(args, r);
    } else if (c == "def") {
      r = cmd_def(args, r);
    } else if (c == "eval") {
      r = cmd_eval(args, r);
    } else if (c == "reg") {
      r = cmd_reg(args, r);
    } else if (c == "combine") {
      r = cmd_combine(args, r);
    } else if (c == "shift") {
      r = cmd_shift(args, r);
    } else if (c == "beatty") {
      r = cmd_beatty(args, r);
    } else if (c == "info") {
      if (args.size() != 1) usage("usage: info <name>");
      print_info(args[0]);
      journaled = false;
    } else if (c == "enum") {
      if (args.size() != 2) usage("usage: enum <name> <count>");
      print_enum(args[0], static_cast<long>(integer(args[1])));
      journaled = false;
    } else if (c == "export-dot") {
      if (args.empty() || args.size() > 2) usage("usage: export-dot <name> [file]");
      auto p = export_dot(args[0], args.size() == 2 ? std::optional<fs::path>(args[1]) : std::nullopt);
      out_ << "wrote " << p.string() << "\n";
      journaled = false;
    } else {
      usage("unknown command " + c);
    }
    r.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    r.largest_intermediate = scope.largest;
    if (st.terminator == "::") {
      out_ << "# largest intermediate automaton has " << r.largest_intermediate << " states\n";
      out_ << "# time is " << r.elapsed.count() << " ms\n";
    }
    if (journaled) journal(st);
  } catch (const SessionError& e) {
    throw SessionError(e.what(), e.code(), e.line() ? e.line() : st.line);
  } catch (const FormulaError& e) {
    throw SessionError(e.what(), ExitCode::Formula, st.line + (e.line() > 1 ? e.line() - 1 : 0));
  } catch (const RegexError& e) {
    throw SessionError(e.what(), ExitCode::Formula, st.line);
  } catch (const MathError& e) {
    throw SessionError(e.what(), ExitCode::Formula, st.line);
  } catch (const json::exception& e) {
    throw SessionError(std::string("corrupt session metadata: ") + e.what(), ExitCode::System, st.line);
  } catch (const std::bad_alloc&) {
    throw SessionError("out of memory", ExitCode::System, st.line);
  } catch (const std::exception& e) {
    throw SessionError(e.what(), ExitCode::System, st.line);
  }
  results_.push_back(r);
  return r;
}

CommandResult Session::cmd_ost(const std::vector<std::string>& args, CommandResult r) {
  if (args.size() != 3 || !is_bracketed(args[1]) || !is_bracketed(args[2])) {
    usage("usage: ost <name> [0] [period]");
  }
  if (!is_identifier(args[0])) usage("bad system name " + args[0]);
  auto pre = numbers(inner(args[1]));
  if (pre != std::vector<long long>{0}) usage("unsupported: initial part must be [0]");
  std::vector<int> period;
  for (long long v : numbers(inner(args[2]))) {
    if (v < 1 || v > 1'000'000) usage("period entries must be positive");
    period.push_back(static_cast<int>(v));
  }
  if (period.empty()) usage("empty period");
  auto sys = std::make_shared<NumerationSystem>("msd_" + args[0], PeriodicCF(period));
  env_.add_system(sys);
  persist_system(sys);
  out_ << sys->name() << ": gamma = " << sys->gamma().to_string() << ", q =";
  for (int i = 0; i < 8; ++i) out_ << (i ? ", " : " ") << sys->q(i).str();
  out_ << ", ...\n";
  return r;
}

CommandResult Session::cmd_def(const std::vector<std::string>& args, CommandResult r) {
  if (args.size() < 2 || !is_identifier(args[0])) usage("usage: def <name> \"formula\"");
  if (args.size() > 2 || !is_quoted(args[1])) return cmd_reg(args, r);
  std::string text = inner(args[1]);
  auto c = compile(env_, text);
  Predicate p{c.automaton, c.vars, text, false};
  if (c.vars.empty()) {
    r.truth = !is_empty(c.automaton);
    out_ << args[0] << ": " << (*r.truth ? "TRUE" : "FALSE") << "\n";
    store(args[0], std::move(p), r);
  } else {
    store(args[0], std::move(p), r);
    out_ << args[0] << ": " << *r.states << " states\n";
  }
  return r;
}

CommandResult Session::cmd_eval(const std::vector<std::string>& args, CommandResult r) {
  if (args.size() != 2 || !is_quoted(args[1])) usage("usage: eval <name> \"sentence\"");
  auto c = compile(env_, inner(args[1]));
  if (!c.vars.empty()) {
    throw FormulaError("eval needs a sentence; free variables: " + join(c.vars, ", "));
  }
  r.truth = !is_empty(c.automaton);
  out_ << args[0] << ": " << (*r.truth ? "TRUE" : "FALSE") << "\n";
  return r;
}

CommandResult Session::cmd_reg(const std::vector<std::string>& args, CommandResult r) {
  if (args.size() < 2 || !is_identifier(args[0]) || !is_quoted(args.back())) {
    usage("usage: reg <name> [msd_<system>] {digits}... \"regex\"");
  }
  std::size_t i = 1;
  SystemPtr sys = env_.default_system();
  if (!is_quoted(args[i]) && !is_braced(args[i])) {
    std::string sname = args[i][0] == '?' ? args[i].substr(1) : args[i];
    if (!env_.has_system(sname)) usage("unknown numeration system " + sname);
    sys = env_.system(sname);
    ++i;
  }
  if (!sys) usage("no numeration system defined");
  std::vector<std::vector<int>> alphabets;
  for (; i + 1 < args.size(); ++i) {
    if (!is_braced(args[i])) usage("expected a digit alphabet {..} but found " + args[i]);
    std::vector<int> digits;
    for (long long v : numbers(inner(args[i]))) digits.push_back(static_cast<int>(v));
    alphabets.push_back(std::move(digits));
  }
  if (alphabets.empty()) usage("regex definitions need at least one digit alphabet");
  const int k = static_cast<int>(alphabets.size());
  std::string pattern = inner(args.back());
  auto a = regex_compile(sys, k, pattern, alphabets);
  std::string source;
  for (std::size_t j = 1; j < args.size(); ++j) source += (j > 1 ? " " : "") + args[j];
  store(args[0], Predicate{a, track_names(k), source, false}, r);
  out_ << args[0] << ": " << *r.states << " states\n";
  return r;
}

CommandResult Session::cmd_combine(const std::vector<std::string>& args, CommandResult r) {
  if (args.size() < 2 || !is_identifier(args[0])) usage("usage: combine <name> <pred>[=<value>]...");
  std::vector<CombinePart> parts;
  std::vector<Predicate> held;
  held.reserve(args.size());
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string pname = args[i];
    std::int64_t value = static_cast<std::int64_t>(i);
    auto eq = pname.find('=');
    if (eq != std::string::npos) {
      value = integer(pname.substr(eq + 1));
      pname = pname.substr(0, eq);
    }
    const Predicate& p = predicate(pname);
    if (p.automaton.arity() != 1) usage("combine needs one-variable predicates; " + pname + " has " +
                                        std::to_string(p.automaton.arity()));
    if (!parts.empty() && p.automaton.system_ptr() != parts.front().automaton->system_ptr()) {
      usage("combine parts use different numeration systems");
    }
    held.push_back(p);
    parts.push_back({&held.back().automaton, value, pname});
  }
  auto w = combine(parts, 0);
  std::string source;
  for (std::size_t j = 1; j < args.size(); ++j) source += (j > 1 ? " " : "") + args[j];
  store(args[0], Predicate{w, {"n"}, source, true}, r);
  out_ << args[0] << ": " << *r.states << " states\n";
  return r;
}

namespace {

SystemPtr pick_system(const Environment& env, const std::vector<std::string>& args, std::size_t& i) {
  if (i < args.size()) {
    std::string s = args[i][0] == '?' ? args[i].substr(1) : args[i];
    if (s.rfind("msd_", 0) == 0) {
      if (!env.has_system(s)) usage("unknown numeration system " + s);
      ++i;
      return env.system(s);
    }
  }
  if (!env.default_system()) usage("no numeration system defined");
  return env.default_system();
}

}  // namespace

CommandResult Session::cmd_shift(const std::vector<std::string>& args, CommandResult r) {
  if (args.empty() || args.size() > 2 || !is_identifier(args[0])) usage("usage: shift <name> [msd_<system>]");
  std::size_t i = 1;
  SystemPtr sys = pick_system(env_, args, i);
  if (i != args.size()) usage("usage: shift <name> [msd_<system>]");
  store(args[0], Predicate{shift_relation(sys), {"u", "v"}, "shift " + sys->name(), false}, r);
  out_ << args[0] << ": " << *r.states << " states\n";
  return r;
}

CommandResult Session::cmd_beatty(const std::vector<std::string>& args, CommandResult r) {
  const char* use = "usage: beatty <name> [msd_<system>] <a> <b> <c> <d> <e> [zero]";
  if (args.empty() || !is_identifier(args[0])) usage(use);
  std::size_t i = 1;
  SystemPtr sys = pick_system(env_, args, i);
  bool zero = !args.empty() && args.back() == "zero";
  std::size_t end = args.size() - (zero ? 1 : 0);
  if (end - i != 5) usage(use);
  BeattySpec spec{integer(args[i]), integer(args[i + 1]), integer(args[i + 2]), integer(args[i + 3]),
                  integer(args[i + 4])};
  auto a = beatty_sync(sys, spec, zero);
  std::string source;
  for (std::size_t j = 1; j < args.size(); ++j) source += (j > 1 ? " " : "") + args[j];
  store(args[0], Predicate{a, {"n", "z"}, "beatty " + source, false}, r);
  out_ << args[0] << ": " << *r.states << " states\n";
  return r;
}

void Session::print_info(const std::string& name) {
  const Predicate& p = predicate(name);
  out_ << name << ": " << p.automaton.state_count() << " states, system " << p.automaton.system().name();
  out_ << ", " << p.automaton.arity() << " tracks";
  if (!p.vars.empty()) out_ << " (" << join(p.vars, ", ") << ")";
  if (p.is_word) out_ << ", word";
  out_ << "\n  " << p.formula << "\n";
}

void Session::print_enum(const std::string& name, long count) {
  const Predicate& p = predicate(name);
  if (count < 0) usage("negative count");
  if (p.automaton.arity() == 0) {
    out_ << (is_empty(p.automaton) ? "FALSE" : "TRUE") << "\n";
    return;
  }
  for (const auto& t : enumerate(p.automaton, count)) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      out_ << (j ? " " : "") << (j < p.vars.size() ? p.vars[j] : "x" + std::to_string(j + 1)) << "=" << t[j].str();
    }
    if (p.is_word) out_ << " -> " << p.automaton.output_for(t);
    out_ << "\n";
  }
}

fs::path Session::export_dot(const std::string& name, std::optional<fs::path> path) {
  const Predicate& p = predicate(name);
  fs::path target = path ? *path : (dir_.empty() ? fs::path(name + ".dot") : dir_ / (name + ".dot"));
  std::ofstream os(target, std::ios::trunc);
  write_dot(os, p.automaton, name);
  if (!os) throw SessionError("cannot write " + target.string(), ExitCode::System);
  return target;
}

ExitCode Session::run_script(std::string_view script, const std::string& source, std::ostream& err) {
  try {
    for (const auto& st : split_statements(script)) execute(st);
  } catch (const SessionError& e) {
    err << source << ":" << e.line() << ": error: " << e.what() << "\n";
    return e.code();
  }
  return ExitCode::Ok;
}

ExitCode Session::replay(const fs::path& dir, Session& into, std::ostream& err) {
  fs::path j = dir / "journal.obd";
  if (!fs::exists(j)) {
    err << j.string() << ": no journal\n";
    return ExitCode::System;
  }
  return into.run_script(read_file(j), j.string(), err);
}

}  // namespace obd
