#include "obd/suite.hpp"

#include "obd/logic.hpp"
#include "obd/session.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#ifndef OBD_SCRIPT_DIR
#define OBD_SCRIPT_DIR "scripts"
#endif

namespace obd {

namespace fs = std::filesystem;

namespace {

Environment beatty_env(const SystemPtr& sys, const BeattySpec& spec, bool include_zero) {
  Environment env;
  env.add_system(sys);
  env.define("s", Predicate{beatty_sync(sys, spec, include_zero), {"n", "z"}, "", false});
  return env;
}

std::string set_string(const std::vector<BigInt>& xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i].str();
  return s + "}";
}

// Sorted exceptional set from direct sums of the first `terms` values.
std::vector<BigInt> brute_force_exceptions(const NumerationSystem& sys, const BeattySpec& spec, int h, int min_index,
                                           int terms) {
  auto alpha = beatty_alpha(sys, spec);
  auto beta = beatty_beta(sys, spec);
  std::vector<long long> seq;
  for (int i = min_index; i < min_index + terms; ++i) {
    seq.push_back(static_cast<long long>(qr_floor(alpha * QuadraticReal::rational(i) + beta)));
  }
  // sums below the last term are complete since the terms are nondecreasing
  const long long bound = seq.back();
  std::vector<char> hit(static_cast<std::size_t>(bound), 0);
  std::vector<char> cur(static_cast<std::size_t>(bound), 0);
  cur[0] = 1;
  for (int k = 0; k < h; ++k) {
    std::vector<char> next(static_cast<std::size_t>(bound), 0);
    for (long long v = 0; v < bound; ++v) {
      if (!cur[static_cast<std::size_t>(v)]) continue;
      for (long long t : seq) {
        if (v + t >= bound) break;
        next[static_cast<std::size_t>(v + t)] = 1;
      }
    }
    cur = std::move(next);
  }
  hit = cur;
  std::vector<BigInt> out;
  for (long long v = 0; v < bound; ++v) {
    if (!hit[static_cast<std::size_t>(v)]) out.emplace_back(v);
  }
  return out;
}

std::optional<long long> function_value(const Automaton& a, long long n, long long search) {
  for (long long z = 0; z <= search; ++z) {
    if (a.accepts_values(std::vector<BigInt>{n, z})) return z;
  }
  return std::nullopt;
}

struct Expectation {
  std::string name;
  std::string expected;  // "TRUE", "FALSE" or "<n> states"
};

const std::map<std::string, std::vector<Expectation>>& expectations() {
  static const std::map<std::string, std::vector<Expectation>> table = {
      {"s6", {{"beattyg", "32 states"}, {"beatty", "59 states"}, {"check2", "TRUE"}}},
      {"s7", {{"test", "TRUE"}}},
      {"s8", {{"rebleconj1", "TRUE"}, {"rebleconj2", "TRUE"}, {"rebleconj3", "TRUE"}}},
      {"s9", {{"no_inter", "TRUE"}, {"check4", "TRUE"}, {"check5", "TRUE"}}},
      {"s10", {{"chk1", "TRUE"}, {"chk2", "TRUE"}, {"checkeven", "TRUE"}, {"checkodd", "TRUE"}, {"kimber", "TRUE"}}},
      {"s11", {{"beatty7", "65 states"}, {"beat7", "96 states"}, {"a276873", "6961 states"}}},
      {"s12",
       {{"dek", "TRUE"}, {"check_equality", "TRUE"}, {"check1", "TRUE"}, {"check2", "TRUE"}, {"check3", "TRUE"}}},
  };
  return table;
}

Check basis_check(const std::string& name, const SystemPtr& sys, const BeattySpec& spec, int min_index,
                  int want_order) {
  Check c{name, 0, "", "", false};
  auto report = find_min_basis_order(sys, spec, 3, min_index);
  auto brute = brute_force_exceptions(*sys, spec, want_order, min_index, 1000);
  c.expected = "order " + std::to_string(want_order) + ", exceptional " + set_string(brute);
  c.actual = "order " + std::to_string(report.order) + ", exceptional " + set_string(report.exceptional);
  c.pass = report.verdict != BasisVerdict::NotBasisAtCap && c.actual == c.expected;
  return c;
}

// Section-specific checks run against the session once its script is done.
void extra_checks(const std::string& section, Session& session, const fs::path& script_dir, SectionReport& rep) {
  const Environment& env = session.environment();
  if (section == "s6") {
    rep.checks.push_back(basis_check("basis order", env.system("msd_s13"), {2, 6, 2, 3, 3}, 1, 2));
    const auto& last = rep.checks.back();
    bool has11 = last.actual.find(" 11}") != std::string::npos || last.actual.find(" 11,") != std::string::npos;
    rep.checks.push_back({"11 not a sum of two", 0, "true", has11 ? "true" : "false", has11});
  } else if (section == "s7") {
    rep.checks.push_back(basis_check("basis order", env.system("msd_fib"), {2, 2, 2, 1, 0}, 0, 2));
  } else if (section == "s9") {
    const Automaton& diff = session.predicate("diff").automaton;
    std::set<std::int64_t> values;
    for (State s = 0; s < diff.num_states(); ++s) {
      if (diff.accepting(s)) values.insert(diff.output(s));
    }
    std::string actual = "{";
    for (auto v : values) actual += (actual.size() > 1 ? ", " : "") + std::to_string(v);
    actual += "}";
    rep.checks.push_back({"diff values", 0, "{0, 1, 2}", actual, actual == "{0, 1, 2}"});
  } else if (section == "s11") {
    for (const auto& r : session.results()) {
      if (r.name != "a276873") continue;
      bool ok = r.largest_intermediate <= 2'000'000;
      rep.checks.push_back({"a276873 largest intermediate", r.line, "<= 2000000",
                            std::to_string(r.largest_intermediate), ok});
    }
  } else if (section == "s12") {
    std::ifstream in(script_dir / "s12_table.txt");
    if (!in) throw SessionError("missing s12_table.txt", ExitCode::System);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream is(line);
      std::string name;
      if (!(is >> name)) continue;
      std::string expected, actual;
      long long v;
      long long n = 0;
      const Automaton& a = session.predicate(name).automaton;
      while (is >> v) {
        expected += (expected.empty() ? "" : " ") + std::to_string(v);
        auto got = function_value(a, n++, 200);
        actual += (actual.empty() ? "" : " ") + (got ? std::to_string(*got) : std::string("?"));
      }
      rep.checks.push_back({"table " + name, 0, expected, actual, expected == actual});
    }
  }
}

}  // namespace

bool SectionReport::passed() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

BasisReport find_min_basis_order(const SystemPtr& sys, const BeattySpec& spec, int cap, int min_index) {
  if (cap < 1) throw MathError("basis search needs cap >= 1");
  if (min_index < 0) throw MathError("negative minimum index");
  BasisReport rep;
  rep.alpha = beatty_alpha(*sys, spec);
  rep.beta = beatty_beta(*sys, spec);
  Environment env = beatty_env(sys, spec, min_index == 0);
  for (int h = 1; h <= cap; ++h) {
    std::string vars, body, sum;
    for (int k = 1; k <= h; ++k) {
      std::string i = "i" + std::to_string(k), z = "z" + std::to_string(k);
      vars += (k > 1 ? "," : "") + i + "," + z;
      body += (k > 1 ? " & " : "") + i + ">=" + std::to_string(min_index) + " & $s(" + i + "," + z + ")";
      sum += (k > 1 ? "+" : "") + z;
    }
    auto c = compile(env, "~E" + vars + " " + body + " & n=" + sum);
    if (is_empty(c.automaton)) {
      rep.order = h;
      rep.verdict = BasisVerdict::Basis;
      return rep;
    }
    if (is_finite(c.automaton)) {
      rep.order = h;
      rep.verdict = BasisVerdict::AsymptoticBasis;
      for (auto& t : enumerate(c.automaton, -1)) rep.exceptional.push_back(t[0]);
      std::sort(rep.exceptional.begin(), rep.exceptional.end());
      return rep;
    }
  }
  return rep;
}

Automaton sums_complement(const SystemPtr& sys, const BeattySpec& spec) {
  Environment env = beatty_env(sys, spec, false);
  return compile(env, "~Em,n,x,y m>=1 & n>=1 & $s(m,x) & $s(n,y) & z+x=y").automaton;
}

fs::path default_script_dir() {
  if (const char* env = std::getenv("OBD_SCRIPTS")) return env;
  return OBD_SCRIPT_DIR;
}

std::vector<std::string> reproducible_sections(bool include_slow) {
  std::vector<std::string> out;
  for (const char* s : {"s6", "s7", "s8", "s9", "s10", "s11", "s12"}) {
    if (include_slow || !is_slow_section(s)) out.emplace_back(s);
  }
  return out;
}

bool is_slow_section(const std::string& section) { return section == "s11"; }

SectionReport reproduce(const std::string& section, const ReproduceOptions& options) {
  SectionReport rep;
  rep.section = section;
  auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    rep.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return rep;
  };
  auto it = expectations().find(section);
  if (it == expectations().end()) {
    rep.error = "unknown section " + section;
    return finish();
  }
  fs::path scripts = options.script_dir.empty() ? default_script_dir() : options.script_dir;
  fs::path script = scripts / (section + ".obd");
  fs::path work = options.work_dir.empty()
                      ? fs::temp_directory_path() / ("obd-reproduce-" + std::to_string(::getpid()))
                      : options.work_dir;
  std::ostream null(nullptr);
  std::ostream& log = options.log ? *options.log : null;
  try {
    std::ifstream in(script);
    if (!in) throw SessionError("cannot read " + script.string(), ExitCode::System);
    std::stringstream text;
    text << in.rdbuf();
    fs::path dir = work / section;
    fs::remove_all(dir);
    Session session(dir, log);
    std::ostringstream err;
    if (session.run_script(text.str(), script.string(), err) != ExitCode::Ok) {
      rep.error = err.str();
      if (!rep.error.empty() && rep.error.back() == '\n') rep.error.pop_back();
    }
    for (const auto& e : it->second) {
      Check c{e.name, 0, e.expected, "not produced", false};
      for (const auto& r : session.results()) {
        if (r.name != e.name || (!r.truth && !r.states)) continue;
        c.line = r.line;
        c.actual = r.truth ? (*r.truth ? "TRUE" : "FALSE") : std::to_string(*r.states) + " states";
      }
      c.pass = c.actual == c.expected;
      rep.checks.push_back(std::move(c));
    }
    if (rep.error.empty()) extra_checks(section, session, scripts, rep);
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return finish();
}

void print_report(std::ostream& os, const SectionReport& rep) {
  os << rep.section << ": " << (rep.passed() ? "PASS" : "FAIL") << " (" << rep.elapsed.count() << " ms)\n";
  if (!rep.error.empty()) os << "  error: " << rep.error << "\n";
  for (const auto& c : rep.checks) {
    os << "  " << (c.pass ? "ok  " : "FAIL") << " " << c.name;
    if (c.line) os << " (line " << c.line << ")";
    os << ": " << c.actual;
    if (!c.pass) os << ", expected " << c.expected;
    os << "\n";
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_junit(std::ostream& os, const std::vector<SectionReport>& reports) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<testsuites>\n";
  for (const auto& r : reports) {
    std::size_t failures = 0;
    for (const auto& c : r.checks) failures += c.pass ? 0 : 1;
    std::size_t errors = r.error.empty() ? 0 : 1;
    os << "  <testsuite name=\"" << xml_escape(r.section) << "\" tests=\"" << r.checks.size() + errors
       << "\" failures=\"" << failures << "\" errors=\"" << errors << "\" time=\""
       << static_cast<double>(r.elapsed.count()) / 1000.0 << "\">\n";
    if (errors) {
      os << "    <testcase classname=\"" << xml_escape(r.section) << "\" name=\"script\">\n";
      os << "      <error message=\"" << xml_escape(r.error) << "\"/>\n    </testcase>\n";
    }
    for (const auto& c : r.checks) {
      os << "    <testcase classname=\"" << xml_escape(r.section) << "\" name=\"" << xml_escape(c.name) << "\"";
      if (c.pass) {
        os << "/>\n";
      } else {
        os << ">\n      <failure message=\"expected " << xml_escape(c.expected) << ", got " << xml_escape(c.actual)
           << (c.line ? " at line " + std::to_string(c.line) : "") << "\"/>\n    </testcase>\n";
      }
    }
    os << "  </testsuite>\n";
  }
  os << "</testsuites>\n";
}

}  // namespace obd
