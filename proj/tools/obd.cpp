// obd: command line front end.

#include "obd/session.hpp"
#include "obd/suite.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using obd::ExitCode;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const obd::SessionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::System);
  }
}

int run_script(const fs::path& script, const fs::path& dir) {
  std::ifstream in(script);
  if (!in) {
    std::cerr << "error: cannot read " << script.string() << "\n";
    return code(ExitCode::System);
  }
  std::stringstream text;
  text << in.rdbuf();
  obd::Session session(dir, std::cout);
  return code(session.run_script(text.str(), script.string(), std::cerr));
}

int repl(const fs::path& dir) {
  obd::Session session(dir, std::cout);
  const bool tty = ::isatty(STDIN_FILENO);
  std::string pending, line;
  int line_no = 0, start = 1;
  ExitCode last = ExitCode::Ok;
  if (tty) std::cout << "obd> " << std::flush;
  while (std::getline(std::cin, line)) {
    ++line_no;
    if (pending.empty()) start = line_no;
    pending += line + "\n";
    std::size_t quotes = 0;
    for (char c : pending) quotes += c == '"';
    if (quotes % 2 == 1) {
      if (tty) std::cout << "...> " << std::flush;
      continue;
    }
    try {
      for (auto st : obd::split_statements(pending)) {
        st.line += start - 1;
        session.execute(st);
      }
      last = ExitCode::Ok;
    } catch (const obd::SessionError& e) {
      std::cerr << "line " << e.line() + start - 1 << ": error: " << e.what() << "\n";
      last = e.code();
    }
    pending.clear();
    if (tty) std::cout << "obd> " << std::flush;
  }
  return code(last);
}

obd::Session& open_existing(const fs::path& dir, std::unique_ptr<obd::Session>& holder) {
  if (!fs::exists(dir / "predicates.meta")) {
    throw obd::SessionError("no session in " + dir.string(), ExitCode::System);
  }
  holder = std::make_unique<obd::Session>(dir, std::cout);
  return *holder;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision procedure for Beatty sequences in Ostrowski numeration"};
  app.require_subcommand(1);
  std::string session_dir = "obd_session";

  auto* run = app.add_subcommand("run", "Execute a script");
  std::string script;
  run->add_option("script", script, "Script file")->required();
  run->add_option("-s,--session", session_dir, "Session directory")->capture_default_str();

  auto* rep = app.add_subcommand("repl", "Interactive prompt over a session directory");
  rep->add_option("session", session_dir, "Session directory")->capture_default_str();

  auto* info = app.add_subcommand("info", "Describe a stored predicate");
  std::string name;
  info->add_option("name", name)->required();
  info->add_option("-s,--session", session_dir, "Session directory")->capture_default_str();

  auto* en = app.add_subcommand("enum", "List the first accepted tuples of a predicate");
  long count = 10;
  en->add_option("name", name)->required();
  en->add_option("count", count)->required()->check(CLI::NonNegativeNumber);
  en->add_option("-s,--session", session_dir, "Session directory")->capture_default_str();

  auto* dot = app.add_subcommand("export-dot", "Write a predicate as a Graphviz graph");
  std::string out_file;
  dot->add_option("name", name)->required();
  dot->add_option("-o,--output", out_file, "Output file (default <session>/<name>.dot)");
  dot->add_option("-s,--session", session_dir, "Session directory")->capture_default_str();

  auto* repro = app.add_subcommand("reproduce", "Run reproduction scripts and check their outcomes");
  std::string section;
  bool slow = false, verbose = false;
  std::string junit, work, scripts;
  repro->add_option("section", section, "Section name (s6 ... s12) or all")->required();
  repro->add_flag("--slow", slow, "Include slow sections in 'all'");
  repro->add_option("--junit", junit, "Write a JUnit XML report");
  repro->add_option("--work", work, "Directory for the section sessions");
  repro->add_option("--scripts", scripts, "Script directory");
  repro->add_flag("-v,--verbose", verbose, "Echo session output");

  CLI11_PARSE(app, argc, argv);

  if (*run) return guarded([&] { return run_script(script, session_dir); });
  if (*rep) return guarded([&] { return repl(session_dir); });
  if (*info) {
    return guarded([&] {
      std::unique_ptr<obd::Session> s;
      open_existing(session_dir, s).print_info(name);
      return 0;
    });
  }
  if (*en) {
    return guarded([&] {
      std::unique_ptr<obd::Session> s;
      open_existing(session_dir, s).print_enum(name, count);
      return 0;
    });
  }
  if (*dot) {
    return guarded([&] {
      std::unique_ptr<obd::Session> s;
      auto& session = open_existing(session_dir, s);
      auto p = session.export_dot(name, out_file.empty() ? std::nullopt : std::optional<fs::path>(out_file));
      std::cout << "wrote " << p.string() << "\n";
      return 0;
    });
  }
  if (*repro) {
    return guarded([&] {
      std::vector<std::string> sections;
      if (section == "all") {
        sections = obd::reproducible_sections(slow);
      } else {
        sections.push_back(section);
      }
      obd::ReproduceOptions opts;
      opts.script_dir = scripts;
      opts.work_dir = work;
      if (verbose) opts.log = &std::cout;
      std::vector<obd::SectionReport> reports;
      bool ok = true;
      for (const auto& s : sections) {
        reports.push_back(obd::reproduce(s, opts));
        obd::print_report(std::cout, reports.back());
        ok = ok && reports.back().passed();
      }
      if (!junit.empty()) {
        std::ofstream os(junit);
        obd::write_junit(os, reports);
        if (!os) throw obd::SessionError("cannot write " + junit, ExitCode::System);
      }
      return ok ? 0 : 1;
    });
  }
  return 0;
}
