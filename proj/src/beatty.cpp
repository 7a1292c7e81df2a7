#include "obd/beatty.hpp"

#include "obd/logic.hpp"
#include "obd/relations.hpp"

#include <sstream>

namespace obd {

namespace {

// "k*x" with the sign folded into the joining operator
void add_term(std::ostringstream& os, std::int64_t k, const std::string& x) {
  if (k == 0) return;
  os << (k < 0 ? "-" : "+") << (k < 0 ? -k : k);
  if (!x.empty()) os << "*" << x;
}

std::int64_t small(const BigInt& v, const char* what) {
  if (v > INT64_MAX / 4) throw MathError(std::string(what) + " too large");
  return static_cast<std::int64_t>(v);
}

Environment scratch(const SystemPtr& sys) {
  Environment env;
  env.add_system(sys);
  return env;
}

}  // namespace

QuadraticReal beatty_alpha(const NumerationSystem& sys, const BeattySpec& s) {
  if (s.c < 1) throw MathError("beatty spec needs c >= 1");
  return (QuadraticReal::rational(s.a) + QuadraticReal::rational(s.b) * sys.gamma()) *
         QuadraticReal::rational(1, s.c);
}

QuadraticReal beatty_beta(const NumerationSystem& sys, const BeattySpec& s) {
  if (s.c < 1) throw MathError("beatty spec needs c >= 1");
  return (QuadraticReal::rational(s.d) + QuadraticReal::rational(s.e) * sys.gamma()) *
         QuadraticReal::rational(1, s.c);
}

void check_beatty_spec(const NumerationSystem& sys, const BeattySpec& s) {
  if (s.b < 0) throw MathError("beatty spec needs b >= 0");
  if (s.c < 1) throw MathError("beatty spec needs c >= 1");
  auto alpha = beatty_alpha(sys, s);
  auto beta = beatty_beta(sys, s);
  if (alpha.sign() < 0) throw MathError("alpha = " + alpha.to_string() + " is negative");
  if ((alpha + beta).sign() < 0) throw MathError("alpha + beta = " + (alpha + beta).to_string() + " is negative");
  if (s.b + s.e < 0) throw MathError("unsupported: b + e < 0 makes the gamma index negative");
}

Automaton floor_gamma_sync(const SystemPtr& sys) {
  const int m = sys->period_length();
  std::int64_t qm = small(sys->q(m), "q_m");
  std::int64_t qm1 = small(sys->q(m - 1), "q_{m-1}");
  Environment env = scratch(sys);
  env.define("shift", Predicate{shift_relation(sys), {"u", "v"}, "", false});
  std::ostringstream f;
  f << "(n=0 & z=0) | (Eu,v n=u+1 & $shift(u,v) & v=" << qm1 << "*z+" << qm << "*u)";
  auto c = compile(env, f.str());
  return c.automaton;
}

Automaton affine_compose(const Automaton& fn, std::int64_t b, std::int64_t e, std::int64_t a, std::int64_t d,
                         std::int64_t c) {
  if (c < 1) throw MathError("affine_compose needs c >= 1");
  if (fn.arity() != 2) throw AutomatonError("affine_compose needs a two-track function automaton");
  Environment env = scratch(fn.system_ptr());
  env.define("f", Predicate{fn, {"n", "z"}, "", false});
  std::ostringstream arg;
  arg << "0";
  add_term(arg, b, "n");
  add_term(arg, e, "");
  std::ostringstream num;
  num << "u";
  add_term(num, a, "n");
  add_term(num, d, "");
  std::string f = "Eu $f(" + arg.str() + ",u) & z=(" + num.str() + ")/" + std::to_string(c);
  return compile(env, f).automaton;
}

Automaton beatty_sync(const SystemPtr& sys, const BeattySpec& s, bool include_zero) {
  check_beatty_spec(*sys, s);
  Environment env = scratch(sys);
  env.define("g", Predicate{floor_gamma_sync(sys), {"n", "z"}, "", false});
  std::ostringstream arg, num;
  arg << "0";
  add_term(arg, s.b, "n");
  add_term(arg, s.e, "");
  num << "u";
  add_term(num, s.a, "n");
  add_term(num, s.d, "");
  std::string f = "(n>=1 & Eu $g(" + arg.str() + ",u) & z=(" + num.str() + ")/" + std::to_string(s.c) + ")";
  if (include_zero) {
    BigInt z0 = qr_floor(beatty_beta(*sys, s));
    if (z0 < 0) throw MathError("floor(beta) is negative, the n = 0 term is not natural");
    f += " | (n=0 & z=" + z0.str() + ")";
  }
  return compile(env, f).automaton;
}

}  // namespace obd
