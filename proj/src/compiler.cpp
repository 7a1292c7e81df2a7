#include "obd/logic.hpp"
#include "obd/relations.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

namespace obd {

void Environment::add_system(SystemPtr sys) {
  systems_[sys->name()] = sys;
  default_ = std::move(sys);
}

const SystemPtr& Environment::system(const std::string& name) const {
  auto it = systems_.find(name);
  if (it == systems_.end()) throw FormulaError("unknown numeration system '" + name + "'");
  return it->second;
}

void Environment::define(const std::string& name, Predicate p) {
  predicates_[name] = std::make_shared<const Predicate>(std::move(p));
}

const Predicate& Environment::predicate(const std::string& name) const {
  auto it = predicates_.find(name);
  if (it == predicates_.end()) throw FormulaError("unknown predicate '" + name + "'");
  return *it->second;
}

namespace {

constexpr std::size_t kTrialFloor = 50000;
constexpr std::size_t kTrialFactor = 4;

// A relation whose track j holds variable vars[j] (any order, no repeats).
struct Rel {
  Automaton a;
  std::vector<std::string> vars;
};

struct Lin {
  std::map<std::string, std::int64_t> coeffs;
  std::int64_t constant = 0;

  void add(const Lin& o, std::int64_t scale) {
    for (auto& [v, c] : o.coeffs) {
      coeffs[v] += c * scale;
      if (coeffs[v] == 0) coeffs.erase(v);
    }
    constant += o.constant * scale;
  }
};

// Conjunction of relations under existential quantification of qvars.
struct Conj {
  std::vector<Rel> items;
  std::vector<std::string> qvars;
};

[[noreturn]] void fail_at(const std::string& msg, SourcePos pos) { throw FormulaError(msg, pos.line, pos.column); }

class Compiler {
 public:
  Compiler(const Environment& env, SystemPtr sys) : env_(env), sys_(std::move(sys)) {}

  Rel compile(const Formula& f) {
    Conj c;
    flatten(f, true, c);
    return eliminate(std::move(c));
  }

  const SystemPtr& system() const { return sys_; }

 private:
  std::string fresh() { return "#" + std::to_string(++fresh_); }

  Rel constant_rel(bool value) {
    Automaton a(sys_, 0);
    a.set_accepting(0, value);
    return {std::move(a), {}};
  }

  // ---- Boolean plumbing ---------------------------------------------------

  Rel combine(const Rel& x, const Rel& y, BoolOp op) {
    std::vector<std::string> vars = x.vars;
    for (const auto& v : y.vars) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    std::sort(vars.begin(), vars.end());
    auto pos = [&](const std::vector<std::string>& vs) {
      std::vector<int> p;
      for (const auto& v : vs) p.push_back(static_cast<int>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
      return p;
    };
    auto xp = pos(x.vars), yp = pos(y.vars);
    return {product(x.a, xp, y.a, yp, static_cast<int>(vars.size()), op), vars};
  }

  Rel negate(const Rel& x) { return {complement(x.a), x.vars}; }

  Rel project_out(const Rel& x, const std::vector<std::string>& drop) {
    std::vector<int> tracks;
    std::vector<std::string> keep;
    for (std::size_t j = 0; j < x.vars.size(); ++j) {
      if (std::find(drop.begin(), drop.end(), x.vars[j]) != drop.end()) {
        tracks.push_back(static_cast<int>(j));
      } else {
        keep.push_back(x.vars[j]);
      }
    }
    if (tracks.empty()) return x;
    return {project(x.a, tracks), keep};
  }

  static bool mentions(const Rel& r, const std::string& v) {
    return std::find(r.vars.begin(), r.vars.end(), v) != r.vars.end();
  }

  Rel conjoin_all(std::vector<Rel> items) {
    if (items.empty()) return constant_rel(true);
    // smallest automata first
    std::stable_sort(items.begin(), items.end(), [](const Rel& x, const Rel& y) {
      return x.a.num_states() < y.a.num_states();
    });
    Rel acc = std::move(items[0]);
    for (std::size_t i = 1; i < items.size(); ++i) {
      if (is_empty(acc.a)) break;
      acc = combine(acc, items[i], BoolOp::And);
    }
    return acc;
  }

  // Variable elimination.  Candidates are ordered by how many variables
  // their conjuncts mention; each is tried by joining its conjuncts and
  // projecting what is no longer shared, and the smallest result wins.
  // Later trials run under a state budget derived from the best one.
  struct Trial {
    Rel result;
    std::vector<std::size_t> used;  // indices into items
    std::size_t peak = 0;
  };

  Trial attempt(const std::vector<Rel>& items, const std::vector<std::string>& qvars, const std::string& v) {
    std::vector<Rel> group;
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (mentions(items[i], v)) {
        group.push_back(items[i]);
        used.push_back(i);
      }
    }
    std::size_t peak = 0;
    auto previous = intermediate_observer();
    set_intermediate_observer([&](std::size_t n) {
      peak = std::max(peak, n);
      if (previous) previous(n);
    });
    struct Restore {
      std::function<void(std::size_t)> f;
      ~Restore() { set_intermediate_observer(f); }
    } restore{previous};
    Rel joined = conjoin_all(std::move(group));
    std::vector<std::string> drop;
    for (const auto& w : joined.vars) {
      if (std::find(qvars.begin(), qvars.end(), w) == qvars.end()) continue;
      bool shared = false;
      for (std::size_t i = 0; i < items.size() && !shared; ++i) {
        if (std::find(used.begin(), used.end(), i) == used.end() && mentions(items[i], w)) shared = true;
      }
      if (!shared) drop.push_back(w);
    }
    Rel result = project_out(joined, drop);
    peak = std::max<std::size_t>(peak, result.a.num_states());
    return Trial{std::move(result), std::move(used), peak};
  }

  Rel eliminate(Conj c) {
    std::vector<std::string> qvars = c.qvars;
    std::vector<Rel> items = std::move(c.items);
    for (const auto& r : items) {
      if (r.a.arity() == 0 && is_empty(r.a)) return constant_rel(false);
    }
    while (true) {
      struct Candidate {
        std::string var;
        std::size_t width, count;
      };
      std::vector<Candidate> cands;
      for (const auto& v : qvars) {
        std::vector<std::string> u;
        std::size_t count = 0;
        for (const auto& r : items) {
          if (!mentions(r, v)) continue;
          ++count;
          for (const auto& w : r.vars) {
            if (std::find(u.begin(), u.end(), w) == u.end()) u.push_back(w);
          }
        }
        if (count > 0) cands.push_back({v, u.size(), count});
      }
      if (cands.empty()) break;
      std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        return std::tie(x.width, x.count) < std::tie(y.width, y.count);
      });
      std::optional<Trial> best;
      for (const auto& cand : cands) {
        if (!best) {
          best = attempt(items, qvars, cand.var);
          if (cands.size() == 1) break;
          continue;
        }
        std::size_t limit = std::max<std::size_t>(kTrialFloor, kTrialFactor * best->peak);
        try {
          StateBudget budget(limit);
          Trial t = attempt(items, qvars, cand.var);
          if (t.result.a.num_states() < best->result.a.num_states()) best = std::move(t);
        } catch (const BudgetExceeded&) {
          // too expensive compared to the current choice
        }
      }
      std::vector<Rel> rest;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (std::find(best->used.begin(), best->used.end(), i) == best->used.end()) rest.push_back(std::move(items[i]));
      }
      rest.push_back(std::move(best->result));
      items = std::move(rest);
    }
    return conjoin_all(std::move(items));
  }

  // ---- flattening ---------------------------------------------------------

  std::vector<std::string> bind(const std::vector<std::string>& vars, std::map<std::string, std::string>& saved,
                                std::vector<std::string>& fresh_names) {
    for (const auto& v : vars) {
      auto it = scope_.find(v);
      if (!saved.count(v)) saved[v] = it == scope_.end() ? std::string() : it->second;
      std::string n = fresh() + v;
      scope_[v] = n;
      fresh_names.push_back(n);
    }
    return fresh_names;
  }

  void unbind(const std::map<std::string, std::string>& saved) {
    for (const auto& [v, old] : saved) {
      if (old.empty()) {
        scope_.erase(v);
      } else {
        scope_[v] = old;
      }
    }
  }

  // Adds the conjuncts of f (positive) or of ~f (negative) to c.
  void flatten(const Formula& f, bool positive, Conj& c) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::Not:
        flatten(*f.kids[0], !positive, c);
        return;
      case K::And:
        if (positive) {
          flatten(*f.kids[0], true, c);
          flatten(*f.kids[1], true, c);
          return;
        }
        break;
      case K::Or:
        if (!positive) {
          flatten(*f.kids[0], false, c);
          flatten(*f.kids[1], false, c);
          return;
        }
        break;
      case K::Implies:
        if (!positive) {
          flatten(*f.kids[0], true, c);
          flatten(*f.kids[1], false, c);
          return;
        }
        break;
      case K::Exists:
      case K::Forall:
        if (positive == (f.kind == K::Exists)) {
          std::map<std::string, std::string> saved;
          std::vector<std::string> names;
          bind(f.vars, saved, names);
          c.qvars.insert(c.qvars.end(), names.begin(), names.end());
          flatten(*f.kids[0], positive, c);
          unbind(saved);
          return;
        }
        break;
      case K::Compare:
      case K::Pred:
      case K::Index:
      case K::IndexEq:
        if (positive) {
          atom(f, c);
          return;
        }
        break;
      default:
        break;
    }
    Rel r = whole(f);
    c.items.push_back(positive ? std::move(r) : negate(r));
  }

  // Relation of f itself, for nodes that do not flatten.
  Rel whole(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::Or:
        return combine(compile(*f.kids[0]), compile(*f.kids[1]), BoolOp::Or);
      case K::Iff:
        return combine(compile(*f.kids[0]), compile(*f.kids[1]), BoolOp::Iff);
      case K::Implies: {
        Rel lhs = compile(*f.kids[0]);
        if (lhs.a.arity() == 0) return is_empty(lhs.a) ? constant_rel(true) : compile(*f.kids[1]);
        return combine(negate(lhs), compile(*f.kids[1]), BoolOp::Or);
      }
      case K::Forall: {
        // A x f = ~E x ~f
        Conj c;
        std::map<std::string, std::string> saved;
        std::vector<std::string> names;
        bind(f.vars, saved, names);
        c.qvars = names;
        flatten(*f.kids[0], false, c);
        unbind(saved);
        return negate(eliminate(std::move(c)));
      }
      default: {
        Conj c;
        flatten(f, true, c);
        return eliminate(std::move(c));
      }
    }
  }

  // ---- atoms ----------------------------------------------------------------

  std::string resolve(const std::string& v) const {
    auto it = scope_.find(v);
    return it == scope_.end() ? v : it->second;
  }

  Lin linearize(const Term& t, Conj& c) {
    Lin out;
    switch (t.kind) {
      case Term::Kind::Var:
        out.coeffs[resolve(t.name)] = 1;
        return out;
      case Term::Kind::Const:
        out.constant = t.value;
        return out;
      case Term::Kind::Add:
      case Term::Kind::Sub:
        out = linearize(t.kids[0], c);
        out.add(linearize(t.kids[1], c), t.kind == Term::Kind::Add ? 1 : -1);
        return out;
      case Term::Kind::Mul:
        out.add(linearize(t.kids[0], c), t.value);
        return out;
      case Term::Kind::Div: {
        // w = floor(T / k)  <=>  0 <= T - k*w <= k-1
        Lin inner = linearize(t.kids[0], c);
        if (inner.coeffs.empty()) {
          if (inner.constant < 0) fail_at("division of a negative constant", t.pos);
          out.constant = inner.constant / t.value;
          return out;
        }
        std::string w = fresh();
        Lin range = inner;
        range.coeffs[w] = -t.value;
        c.qvars.push_back(w);
        c.items.push_back(range_rel(range, -inner.constant, t.value - 1 - inner.constant));
        out.coeffs[w] = 1;
        return out;
      }
    }
    return out;
  }

  // lo <= sum coeffs*vars <= hi (constant part of `l` ignored)
  Rel range_rel(const Lin& l, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> coeffs;
    std::vector<std::string> vars;
    for (auto& [v, c] : l.coeffs) {
      vars.push_back(v);
      coeffs.push_back(c);
    }
    if (vars.empty()) return constant_rel(lo <= 0 && 0 <= hi);
    std::string key;
    for (auto c : coeffs) key += std::to_string(c) + ",";
    key += "|" + std::to_string(lo) + "|" + std::to_string(hi);
    auto it = linear_cache_.find(key);
    if (it == linear_cache_.end()) {
      Automaton a = lo == hi ? linear_relation(sys_, {coeffs, lo}) : linear_range_relation(sys_, coeffs, lo, hi);
      it = linear_cache_.emplace(key, std::make_shared<Automaton>(std::move(a))).first;
    }
    return {*it->second, vars};
  }

  // sum coeffs*vars + constant = 0
  Rel equation(const Lin& l) { return range_rel(l, -l.constant, -l.constant); }

  const Automaton& order(Order o) {
    auto& slot = order_cache_[static_cast<int>(o)];
    if (!slot) slot = std::make_shared<Automaton>(order_relation(sys_, o));
    return *slot;
  }

  // Variable equal to the nonnegative linear form l, adding its definition.
  std::string variable_for(const Lin& l, Conj& c) {
    if (l.constant == 0 && l.coeffs.size() == 1 && l.coeffs.begin()->second == 1) return l.coeffs.begin()->first;
    std::string p = fresh();
    Lin def = l;
    def.coeffs[p] = -1;
    c.qvars.push_back(p);
    c.items.push_back(equation(def));
    return p;
  }

  void compare(const Formula& f, Conj& c) {
    Lin l = linearize(f.terms[0], c);
    l.add(linearize(f.terms[1], c), -1);  // l = t1 - t2
    switch (f.op) {
      case CmpOp::Eq:
        c.items.push_back(equation(l));
        return;
      case CmpOp::Neq: {
        Rel eq = equation(l);
        c.items.push_back(eq.a.arity() == 0 ? constant_rel(is_empty(eq.a)) : negate(eq));
        return;
      }
      default:
        break;
    }
    bool strict = f.op == CmpOp::Lt || f.op == CmpOp::Gt;
    if (f.op == CmpOp::Gt || f.op == CmpOp::Geq) {
      Lin neg;
      neg.add(l, -1);
      l = neg;
    }
    // l < 0 (or <= 0): split into x < y with nonnegative forms
    Lin x, y;
    for (auto& [v, k] : l.coeffs) (k > 0 ? x.coeffs[v] : y.coeffs[v]) = k > 0 ? k : -k;
    (l.constant > 0 ? x.constant : y.constant) = l.constant > 0 ? l.constant : -l.constant;
    if (x.coeffs.empty() && y.coeffs.empty()) {
      c.items.push_back(constant_rel(strict ? x.constant < y.constant : x.constant <= y.constant));
      return;
    }
    if (y.coeffs.empty() && y.constant == 0) {
      // x < 0 is false, x <= 0 means x = 0
      if (strict) {
        c.items.push_back(constant_rel(false));
      } else {
        c.items.push_back(equation(x));
      }
      return;
    }
    std::string xv = variable_for(x, c);
    std::string yv = variable_for(y, c);
    c.items.push_back({order(strict ? Order::Lt : Order::Leq), {xv, yv}});
  }

  // Variables standing for call arguments; non-variable or repeated
  // arguments get fresh variables.
  std::vector<std::string> arguments(const std::vector<Term>& terms, Conj& c) {
    std::vector<std::string> names;
    for (const auto& t : terms) {
      if (t.kind == Term::Kind::Var) {
        std::string v = resolve(t.name);
        if (std::find(names.begin(), names.end(), v) == names.end()) {
          names.push_back(v);
          continue;
        }
      }
      Lin l = linearize(t, c);
      std::string w = fresh();
      l.coeffs[w] -= 1;
      c.qvars.push_back(w);
      c.items.push_back(equation(l));
      names.push_back(w);
    }
    return names;
  }

  const Predicate& lookup(const std::string& name, SourcePos pos) const {
    if (!env_.has(name)) fail_at("unknown predicate '" + name + "'", pos);
    const Predicate& p = env_.predicate(name);
    const auto& s = p.automaton.system();
    if (s.name() != sys_->name() || !(s.period() == sys_->period())) {
      fail_at("predicate '" + name + "' belongs to " + s.name() + ", formula uses " + sys_->name(), pos);
    }
    return p;
  }

  const Automaton& word_value(const Predicate& p, const std::string& name, std::int64_t v) {
    auto key = std::make_pair(name, v);
    auto it = word_cache_.find(key);
    if (it == word_cache_.end()) {
      it = word_cache_.emplace(key, std::make_shared<Automaton>(output_equals(p.automaton, v))).first;
    }
    return *it->second;
  }

  const Predicate& word(const std::string& name, SourcePos pos) const {
    const Predicate& p = lookup(name, pos);
    if (!p.is_word || p.automaton.arity() != 1) fail_at("'" + name + "' is not an indexable word", pos);
    return p;
  }

  void atom(const Formula& f, Conj& c) {
    switch (f.kind) {
      case Formula::Kind::Compare:
        compare(f, c);
        return;
      case Formula::Kind::Pred: {
        const Predicate& p = lookup(f.name, f.pos);
        if (p.automaton.arity() != static_cast<int>(f.terms.size())) {
          fail_at("predicate '" + f.name + "' takes " + std::to_string(p.automaton.arity()) + " arguments, got " +
                      std::to_string(f.terms.size()),
                  f.pos);
        }
        auto names = arguments(f.terms, c);
        if (p.is_word) {
          // a word used as a predicate accepts where the output is nonzero
          Automaton a = p.automaton;
          for (State s = 0; s < a.num_states(); ++s) a.set_accepting(s, a.accepting(s) && a.output(s) != 0);
          a.clear_outputs();
          c.items.push_back({minimize(a), names});
        } else {
          c.items.push_back({p.automaton, names});
        }
        return;
      }
      case Formula::Kind::Index: {
        const Predicate& p = word(f.name, f.pos);
        auto names = arguments(f.terms, c);
        Rel r{word_value(p, f.name, f.value), names};
        c.items.push_back(f.op == CmpOp::Eq ? std::move(r) : negate(r));
        return;
      }
      case Formula::Kind::IndexEq: {
        const Predicate& p1 = word(f.name, f.pos);
        const Predicate& p2 = word(f.name2, f.pos);
        auto names = arguments(f.terms, c);
        std::set<std::int64_t> values;
        for (const Predicate* p : {&p1, &p2}) {
          for (State s = 0; s < p->automaton.num_states(); ++s) {
            if (p->automaton.accepting(s)) values.insert(p->automaton.output(s));
          }
        }
        Rel acc = constant_rel(false);
        for (auto v : values) {
          Rel both = combine(Rel{word_value(p1, f.name, v), {names[0]}}, Rel{word_value(p2, f.name2, v), {names[1]}},
                             BoolOp::And);
          acc = combine(acc, both, BoolOp::Or);
        }
        if (acc.vars.size() < 2) {
          acc = combine(acc, Rel{*canonical_recognizer(sys_, 2), names}, BoolOp::And);
        }
        c.items.push_back(f.op == CmpOp::Eq ? std::move(acc) : negate(acc));
        return;
      }
      default:
        fail_at("internal: not an atom", f.pos);
    }
  }

  const Environment& env_;
  SystemPtr sys_;
  int fresh_ = 0;
  std::map<std::string, std::string> scope_;
  std::map<std::string, std::shared_ptr<Automaton>> linear_cache_;
  std::shared_ptr<Automaton> order_cache_[3];
  std::map<std::pair<std::string, std::int64_t>, std::shared_ptr<Automaton>> word_cache_;
};

}  // namespace

CompiledFormula compile(const Environment& env, const ParsedFormula& f, SystemPtr fallback) {
  SystemPtr sys;
  if (f.system) {
    sys = env.system(*f.system);
  } else if (fallback) {
    sys = std::move(fallback);
  } else {
    sys = env.default_system();
  }
  if (!sys) throw FormulaError("no numeration system: define one with ost or annotate the formula with ?msd_<name>");
  Compiler c(env, sys);
  Rel r = c.compile(*f.root);
  // sort tracks by variable name
  std::vector<int> perm(r.vars.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  std::sort(perm.begin(), perm.end(), [&](int x, int y) { return r.vars[static_cast<std::size_t>(x)] < r.vars[static_cast<std::size_t>(y)]; });
  CompiledFormula out{permute_tracks(r.a, perm), {}};
  for (int p : perm) out.vars.push_back(r.vars[static_cast<std::size_t>(p)]);
  return out;
}

CompiledFormula compile(const Environment& env, std::string_view text, SystemPtr fallback) {
  return compile(env, parse_formula(text), std::move(fallback));
}

bool eval_sentence(const Environment& env, std::string_view text) {
  ParsedFormula f = parse_formula(text);
  auto free = free_variables(*f.root);
  if (!free.empty()) {
    std::string list;
    for (const auto& v : free) list += (list.empty() ? "" : ", ") + v;
    throw FormulaError("eval needs a sentence; free variables: " + list);
  }
  return !is_empty(compile(env, f).automaton);
}

const Predicate& def_predicate(Environment& env, const std::string& name, std::string_view text) {
  CompiledFormula c = compile(env, text);
  env.define(name, Predicate{std::move(c.automaton), std::move(c.vars), std::string(text), false});
  return env.predicate(name);
}

}  // namespace obd
