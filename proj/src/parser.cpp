#include "obd/logic.hpp"

#include <optional>

#include <cctype>
#include <sstream>

namespace obd {

FormulaError::FormulaError(const std::string& message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message
                                  : message),
      bare_(message),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  enum class Kind { Ident, Number, Sym, Pred, System, End };
  Kind kind;
  std::string text;
  std::int64_t number = 0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      SourcePos pos{line_, col_};
      if (i_ >= text_.size()) {
        out.push_back({Token::Kind::End, "", 0, pos});
        return out;
      }
      char c = text_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        out.push_back({Token::Kind::Ident, ident(), 0, pos});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string digits;
        while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) digits += take();
        std::int64_t v = 0;
        for (char d : digits) {
          if (v > (INT64_MAX - 9) / 10) throw FormulaError("constant too large", pos.line, pos.column);
          v = v * 10 + (d - '0');
        }
        out.push_back({Token::Kind::Number, digits, v, pos});
      } else if (c == '$') {
        take();
        if (i_ >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
          throw FormulaError("expected predicate name after '$'", pos.line, pos.column);
        }
        out.push_back({Token::Kind::Pred, ident(), 0, pos});
      } else if (c == '?') {
        take();
        std::string name = ident();
        if (name.rfind("msd_", 0) != 0 || name.size() == 4) {
          throw FormulaError("expected ?msd_<name>", pos.line, pos.column);
        }
        out.push_back({Token::Kind::System, name, 0, pos});
      } else {
        static const char* syms[] = {"<=>", "=>", "<=", ">=", "!=", "=", "<", ">", "&", "|", "~", "+",
                                     "-",   "*",  "/",  "(",  ")",  "[", "]", ",", "@"};
        bool matched = false;
        for (const char* s : syms) {
          std::string_view sv(s);
          if (text_.substr(i_, sv.size()) == sv) {
            for (std::size_t k = 0; k < sv.size(); ++k) take();
            out.push_back({Token::Kind::Sym, std::string(sv), 0, pos});
            matched = true;
            break;
          }
        }
        if (!matched) throw FormulaError(std::string("unexpected character '") + c + "'", pos.line, pos.column);
      }
    }
  }

 private:
  char take() {
    char c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_space() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) take();
  }
  std::string ident() {
    std::string s;
    while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) s += take();
    return s;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_var_name(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParsedFormula run() {
    ParsedFormula out;
    if (peek().kind == Token::Kind::System) out.system = next().text;
    if (peek().kind == Token::Kind::End) fail("empty formula");
    out.root = iff();
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "'");
    return out;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(i_++, toks_.size() - 1)]; }
  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Token::Kind::Sym && peek(k).text == s;
  }
  bool accept(const char* s) {
    if (!is_sym(s)) return false;
    ++i_;
    return true;
  }
  void expect(const char* s) {
    if (!accept(s)) fail(std::string("expected '") + s + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw FormulaError(t.kind == Token::Kind::End ? msg + " at end of formula" : msg, t.pos.line, t.pos.column);
  }

  static FormulaPtr node(Formula::Kind k, std::vector<FormulaPtr> kids, SourcePos pos) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->kids = std::move(kids);
    f->pos = pos;
    return f;
  }

  FormulaPtr iff() {
    FormulaPtr lhs = implies();
    while (is_sym("<=>")) {
      SourcePos pos = next().pos;
      lhs = node(Formula::Kind::Iff, {lhs, implies()}, pos);
    }
    return lhs;
  }

  FormulaPtr implies() {
    FormulaPtr lhs = disj();
    if (is_sym("=>")) {
      SourcePos pos = next().pos;
      return node(Formula::Kind::Implies, {lhs, implies()}, pos);
    }
    return lhs;
  }

  FormulaPtr disj() {
    FormulaPtr lhs = conj();
    while (is_sym("|")) {
      SourcePos pos = next().pos;
      lhs = node(Formula::Kind::Or, {lhs, conj()}, pos);
    }
    return lhs;
  }

  FormulaPtr conj() {
    FormulaPtr lhs = unary();
    while (is_sym("&")) {
      SourcePos pos = next().pos;
      lhs = node(Formula::Kind::And, {lhs, unary()}, pos);
    }
    return lhs;
  }

  bool at_quantifier() const {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident || (t.text[0] != 'E' && t.text[0] != 'A')) return false;
    if (t.text.size() > 1) return std::islower(static_cast<unsigned char>(t.text[1])) != 0;
    return peek(1).kind == Token::Kind::Ident && is_var_name(peek(1).text);
  }

  FormulaPtr unary() {
    if (is_sym("~")) {
      SourcePos pos = next().pos;
      return node(Formula::Kind::Not, {unary()}, pos);
    }
    if (at_quantifier()) return quantifier();
    return primary();
  }

  FormulaPtr quantifier() {
    const Token& q = next();
    auto f = std::make_shared<Formula>();
    f->kind = q.text[0] == 'E' ? Formula::Kind::Exists : Formula::Kind::Forall;
    f->pos = q.pos;
    if (q.text.size() > 1) {
      f->vars.push_back(q.text.substr(1));
    } else {
      f->vars.push_back(next().text);
    }
    while (accept(",")) {
      const Token& v = peek();
      if (v.kind != Token::Kind::Ident || !is_var_name(v.text)) fail("expected variable name");
      f->vars.push_back(next().text);
    }
    for (const auto& v : f->vars) {
      if (!is_var_name(v)) throw FormulaError("bad quantified variable '" + v + "'", q.pos.line, q.pos.column);
    }
    if (peek().kind == Token::Kind::End || is_sym(")")) fail("missing quantifier body");
    f->kids.push_back(iff());
    return f;
  }

  bool at_term_continuation() const {
    for (const char* s : {"=", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/"}) {
      if (is_sym(s)) return true;
    }
    return false;
  }

  FormulaPtr primary() {
    if (is_sym("(")) {
      std::size_t save = i_;
      std::optional<FormulaError> first;
      try {
        ++i_;
        FormulaPtr f = iff();
        expect(")");
        if (!at_term_continuation()) return f;
      } catch (const FormulaError& e) {
        first = e;
      }
      i_ = save;
      try {
        return comparison();
      } catch (const FormulaError& e) {
        // report whichever reading got further
        if (first && std::pair(first->line(), first->column()) > std::pair(e.line(), e.column())) throw *first;
        throw;
      }
    }
    const Token& t = peek();
    if (t.kind == Token::Kind::Pred) return predicate();
    if (t.kind == Token::Kind::Ident && is_sym("[", 1)) return index();
    if (t.kind == Token::Kind::End) fail("expected a formula");
    return comparison();
  }

  FormulaPtr predicate() {
    const Token& t = next();
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Pred;
    f->name = t.text;
    f->pos = t.pos;
    expect("(");
    if (!is_sym(")")) {
      do {
        f->terms.push_back(term());
      } while (accept(","));
    }
    expect(")");
    return f;
  }

  FormulaPtr index() {
    const Token& t = next();
    auto f = std::make_shared<Formula>();
    f->pos = t.pos;
    f->name = t.text;
    expect("[");
    f->terms.push_back(term());
    expect("]");
    if (accept("=")) {
      f->op = CmpOp::Eq;
    } else if (accept("!=")) {
      f->op = CmpOp::Neq;
    } else {
      fail("expected '=' or '!=' after indexed word");
    }
    if (accept("@")) {
      bool neg = accept("-");
      if (peek().kind != Token::Kind::Number) fail("expected output value after '@'");
      f->value = next().number * (neg ? -1 : 1);
      f->kind = Formula::Kind::Index;
      return f;
    }
    if (peek().kind == Token::Kind::Ident && is_sym("[", 1)) {
      f->kind = Formula::Kind::IndexEq;
      f->name2 = next().text;
      expect("[");
      f->terms.push_back(term());
      expect("]");
      return f;
    }
    fail("expected '@value' or an indexed word");
  }

  FormulaPtr comparison() {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Compare;
    f->pos = peek().pos;
    f->terms.push_back(term());
    static const std::pair<const char*, CmpOp> ops[] = {{"=", CmpOp::Eq},  {"!=", CmpOp::Neq}, {"<=", CmpOp::Leq},
                                                        {">=", CmpOp::Geq}, {"<", CmpOp::Lt},   {">", CmpOp::Gt}};
    bool found = false;
    for (auto [s, op] : ops) {
      if (accept(s)) {
        f->op = op;
        found = true;
        break;
      }
    }
    if (!found) fail("expected a comparison operator");
    f->terms.push_back(term());
    return f;
  }

  static bool constant(const Term& t, std::int64_t& v) {
    switch (t.kind) {
      case Term::Kind::Const: v = t.value; return true;
      case Term::Kind::Var: return false;
      case Term::Kind::Add:
      case Term::Kind::Sub: {
        std::int64_t a, b;
        if (!constant(t.kids[0], a) || !constant(t.kids[1], b)) return false;
        v = t.kind == Term::Kind::Add ? a + b : a - b;
        return true;
      }
      case Term::Kind::Mul: {
        std::int64_t a;
        if (!constant(t.kids[0], a)) return false;
        v = a * t.value;
        return true;
      }
      case Term::Kind::Div: {
        std::int64_t a;
        if (!constant(t.kids[0], a) || a < 0) return false;
        v = a / t.value;
        return true;
      }
    }
    return false;
  }

  Term term() {
    Term lhs = product();
    while (is_sym("+") || is_sym("-")) {
      const Token& op = next();
      Term t;
      t.kind = op.text == "+" ? Term::Kind::Add : Term::Kind::Sub;
      t.pos = op.pos;
      t.kids = {std::move(lhs), product()};
      lhs = std::move(t);
    }
    return lhs;
  }

  Term product() {
    Term lhs = atom_term();
    while (is_sym("*") || is_sym("/")) {
      const Token& op = next();
      Term rhs = atom_term();
      std::int64_t c;
      Term t;
      t.pos = op.pos;
      if (op.text == "*") {
        t.kind = Term::Kind::Mul;
        if (constant(lhs, c)) {
          t.value = c;
          t.kids = {std::move(rhs)};
        } else if (constant(rhs, c)) {
          t.value = c;
          t.kids = {std::move(lhs)};
        } else {
          throw FormulaError("multiplication needs a constant factor", op.pos.line, op.pos.column);
        }
      } else {
        if (!constant(rhs, c) || c < 1) {
          throw FormulaError("division needs a positive constant divisor", op.pos.line, op.pos.column);
        }
        t.kind = Term::Kind::Div;
        t.value = c;
        t.kids = {std::move(lhs)};
      }
      lhs = std::move(t);
    }
    return lhs;
  }

  Term atom_term() {
    const Token& t = peek();
    Term out;
    out.pos = t.pos;
    if (t.kind == Token::Kind::Number) {
      out.kind = Term::Kind::Const;
      out.value = next().number;
      return out;
    }
    if (t.kind == Token::Kind::Ident) {
      if (!is_var_name(t.text)) fail("variables must start with a lowercase letter: '" + t.text + "'");
      out.kind = Term::Kind::Var;
      out.name = next().text;
      return out;
    }
    if (accept("(")) {
      out = term();
      expect(")");
      return out;
    }
    fail("expected a term");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

void term_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) out.insert(t.name);
  for (const auto& k : t.kids) term_vars(k, out);
}

std::string format_term(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var: return t.name;
    case Term::Kind::Const: return std::to_string(t.value);
    case Term::Kind::Add: return "(" + format_term(t.kids[0]) + "+" + format_term(t.kids[1]) + ")";
    case Term::Kind::Sub: return "(" + format_term(t.kids[0]) + "-" + format_term(t.kids[1]) + ")";
    case Term::Kind::Mul: return std::to_string(t.value) + "*" + format_term(t.kids[0]);
    case Term::Kind::Div: return "(" + format_term(t.kids[0]) + "/" + std::to_string(t.value) + ")";
  }
  return "";
}

const char* op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Neq: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Leq: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Geq: return ">=";
  }
  return "?";
}

}  // namespace

ParsedFormula parse_formula(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> out;
  switch (f.kind) {
    case Formula::Kind::Compare:
    case Formula::Kind::Pred:
    case Formula::Kind::Index:
    case Formula::Kind::IndexEq:
      for (const auto& t : f.terms) term_vars(t, out);
      return out;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      out = free_variables(*f.kids[0]);
      for (const auto& v : f.vars) out.erase(v);
      return out;
    }
    default:
      for (const auto& k : f.kids) {
        auto s = free_variables(*k);
        out.insert(s.begin(), s.end());
      }
      return out;
  }
}

std::string format_formula(const Formula& f) {
  auto bin = [&](const char* op) {
    return "(" + format_formula(*f.kids[0]) + " " + op + " " + format_formula(*f.kids[1]) + ")";
  };
  switch (f.kind) {
    case Formula::Kind::Compare: return format_term(f.terms[0]) + op_text(f.op) + format_term(f.terms[1]);
    case Formula::Kind::Pred: {
      std::string s = "$" + f.name + "(";
      for (std::size_t i = 0; i < f.terms.size(); ++i) s += (i ? "," : "") + format_term(f.terms[i]);
      return s + ")";
    }
    case Formula::Kind::Index:
      return f.name + "[" + format_term(f.terms[0]) + "]" + op_text(f.op) + "@" + std::to_string(f.value);
    case Formula::Kind::IndexEq:
      return f.name + "[" + format_term(f.terms[0]) + "]" + op_text(f.op) + f.name2 + "[" + format_term(f.terms[1]) + "]";
    case Formula::Kind::Not: return "~" + format_formula(*f.kids[0]);
    case Formula::Kind::And: return bin("&");
    case Formula::Kind::Or: return bin("|");
    case Formula::Kind::Implies: return bin("=>");
    case Formula::Kind::Iff: return bin("<=>");
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::string s = f.kind == Formula::Kind::Exists ? "(E" : "(A";
      for (std::size_t i = 0; i < f.vars.size(); ++i) s += (i ? "," : "") + f.vars[i];
      return s + " " + format_formula(*f.kids[0]) + ")";
    }
  }
  return "";
}

}  // namespace obd
