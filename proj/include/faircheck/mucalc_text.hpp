#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "faircheck/mucalc.hpp"

namespace faircheck {

// Textual grammar
//   formula:  ff | tt | X | !f | f || g | f && g | f => g | <R>f | [R]f
//             | mu X. f | nu X. f | (f)
//   regular:  eps | a | {a,b} | !{a,b} | R . Q | R + Q | R* | (R)
// Binders bind weakest, then =>, ||, &&; negation and modalities strongest.
// A single action is shorthand for its singleton set; labels that are not
// plain identifiers are written as quoted strings.

namespace detail {

inline bool plain_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  if (s == "ff" || s == "tt" || s == "mu" || s == "nu" || s == "eps") return false;
  return true;
}

inline std::string action_token(const std::string& label) {
  if (plain_ident(label)) return label;
  return quote_label(label);
}

inline std::string set_text(const ActionSet& s) {
  std::string body;
  if (s.members.size() == 1 && !s.complemented) return action_token(s.members[0]);
  body = "{";
  for (std::size_t i = 0; i < s.members.size(); ++i) {
    if (i) body += ",";
    body += action_token(s.members[i]);
  }
  body += "}";
  return s.complemented ? "!" + body : body;
}

// Printing appends into one buffer; formulae get large for the strong
// criteria, so no intermediate strings.

// regex precedence: union 1, concat 2, star 3, atom 4
inline void regex_text(const Regex& r, int min_prec, std::string& out) {
  int prec = r->kind == RegKind::Union   ? 1
             : r->kind == RegKind::Concat ? 2
             : r->kind == RegKind::Star   ? 3
                                          : 4;
  if (prec < min_prec) out += "(";
  switch (r->kind) {
    case RegKind::Epsilon: out += "eps"; break;
    case RegKind::Atom: out += set_text(r->set); break;
    case RegKind::Union:
      regex_text(r->lhs, 2, out);
      out += " + ";
      regex_text(r->rhs, 1, out);
      break;
    case RegKind::Concat:
      regex_text(r->lhs, 3, out);
      out += " . ";
      regex_text(r->rhs, 2, out);
      break;
    case RegKind::Star:
      regex_text(r->lhs, 4, out);
      out += "*";
      break;
  }
  if (prec < min_prec) out += ")";
}

// formula precedence: binder 0, => 1, || 2, && 3, prefix 4, atom 5
inline void formula_text(const Formula& f, int min_prec, std::string& out) {
  int prec = 5;
  switch (f->kind) {
    case FKind::Not:
    case FKind::Diamond:
    case FKind::Box: prec = 4; break;
    case FKind::Or: prec = 2; break;
    case FKind::And: prec = 3; break;
    case FKind::Implies: prec = 1; break;
    case FKind::Mu:
    case FKind::Nu: prec = 0; break;
    default: break;
  }
  if (prec < min_prec) out += "(";
  switch (f->kind) {
    case FKind::False: out += "ff"; break;
    case FKind::True: out += "tt"; break;
    case FKind::Var: out += f->name; break;
    case FKind::Not:
      out += "!";
      formula_text(f->lhs, 4, out);
      break;
    case FKind::Or:
      formula_text(f->lhs, 3, out);
      out += " || ";
      formula_text(f->rhs, 2, out);
      break;
    case FKind::And:
      formula_text(f->lhs, 4, out);
      out += " && ";
      formula_text(f->rhs, 3, out);
      break;
    case FKind::Implies:
      formula_text(f->lhs, 2, out);
      out += " => ";
      formula_text(f->rhs, 1, out);
      break;
    case FKind::Diamond:
    case FKind::Box:
      out += f->kind == FKind::Diamond ? "<" : "[";
      regex_text(f->reg, 0, out);
      out += f->kind == FKind::Diamond ? ">" : "]";
      formula_text(f->lhs, 4, out);
      break;
    case FKind::Mu:
    case FKind::Nu:
      out += f->kind == FKind::Mu ? "mu " : "nu ";
      out += f->name;
      out += ". ";
      formula_text(f->lhs, 0, out);
      break;
  }
  if (prec < min_prec) out += ")";
}

}  // namespace detail

inline std::string to_text(const Formula& f) {
  std::string out;
  detail::formula_text(f, 0, out);
  return out;
}
inline std::string to_text(const Regex& r) {
  std::string out;
  detail::regex_text(r, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
  enum Kind { Ident, Str, Sym, End } kind = End;
  std::string text;
  int line = 1;
};

class FormulaLexer {
 public:
  explicit FormulaLexer(const std::string& input) : input_(input) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  bool at_sym(const std::string& s) const { return tok_.kind == Token::Sym && tok_.text == s; }

  void expect_sym(const std::string& s) {
    if (!at_sym(s)) throw ParseError(tok_.line, "expected '" + s + "'");
    advance();
  }

  bool accept_sym(const std::string& s) {
    if (!at_sym(s)) return false;
    advance();
    return true;
  }

 private:
  void advance() {
    while (pos_ < input_.size()) {
      char c = input_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
    tok_ = Token{};
    tok_.line = line_;
    if (pos_ >= input_.size()) {
      tok_.kind = Token::End;
      return;
    }
    char c = input_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < input_.size() &&
             (std::isalnum(static_cast<unsigned char>(input_[pos_])) || input_[pos_] == '_'))
        ++pos_;
      tok_.kind = Token::Ident;
      tok_.text = input_.substr(start, pos_ - start);
      return;
    }
    if (c == '"') {
      tok_.kind = Token::Str;
      tok_.text = parse_quoted(input_, pos_, line_);
      return;
    }
    // multi-character symbols first
    for (const char* sym : {"||", "&&", "=>"}) {
      if (input_.compare(pos_, 2, sym) == 0) {
        tok_.kind = Token::Sym;
        tok_.text = sym;
        pos_ += 2;
        return;
      }
    }
    static const std::string singles = "!<>[](){}.*+,";
    if (singles.find(c) != std::string::npos) {
      tok_.kind = Token::Sym;
      tok_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw ParseError(line_, std::string("unexpected character '") + c + "'");
  }

  const std::string& input_;
  std::size_t pos_ = 0;
  int line_ = 1;
  Token tok_;
};

class FormulaParser {
 public:
  explicit FormulaParser(const std::string& input) : lex_(input) {}

  Formula parse() {
    Formula f = parse_formula();
    if (lex_.peek().kind != Token::End)
      throw ParseError(lex_.peek().line, "trailing input after formula");
    return f;
  }

  Regex parse_regex_only() {
    Regex r = parse_regex();
    if (lex_.peek().kind != Token::End)
      throw ParseError(lex_.peek().line, "trailing input after regular formula");
    return r;
  }

 private:
  Formula parse_formula() {
    if (lex_.peek().kind == Token::Ident &&
        (lex_.peek().text == "mu" || lex_.peek().text == "nu")) {
      bool least = lex_.take().text == "mu";
      Token var = lex_.take();
      if (var.kind != Token::Ident)
        throw ParseError(var.line, "expected a variable name after binder");
      lex_.expect_sym(".");
      Formula body = parse_formula();
      return least ? f_mu(var.text, body) : f_nu(var.text, body);
    }
    return parse_implies();
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (lex_.accept_sym("=>")) return f_implies(lhs, parse_implies());
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    if (lex_.accept_sym("||")) return f_or(lhs, parse_or());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    if (lex_.accept_sym("&&")) return f_and(lhs, parse_and());
    return lhs;
  }

  Formula parse_unary() {
    if (lex_.accept_sym("!")) return f_not(parse_unary());
    if (lex_.accept_sym("<")) {
      Regex r = parse_regex();
      lex_.expect_sym(">");
      return f_dia(r, parse_unary());
    }
    if (lex_.accept_sym("[")) {
      Regex r = parse_regex();
      lex_.expect_sym("]");
      return f_box(r, parse_unary());
    }
    return parse_atom();
  }

  Formula parse_atom() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Ident) {
      if (t.text == "ff") {
        lex_.take();
        return f_false();
      }
      if (t.text == "tt") {
        lex_.take();
        return f_true();
      }
      if (t.text == "mu" || t.text == "nu") return parse_formula();
      return f_var(lex_.take().text);
    }
    if (lex_.accept_sym("(")) {
      Formula f = parse_formula();
      lex_.expect_sym(")");
      return f;
    }
    throw ParseError(t.line, "expected a formula");
  }

  Regex parse_regex() {
    Regex lhs = parse_regex_concat();
    while (lex_.accept_sym("+")) lhs = r_union(lhs, parse_regex_concat());
    return lhs;
  }

  Regex parse_regex_concat() {
    Regex lhs = parse_regex_star();
    while (lex_.accept_sym(".")) lhs = r_concat(lhs, parse_regex_star());
    return lhs;
  }

  Regex parse_regex_star() {
    Regex r = parse_regex_atom();
    while (lex_.accept_sym("*")) r = r_star(r);
    return r;
  }

  std::string parse_action_token() {
    Token t = lex_.take();
    if (t.kind == Token::Str) return t.text;
    if (t.kind == Token::Ident) return t.text;
    throw ParseError(t.line, "expected an action label");
  }

  ActionSet parse_set_literal() {
    lex_.expect_sym("{");
    std::vector<std::string> labels;
    if (!lex_.at_sym("}")) {
      labels.push_back(parse_action_token());
      while (lex_.accept_sym(",")) labels.push_back(parse_action_token());
    }
    lex_.expect_sym("}");
    return ActionSet::of(std::move(labels));
  }

  Regex parse_regex_atom() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Sym && t.text == "!") {
      lex_.take();
      ActionSet s;
      if (lex_.at_sym("{")) {
        s = parse_set_literal();
      } else {
        s = ActionSet::single(parse_action_token());
      }
      return r_atom(s.complement());
    }
    if (t.kind == Token::Sym && t.text == "{") return r_atom(parse_set_literal());
    if (t.kind == Token::Sym && t.text == "(") {
      lex_.take();
      Regex r = parse_regex();
      lex_.expect_sym(")");
      return r;
    }
    if (t.kind == Token::Ident && t.text == "eps") {
      lex_.take();
      return r_eps();
    }
    if (t.kind == Token::Ident || t.kind == Token::Str)
      return r_atom(ActionSet::single(parse_action_token()));
    throw ParseError(t.line, "expected a regular formula");
  }

  FormulaLexer lex_;
};

}  // namespace detail

inline Formula parse_formula(const std::string& text) {
  detail::FormulaParser parser(text);
  return parser.parse();
}

inline Regex parse_regular_formula(const std::string& text) {
  detail::FormulaParser parser(text);
  return parser.parse_regex_only();
}

}  // namespace faircheck
