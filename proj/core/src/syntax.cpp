#include "prologi/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <map>
#include <optional>

namespace prologi {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

enum class Tok { Atom, QuotedAtom, Var, Int, LParen, RParen, Comma, End, Neck, Colon, Eof };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  int width = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Atom:
    case Tok::Var:
    case Tok::Int:
      return "'" + t.text + "'";
    case Tok::QuotedAtom:
      return "quoted atom '" + t.text + "'";
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::Comma:
      return "','";
    case Tok::End:
      return "'.'";
    case Tok::Neck:
      return "':-'";
    case Tok::Colon:
      return "':'";
    case Tok::Eof:
      return "end of input";
  }
  return "token";
}

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token tok;
      tok.line = line_;
      tok.column = column_;
      if (pos_ >= text_.size()) {
        tok.kind = Tok::Eof;
        out.push_back(tok);
        return out;
      }
      const char c = text_[pos_];
      if (std::islower(static_cast<unsigned char>(c))) {
        tok.kind = Tok::Atom;
        tok.text = take_ident();
      } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
        tok.kind = Tok::Var;
        tok.text = take_ident();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        lex_int(tok);
      } else if (c == '\'') {
        tok.kind = Tok::QuotedAtom;
        tok.text = take_quoted(tok);
      } else if (c == '(') {
        tok.kind = Tok::LParen;
        advance();
      } else if (c == ')') {
        tok.kind = Tok::RParen;
        advance();
      } else if (c == ',') {
        tok.kind = Tok::Comma;
        advance();
      } else if (c == '.') {
        tok.kind = Tok::End;
        advance();
      } else if (c == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
        tok.kind = Tok::Neck;
        advance();
        advance();
      } else if (c == ':') {
        tok.kind = Tok::Colon;
        advance();
      } else {
        throw ParseError(line_, column_, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string take_ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
    return std::string(text_.substr(start, pos_ - start));
  }

  void lex_int(Token& tok) {
    const std::size_t start = pos_;
    if (text_[pos_] == '-') advance();
    const std::size_t digits_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    tok.kind = Tok::Int;
    tok.text = std::string(text_.substr(start, pos_ - start));
    const std::size_t digits = pos_ - digits_start;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, tok.value);
    if (ec != std::errc()) throw ParseError(tok.line, tok.column, "integer out of range: " + tok.text);
    // Width only matters when the literal had leading zeros.
    if (digits > 1 && text_[digits_start] == '0') tok.width = static_cast<int>(digits);
    if (pos_ < text_.size() && is_ident_char(text_[pos_])) {
      throw ParseError(line_, column_, "malformed number '" + tok.text + text_[pos_] + "'");
    }
  }

  std::string take_quoted(const Token& tok) {
    advance();
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        advance();
        out.push_back(text_[pos_]);
        advance();
      } else if (c == '\'') {
        advance();
        return out;
      } else if (c == '\n') {
        break;
      } else {
        out.push_back(c);
        advance();
      }
    }
    throw ParseError(tok.line, tok.column, "unterminated quoted atom");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, std::vector<std::string>* warnings)
      : tokens_(Lexer(text).run()), warnings_(warnings) {}

  Program program() {
    std::vector<Clause> clauses;
    while (peek().kind != Tok::Eof) {
      clauses.push_back(clause());
    }
    return Program(std::move(clauses));
  }

  Goal goal_only() {
    Goal g = goal();
    expect_eof();
    return g;
  }

  Term term_only() {
    Term t = term();
    expect_eof();
    return t;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }

  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, const std::string& expected) const {
    throw ParseError(at.line, at.column, "expected " + expected + " but found " + describe(at));
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), what);
    return next();
  }

  void expect_eof() {
    if (peek().kind != Tok::Eof) fail(peek(), "end of input");
  }

  Clause clause() {
    const Token& start = peek();
    Term head = term();
    if (!head.is_callable()) {
      throw ParseError(start.line, start.column, "clause head must be an atom or compound term");
    }
    std::optional<Goal> body;
    if (peek().kind == Tok::Neck) {
      next();
      body = goal();
    }
    expect(Tok::End, "'.' or ':-'");
    return Clause{std::move(head), std::move(body)};
  }

  Goal goal() {
    Goal left = unit();
    if (peek().kind == Tok::Comma) {
      next();
      return Goal::conj(std::move(left), goal());
    }
    return left;
  }

  bool keyword(std::string_view name) const {
    return peek().kind == Tok::Atom && peek().text == name && peek(1).kind == Tok::LParen;
  }

  Goal unit() {
    const Token& start = peek();
    if (start.kind == Tok::LParen) {
      next();
      Goal g = goal();
      expect(Tok::RParen, "')'");
      return g;
    }
    if ((keyword("read") || keyword("exists")) && peek(2).kind == Tok::Var && peek(3).kind == Tok::Comma) {
      const bool is_read = start.text == "read";
      next();
      next();
      const Token& var_tok = next();
      Var binder = variable(var_tok.text);
      next();
      Goal body = goal();
      expect(Tok::RParen, "')'");
      if (warnings_) {
        const auto fv = free_vars(body);
        if (std::find(fv.begin(), fv.end(), binder) == fv.end()) {
          warnings_->push_back("line " + std::to_string(start.line) + ": " + start.text + " binder " +
                               binder.name + " does not occur in its body");
        }
      }
      return is_read ? Goal::read(std::move(binder), std::move(body))
                     : Goal::exists(std::move(binder), std::move(body));
    }
    if (keyword("uchoose")) {
      next();
      next();
      std::vector<Goal> alternatives;
      alternatives.push_back(unit());
      while (peek().kind == Tok::Comma) {
        next();
        alternatives.push_back(unit());
      }
      expect(Tok::RParen, "',' or ')'");
      if (alternatives.size() < 2) {
        throw ParseError(start.line, start.column, "uchoose needs at least two alternatives");
      }
      return Goal::uchoose(std::move(alternatives));
    }
    if (start.kind == Tok::Var && peek(1).kind == Tok::LParen) {
      Term head = Term::var(variable(next().text));
      return Goal::atom(std::move(head), arguments());
    }
    Term t = term();
    if (t.is_int()) throw ParseError(start.line, start.column, "an integer is not a callable goal");
    if (t.is_var()) return Goal::atom(std::move(t));
    return Goal::call(t);
  }

  std::vector<Term> arguments() {
    expect(Tok::LParen, "'('");
    std::vector<Term> args;
    args.push_back(term());
    while (peek().kind == Tok::Comma) {
      next();
      args.push_back(term());
    }
    expect(Tok::RParen, "',' or ')'");
    return args;
  }

  Term term() {
    Term left = primary();
    if (peek().kind == Tok::Colon) {
      next();
      return Term::compound(":", {std::move(left), term()});
    }
    return left;
  }

  Term primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int:
        next();
        return Term::integer(t.value, t.width);
      case Tok::Var: {
        next();
        if (peek().kind == Tok::LParen) {
          throw ParseError(t.line, t.column, "a variable may only be applied to arguments in goal position");
        }
        return Term::var(variable(t.text));
      }
      case Tok::Atom:
      case Tok::QuotedAtom: {
        next();
        if (peek().kind == Tok::LParen) return Term::compound(t.text, arguments());
        return Term::atom(t.text);
      }
      case Tok::LParen: {
        next();
        Term inner = term();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail(t, "a term");
    }
  }

  Var variable(const std::string& name) {
    if (name == "_") return Var{"_", ++anonymous_};
    return Var{name, 0};
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string>* warnings_;
  std::uint64_t anonymous_ = 0;
};

bool plain_atom(const std::string& name) {
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(), is_ident_char);
}

std::string atom_text(const std::string& name) {
  if (plain_atom(name)) return name;
  std::string out = "'";
  for (char c : name) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string int_text(const Term& t, int min_width) {
  const std::int64_t v = t.int_value();
  std::string digits = std::to_string(v < 0 ? -(v + 1) + std::uint64_t{1} : static_cast<std::uint64_t>(v));
  const auto width = static_cast<std::size_t>(std::max(t.int_width(), min_width));
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return v < 0 ? "-" + digits : digits;
}

bool is_time(const Term& t) { return t.is_compound() && t.name() == ":" && t.arity() == 2; }

void render_term(const Term& t, const VarNames& names, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out += names.name_of(t.as_var());
      return;
    case Term::Kind::Int:
      out += int_text(t, 0);
      return;
    case Term::Kind::Atom:
      out += atom_text(t.name());
      return;
    case Term::Kind::Compound:
      break;
  }
  if (is_time(t)) {
    const Term& l = t.args()[0];
    const Term& r = t.args()[1];
    if (is_time(l)) out += '(';
    render_term(l, names, out);
    if (is_time(l)) out += ')';
    out += ':';
    if (r.is_int() && r.int_value() >= 0) {
      out += int_text(r, 2);
    } else {
      std::string right;
      render_term(r, names, right);
      // `:-` would lex as the neck.
      out += right.starts_with('-') ? '(' + right + ')' : right;
    }
    return;
  }
  out += atom_text(t.name());
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    render_term(t.args()[i], names, out);
  }
  out += ')';
}

bool reserved_goal_name(const std::string& name) {
  return name == "read" || name == "exists" || name == "uchoose";
}

void render_goal(const Goal& g, const VarNames& names, std::string& out);

void render_nested(const Goal& g, const VarNames& names, std::string& out) {
  if (g.kind() == Goal::Kind::Conj) out += '(';
  render_goal(g, names, out);
  if (g.kind() == Goal::Kind::Conj) out += ')';
}

void render_goal(const Goal& g, const VarNames& names, std::string& out) {
  switch (g.kind()) {
    case Goal::Kind::Atom: {
      const Term& head = g.head();
      if (head.is_atom() && reserved_goal_name(head.name())) {
        // Quoting keeps `read(X, a)` as a plain atom after a round trip.
        out += "'" + head.name() + "'";
      } else if (head.is_compound() && reserved_goal_name(head.name())) {
        out += "'" + head.name() + "'";
        std::string rest;
        render_term(head, names, rest);
        out += rest.substr(head.name().size());
        return;
      } else {
        render_term(head, names, out);
      }
      if (!g.args().empty()) {
        out += '(';
        for (std::size_t i = 0; i < g.args().size(); ++i) {
          if (i) out += ',';
          render_term(g.args()[i], names, out);
        }
        out += ')';
      }
      return;
    }
    case Goal::Kind::Conj:
      render_nested(g.left(), names, out);
      out += ", ";
      render_goal(g.right(), names, out);
      return;
    case Goal::Kind::Exists:
    case Goal::Kind::Read:
      out += g.kind() == Goal::Kind::Read ? "read(" : "exists(";
      out += names.name_of(g.binder());
      out += ", ";
      render_nested(g.body(), names, out);
      out += ')';
      return;
    case Goal::Kind::Uchoose:
      out += "uchoose(";
      for (std::size_t i = 0; i < g.alternatives().size(); ++i) {
        if (i) out += ", ";
        render_nested(g.alternatives()[i], names, out);
      }
      out += ')';
      return;
  }
}

void add_goal_vars(const Goal& g, VarNames& names) {
  switch (g.kind()) {
    case Goal::Kind::Atom:
      names.add(g.head());
      for (const Term& a : g.args()) names.add(a);
      break;
    case Goal::Kind::Exists:
    case Goal::Kind::Read:
      names.add(g.binder());
      add_goal_vars(g.body(), names);
      break;
    case Goal::Kind::Conj:
    case Goal::Kind::Uchoose:
      for (const Goal& c : g.children()) add_goal_vars(c, names);
      break;
  }
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text, nullptr).program(); }

Goal parse_goal(std::string_view text, std::vector<std::string>* warnings) {
  return Parser(text, warnings).goal_only();
}

Term parse_term(std::string_view text) { return Parser(text, nullptr).term_only(); }

void VarNames::add(const Var& v) {
  if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) vars_.push_back(v);
}

void VarNames::add(const Term& t) {
  for (const Var& v : vars_of(t)) add(v);
}

void VarNames::add(const Goal& g) { add_goal_vars(g, *this); }

std::string VarNames::name_of(const Var& v) const {
  const bool shared = std::any_of(vars_.begin(), vars_.end(), [&](const Var& o) {
    return o.name == v.name && o.serial != v.serial;
  });
  if (!shared && v.name != "_") return v.name;
  if (!shared) return "_";
  if (v.name == "_") return "_" + std::to_string(v.serial);
  if (v.serial == 0) return v.name;
  return v.name + "_" + std::to_string(v.serial);
}

std::string render(const Term& t, const VarNames& names) {
  std::string out;
  render_term(t, names, out);
  return out;
}

std::string render(const Term& t) {
  VarNames names;
  names.add(t);
  return render(t, names);
}

std::string render(const Goal& g, const VarNames& names) {
  std::string out;
  render_goal(g, names, out);
  return out;
}

std::string render(const Goal& g) {
  VarNames names;
  names.add(g);
  return render(g, names);
}

std::string render(const Substitution& s) {
  if (s.empty()) return "true";
  VarNames names;
  for (const auto& [v, t] : s) {
    names.add(v);
    names.add(t);
  }
  std::string out;
  for (const auto& [v, t] : s) {
    if (!out.empty()) out += ", ";
    out += names.name_of(v);
    out += " = ";
    out += render(t, names);
  }
  return out;
}

std::string render(const Clause& c) {
  VarNames names;
  names.add(c.head);
  if (c.body) names.add(*c.body);
  std::string out = render(c.head, names);
  if (c.body) out += " :- " + render(*c.body, names);
  out += '.';
  return out;
}

std::string render(const Program& p) {
  std::string out;
  for (const Clause& c : p.clauses()) {
    out += render(c);
    out += '\n';
  }
  return out;
}

std::vector<std::string> render_all(std::span<const Goal> goals) {
  VarNames names;
  for (const Goal& g : goals) names.add(g);
  std::vector<std::string> out;
  out.reserve(goals.size());
  for (const Goal& g : goals) out.push_back(render(g, names));
  return out;
}

}  // namespace prologi
