#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prologi/program.hpp"
#include "prologi/substitution.hpp"
#include "prologi/term.hpp"

namespace prologi {

/// Syntax error with a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  /// The message without the position prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

// Concrete syntax, Prolog flavoured:
//
//   program ::= { clause }
//   clause  ::= head [ ":-" goal ] "."
//   goal    ::= unit [ "," goal ]                       (right associative)
//   unit    ::= "(" goal ")" | "read" "(" Var "," goal ")"
//             | "exists" "(" Var "," goal ")"
//             | "uchoose" "(" unit { "," unit } ")"     (two or more)
//             | Var [ "(" args ")" ] | term
//   term    ::= primary [ ":" term ]                    (right associative)
//   primary ::= integer | Var | atom [ "(" args ")" ] | "(" term ")"
//
// `%` starts a line comment. Lowercase identifiers and 'quoted' names are
// atoms, identifiers starting with an uppercase letter or `_` are
// variables; a lone `_` is a fresh variable at every occurrence.

Program parse_program(std::string_view text);

/// Warnings (binder variables that do not occur in their body) are
/// appended to `warnings` when given.
Goal parse_goal(std::string_view text, std::vector<std::string>* warnings = nullptr);

Term parse_term(std::string_view text);

/// Names variables for printing. A variable prints as its name unless
/// another variable in the same table shares the name, in which case the
/// serial is appended.
class VarNames {
 public:
  VarNames() = default;
  void add(const Term& t);
  void add(const Goal& g);
  void add(const Var& v);

  std::string name_of(const Var& v) const;

 private:
  std::vector<Var> vars_;
};

std::string render(const Term& t);
std::string render(const Term& t, const VarNames& names);
std::string render(const Goal& g);
std::string render(const Goal& g, const VarNames& names);
/// "true" when empty, otherwise `X = t, Y = u` in variable order.
std::string render(const Substitution& s);
std::string render(const Clause& c);
std::string render(const Program& p);

/// Renders goals with one shared naming table, as shown in a choice menu.
std::vector<std::string> render_all(std::span<const Goal> goals);

}  // namespace prologi
