#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace prologi {

/// A logic variable. Identity is the (name, serial) pair: source variables
/// carry serial 0, variables introduced by renaming carry a positive serial.
struct Var {
  std::string name;
  std::uint64_t serial = 0;

  friend bool operator==(const Var&, const Var&) = default;
  friend auto operator<=>(const Var&, const Var&) = default;
};

/// Immutable first-order term with shared structure.
///
/// Four kinds exist: variables, integer constants, atoms (zero-arity
/// symbols) and compounds (functor applied to at least one argument).
/// Integers remember how many digits they were written with so that
/// literals such as `09` render back unchanged; equality ignores it.
class Term {
 public:
  enum class Kind : std::uint8_t { Var, Int, Atom, Compound };

  static Term var(std::string name, std::uint64_t serial = 0);
  static Term var(const Var& v) { return var(v.name, v.serial); }
  static Term integer(std::int64_t value, int width = 0);
  static Term atom(std::string name);
  /// Throws std::invalid_argument when `args` is empty.
  static Term compound(std::string functor, std::vector<Term> args);

  Kind kind() const { return node_->kind; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_atom() const { return kind() == Kind::Atom; }
  bool is_compound() const { return kind() == Kind::Compound; }
  bool is_callable() const { return is_atom() || is_compound(); }

  /// Variable name, atom name or compound functor.
  const std::string& name() const { return node_->name; }
  std::uint64_t serial() const { return node_->serial; }
  Var as_var() const { return Var{node_->name, node_->serial}; }
  std::int64_t int_value() const { return node_->value; }
  int int_width() const { return node_->width; }
  std::span<const Term> args() const { return node_->args; }
  std::size_t arity() const { return node_->args.size(); }

  bool is_ground() const { return node_->ground; }
  /// Identity of the shared node; equal ids imply equal terms.
  const void* id() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    Kind kind;
    bool ground;
    int width = 0;
    std::int64_t value = 0;
    std::uint64_t serial = 0;
    std::string name;
    std::vector<Term> args;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Appends the variables of `t` in first-occurrence order, skipping ones
/// already present in `out`.
void collect_vars(const Term& t, std::vector<Var>& out);
std::vector<Var> vars_of(const Term& t);
bool occurs_in(const Var& v, const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const;
};

/// Monotone source of fresh variable serials. One supply per solving
/// session; serial 0 is reserved for variables read from source text.
class VarSupply {
 public:
  explicit VarSupply(std::uint64_t first = 1) : next_(first) {}

  Var fresh(std::string name) { return Var{std::move(name), next_++}; }
  std::uint64_t next_id() { return next_++; }
  std::uint64_t peek() const { return next_; }

 private:
  std::uint64_t next_;
};

}  // namespace prologi
