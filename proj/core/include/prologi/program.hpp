#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prologi/substitution.hpp"
#include "prologi/term.hpp"

namespace prologi {

/// Goal formula: atoms (possibly with a variable in predicate position),
/// conjunction, explicit existential, read binder and bounded user choice.
class Goal {
 public:
  enum class Kind : std::uint8_t { Atom, Conj, Exists, Read, Uchoose };

  /// `head` is an Atom (rigid goal) or a Var (flex goal); a head with no
  /// arguments may also be a compound term, e.g. `price(h,W)`.
  static Goal atom(Term head, std::vector<Term> args = {});
  /// Convenience for a rigid atomic goal given as a callable term.
  static Goal call(const Term& callable);
  static Goal conj(Goal left, Goal right);
  static Goal exists(Var binder, Goal body);
  static Goal read(Var binder, Goal body);
  /// Throws std::invalid_argument for fewer than two alternatives.
  static Goal uchoose(std::vector<Goal> alternatives);

  Kind kind() const { return kind_; }
  const Term& head() const { return head_; }
  const std::vector<Term>& args() const { return args_; }
  bool is_flex() const { return kind_ == Kind::Atom && head_.is_var(); }
  const Var& binder() const { return binder_; }
  const std::vector<Goal>& children() const { return children_; }
  const Goal& left() const { return children_[0]; }
  const Goal& right() const { return children_[1]; }
  const Goal& body() const { return children_[0]; }
  const std::vector<Goal>& alternatives() const { return children_; }

  /// Identity of this interaction node instance (Read and Uchoose only).
  /// Zero means "not yet instantiated"; ignored by equality.
  std::uint64_t instance() const { return instance_; }
  Goal with_instance(std::uint64_t id) const;

  /// The atomic goal as a callable term. Requires a rigid head.
  Term callable() const;

  friend bool operator==(const Goal& a, const Goal& b);

 private:
  Goal(Kind kind, Term head) : kind_(kind), head_(std::move(head)) {}

  Kind kind_;
  Term head_;
  std::vector<Term> args_;
  Var binder_;
  std::vector<Goal> children_;
  std::uint64_t instance_ = 0;
};

/// Free variables in first-occurrence order. Binder variables of read and
/// exists are bound inside their bodies.
std::vector<Var> free_vars(const Goal& g);

/// Applies `s` to every free occurrence; binders shadow.
Goal apply(const Substitution& s, const Goal& g);

/// `A` or `A :- G`. The head is an Atom or a Compound.
struct Clause {
  Term head;
  std::optional<Goal> body;

  bool is_fact() const { return !body.has_value(); }
  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Renames all variables (binders included) apart and gives every
/// interaction node a fresh instance id drawn from the same supply.
Clause fresh_rename(const Clause& c, VarSupply& supply);
Goal fresh_rename(const Goal& g, VarSupply& supply);

/// Like fresh_rename but free variables keep their identity: only binders
/// are renamed apart and interaction nodes get instance ids.
Goal instantiate_query(const Goal& g, VarSupply& supply);

/// Largest variable serial occurring in `g`, binders included.
std::uint64_t max_serial(const Goal& g);

/// Name/arity of a callable term.
struct PredicateKey {
  std::string name;
  std::size_t arity = 0;
  friend auto operator<=>(const PredicateKey&, const PredicateKey&) = default;
};
PredicateKey predicate_of(const Term& callable);

/// Ordered clause list; order is textual order and drives clause selection.
class Program {
 public:
  Program() = default;
  explicit Program(std::vector<Clause> clauses);

  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t size() const { return clauses_.size(); }
  bool empty() const { return clauses_.empty(); }

  /// Indices of the clauses for `key`, in textual order.
  const std::vector<std::size_t>& candidates(const PredicateKey& key) const;

 private:
  std::vector<Clause> clauses_;
  std::map<PredicateKey, std::vector<std::size_t>> index_;
};

}  // namespace prologi
