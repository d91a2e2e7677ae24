#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "prologi/term.hpp"

namespace prologi {

/// Finite map from variables to terms, kept idempotent: no variable in the
/// domain occurs in any bound term, and no variable is bound to itself.
class Substitution {
 public:
  using Map = std::map<Var, Term>;
  using const_iterator = Map::const_iterator;

  Substitution() = default;

  /// Builds from raw bindings; the caller guarantees idempotence.
  static Substitution from_idempotent(Map bindings);

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const_iterator begin() const { return bindings_.begin(); }
  const_iterator end() const { return bindings_.end(); }

  const Term* lookup(const Var& v) const;
  bool binds(const Var& v) const { return bindings_.contains(v); }

  /// Extends with v -> t, applying the new binding to the existing range.
  /// Requires v unbound here and `t` already applied; returns false if v
  /// occurs in t (the binding would be cyclic).
  bool bind(const Var& v, const Term& t);

  Substitution restricted_to(const std::vector<Var>& vars) const;
  Substitution without(const Var& v) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map bindings_;
};

Term apply(const Substitution& s, const Term& t);

/// The substitution that acts as `s1` followed by `s2`.
Substitution compose(const Substitution& s1, const Substitution& s2);

/// Most general unifier of `a` and `b`, or nullopt when none exists.
///
/// Without the occurs check the binding loop skips the per-binding
/// traversal and tolerates transient cycles; the final materialization of
/// the idempotent result detects them and reports failure, so the call
/// always terminates and never returns a cyclic binding.
std::optional<Substitution> unify(const Term& a, const Term& b, bool occurs_check = false);

/// Consistent renaming of variables to fresh ones drawn from a supply.
class Renamer {
 public:
  explicit Renamer(VarSupply& supply) : supply_(&supply) {}

  Term rename(const Term& t);
  Var rename(const Var& v);
  /// Forces `from` to map to `to` for the rest of this renamer's life.
  Renamer& bind(const Var& from, const Var& to) {
    mapping_.insert_or_assign(from, to);
    return *this;
  }

 private:
  VarSupply* supply_;
  std::map<Var, Var> mapping_;
};

/// Renames every variable in `t` apart; sharing within `t` is preserved.
Term fresh_rename(const Term& t, VarSupply& supply);

}  // namespace prologi
