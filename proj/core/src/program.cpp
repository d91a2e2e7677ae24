#include "prologi/program.hpp"

#include <algorithm>
#include <stdexcept>

namespace prologi {

// Heads that cannot be called (an integer, or a compound applied to more
// arguments) can arise from substitution into a flex goal; the solver
// reports them at call time.
Goal Goal::atom(Term head, std::vector<Term> args) {
  Goal g(Kind::Atom, std::move(head));
  g.args_ = std::move(args);
  return g;
}

Goal Goal::call(const Term& callable) {
  if (callable.is_compound()) {
    return atom(Term::atom(callable.name()), {callable.args().begin(), callable.args().end()});
  }
  return atom(callable);
}

Goal Goal::conj(Goal left, Goal right) {
  Goal g(Kind::Conj, Term::atom("true"));
  g.children_.reserve(2);
  g.children_.push_back(std::move(left));
  g.children_.push_back(std::move(right));
  return g;
}

Goal Goal::exists(Var binder, Goal body) {
  Goal g(Kind::Exists, Term::atom("true"));
  g.binder_ = std::move(binder);
  g.children_.push_back(std::move(body));
  return g;
}

Goal Goal::read(Var binder, Goal body) {
  Goal g(Kind::Read, Term::atom("true"));
  g.binder_ = std::move(binder);
  g.children_.push_back(std::move(body));
  return g;
}

Goal Goal::uchoose(std::vector<Goal> alternatives) {
  if (alternatives.size() < 2) throw std::invalid_argument("uchoose needs at least two alternatives");
  Goal g(Kind::Uchoose, Term::atom("true"));
  g.children_ = std::move(alternatives);
  return g;
}

Goal Goal::with_instance(std::uint64_t id) const {
  Goal g = *this;
  g.instance_ = id;
  return g;
}

Term Goal::callable() const {
  if (kind_ != Kind::Atom || head_.is_var()) throw std::logic_error("callable() on a non-rigid goal");
  if (args_.empty()) return head_;
  return Term::compound(head_.name(), args_);
}

bool operator==(const Goal& a, const Goal& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Goal::Kind::Atom:
      return a.head_ == b.head_ && a.args_ == b.args_;
    case Goal::Kind::Exists:
    case Goal::Kind::Read:
      return a.binder_ == b.binder_ && a.children_ == b.children_;
    case Goal::Kind::Conj:
    case Goal::Kind::Uchoose:
      return a.children_ == b.children_;
  }
  return false;
}

namespace {

void collect_free(const Goal& g, std::vector<Var>& bound, std::vector<Var>& out) {
  auto add = [&](const Term& t) {
    for (Var& v : vars_of(t)) {
      if (std::find(bound.begin(), bound.end(), v) != bound.end()) continue;
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    }
  };
  switch (g.kind()) {
    case Goal::Kind::Atom:
      add(g.head());
      for (const Term& a : g.args()) add(a);
      break;
    case Goal::Kind::Exists:
    case Goal::Kind::Read:
      bound.push_back(g.binder());
      collect_free(g.body(), bound, out);
      bound.pop_back();
      break;
    case Goal::Kind::Conj:
    case Goal::Kind::Uchoose:
      for (const Goal& c : g.children()) collect_free(c, bound, out);
      break;
  }
}

Goal apply_goal(const Substitution& s, const Goal& g) {
  switch (g.kind()) {
    case Goal::Kind::Atom: {
      std::vector<Term> args;
      args.reserve(g.args().size());
      for (const Term& a : g.args()) args.push_back(apply(s, a));
      return Goal::atom(apply(s, g.head()), std::move(args));
    }
    case Goal::Kind::Conj:
      return Goal::conj(apply_goal(s, g.left()), apply_goal(s, g.right()));
    case Goal::Kind::Exists:
    case Goal::Kind::Read: {
      const Substitution inner = s.binds(g.binder()) ? s.without(g.binder()) : s;
      Goal body = apply_goal(inner, g.body());
      Goal out = g.kind() == Goal::Kind::Exists ? Goal::exists(g.binder(), std::move(body))
                                                : Goal::read(g.binder(), std::move(body));
      return out.with_instance(g.instance());
    }
    case Goal::Kind::Uchoose: {
      std::vector<Goal> alts;
      alts.reserve(g.alternatives().size());
      for (const Goal& a : g.alternatives()) alts.push_back(apply_goal(s, a));
      return Goal::uchoose(std::move(alts)).with_instance(g.instance());
    }
  }
  return g;
}

// Renaming needs a fresh instance id per interaction node, not one shared
// id for the whole goal, so it walks the tree itself.
Goal rename_goal(const Goal& g, Renamer& renamer, VarSupply& supply) {
  switch (g.kind()) {
    case Goal::Kind::Atom: {
      std::vector<Term> args;
      args.reserve(g.args().size());
      for (const Term& a : g.args()) args.push_back(renamer.rename(a));
      return Goal::atom(renamer.rename(g.head()), std::move(args));
    }
    case Goal::Kind::Conj:
      return Goal::conj(rename_goal(g.left(), renamer, supply), rename_goal(g.right(), renamer, supply));
    case Goal::Kind::Exists:
    case Goal::Kind::Read: {
      // Binders get their own fresh variable even if the name is reused
      // elsewhere in the clause.
      Var fresh = supply.fresh(g.binder().name);
      Renamer inner = renamer;
      Goal body = rename_goal(g.body(), inner.bind(g.binder(), fresh), supply);
      if (g.kind() == Goal::Kind::Exists) return Goal::exists(fresh, std::move(body));
      return Goal::read(fresh, std::move(body)).with_instance(supply.next_id());
    }
    case Goal::Kind::Uchoose: {
      std::vector<Goal> alts;
      alts.reserve(g.alternatives().size());
      for (const Goal& a : g.alternatives()) alts.push_back(rename_goal(a, renamer, supply));
      return Goal::uchoose(std::move(alts)).with_instance(supply.next_id());
    }
  }
  return g;
}

}  // namespace

std::vector<Var> free_vars(const Goal& g) {
  std::vector<Var> bound;
  std::vector<Var> out;
  collect_free(g, bound, out);
  return out;
}

Goal apply(const Substitution& s, const Goal& g) {
  if (s.empty()) return g;
  return apply_goal(s, g);
}

Clause fresh_rename(const Clause& c, VarSupply& supply) {
  Renamer renamer(supply);
  Clause out{renamer.rename(c.head), std::nullopt};
  if (c.body) out.body = rename_goal(*c.body, renamer, supply);
  return out;
}

Goal fresh_rename(const Goal& g, VarSupply& supply) {
  Renamer renamer(supply);
  return rename_goal(g, renamer, supply);
}

Goal instantiate_query(const Goal& g, VarSupply& supply) {
  Renamer renamer(supply);
  for (const Var& v : free_vars(g)) renamer.bind(v, v);
  return rename_goal(g, renamer, supply);
}

std::uint64_t max_serial(const Goal& g) {
  std::uint64_t out = 0;
  auto term_max = [&out](const Term& t) {
    for (const Var& v : vars_of(t)) out = std::max(out, v.serial);
  };
  switch (g.kind()) {
    case Goal::Kind::Atom:
      term_max(g.head());
      for (const Term& a : g.args()) term_max(a);
      break;
    case Goal::Kind::Exists:
    case Goal::Kind::Read:
      out = std::max(out, g.binder().serial);
      out = std::max(out, max_serial(g.body()));
      break;
    case Goal::Kind::Conj:
    case Goal::Kind::Uchoose:
      for (const Goal& c : g.children()) out = std::max(out, max_serial(c));
      break;
  }
  return out;
}

PredicateKey predicate_of(const Term& callable) {
  return PredicateKey{callable.name(), callable.arity()};
}

Program::Program(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const Term& head = clauses_[i].head;
    if (!head.is_callable()) throw std::invalid_argument("clause head must be an atom or compound term");
    index_[predicate_of(head)].push_back(i);
  }
}

const std::vector<std::size_t>& Program::candidates(const PredicateKey& key) const {
  static const std::vector<std::size_t> kNone;
  auto it = index_.find(key);
  return it == index_.end() ? kNone : it->second;
}

}  // namespace prologi
