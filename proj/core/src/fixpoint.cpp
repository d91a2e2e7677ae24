#include "prologi/fixpoint.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace prologi {

namespace {

using Env = std::map<Var, Term>;

bool is_time_constant(const Term& t) {
  return t.is_compound() && t.name() == ":" && t.arity() == 2 && t.args()[0].is_int() && t.args()[1].is_int();
}

void check_argument(const Term& t) {
  if (t.is_compound() && !is_time_constant(t)) {
    throw OracleScopeError("fixpoint oracle: function symbol in argument position");
  }
}

void check_atom(const Term& atom) {
  if (!atom.is_callable()) throw OracleScopeError("fixpoint oracle: non-callable atom");
  for (const Term& a : atom.args()) check_argument(a);
}

// Flattens a body into a list of rigid atoms. Exists binders become
// ordinary clause variables with serials counted down from the top of the
// range, so they cannot clash with source variables.
void flatten(const Goal& g, std::vector<Term>& out, std::map<Var, Var>& renames, std::uint64_t& next_local) {
  switch (g.kind()) {
    case Goal::Kind::Atom: {
      if (g.is_flex()) throw OracleScopeError("fixpoint oracle: flex goal in clause body");
      Term atom = g.callable();
      if (!renames.empty()) {
        std::vector<Term> args;
        for (const Term& a : atom.args()) {
          auto it = a.is_var() ? renames.find(a.as_var()) : renames.end();
          args.push_back(it == renames.end() ? a : Term::var(it->second));
        }
        if (!args.empty()) atom = Term::compound(atom.name(), std::move(args));
      }
      check_atom(atom);
      out.push_back(std::move(atom));
      return;
    }
    case Goal::Kind::Conj:
      flatten(g.left(), out, renames, next_local);
      flatten(g.right(), out, renames, next_local);
      return;
    case Goal::Kind::Exists: {
      auto saved = renames;
      renames[g.binder()] = Var{g.binder().name, ~std::uint64_t{0} - next_local++};
      flatten(g.body(), out, renames, next_local);
      renames = std::move(saved);
      return;
    }
    case Goal::Kind::Read:
    case Goal::Kind::Uchoose:
      throw OracleScopeError("fixpoint oracle: interactive goal in clause body");
  }
}

struct Rule {
  Term head;
  std::vector<Term> body;
};

bool match(const Term& pattern, const Term& ground, Env& env) {
  if (pattern.is_var()) {
    auto [it, inserted] = env.emplace(pattern.as_var(), ground);
    return inserted || it->second == ground;
  }
  if (pattern.kind() != ground.kind()) return false;
  switch (pattern.kind()) {
    case Term::Kind::Int:
      return pattern.int_value() == ground.int_value();
    case Term::Kind::Atom:
      return pattern.name() == ground.name();
    case Term::Kind::Compound:
      if (pattern.name() != ground.name() || pattern.arity() != ground.arity()) return false;
      for (std::size_t i = 0; i < pattern.arity(); ++i) {
        if (!match(pattern.args()[i], ground.args()[i], env)) return false;
      }
      return true;
    case Term::Kind::Var:
      break;
  }
  return false;
}

Term instantiate(const Term& t, const Env& env) {
  if (t.is_var()) {
    auto it = env.find(t.as_var());
    return it == env.end() ? t : it->second;
  }
  if (!t.is_compound()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(instantiate(a, env));
  return Term::compound(t.name(), std::move(args));
}

void collect_constants(const Term& t, std::set<Term>& out) {
  if (t.is_var()) return;
  if (t.is_int() || is_time_constant(t)) {
    out.insert(t);
    return;
  }
  if (t.is_atom()) out.insert(t);
}

// Grounds the head over the universe for variables the body left open.
void emit_head(const Term& head, Env& env, const std::set<Term>& universe, std::set<Term>& out) {
  Term partial = instantiate(head, env);
  if (partial.is_ground()) {
    out.insert(std::move(partial));
    return;
  }
  std::vector<Var> open;
  for (const Term& a : partial.args()) {
    if (a.is_var() && std::find(open.begin(), open.end(), a.as_var()) == open.end()) open.push_back(a.as_var());
  }
  std::vector<Term> pool(universe.begin(), universe.end());
  if (pool.empty()) return;
  std::vector<std::size_t> odometer(open.size(), 0);
  for (;;) {
    Env grounding;
    for (std::size_t i = 0; i < open.size(); ++i) grounding.emplace(open[i], pool[odometer[i]]);
    out.insert(instantiate(partial, grounding));
    std::size_t i = 0;
    while (i < odometer.size() && ++odometer[i] == pool.size()) odometer[i++] = 0;
    if (i == odometer.size()) return;
  }
}

void join(const Rule& rule, std::size_t at, Env& env, const std::set<Term>& model, const std::set<Term>& universe,
          std::set<Term>& out) {
  if (at == rule.body.size()) {
    emit_head(rule.head, env, universe, out);
    return;
  }
  for (const Term& fact : model) {
    Env extended = env;
    if (match(rule.body[at], fact, extended)) join(rule, at + 1, extended, model, universe, out);
  }
}

}  // namespace

LeastModel least_model(const Program& program) {
  LeastModel result;
  std::vector<Rule> rules;
  for (const Clause& c : program.clauses()) {
    check_atom(c.head);
    Rule r{c.head, {}};
    if (c.body) {
      std::map<Var, Var> renames;
      std::uint64_t next_local = 1;
      flatten(*c.body, r.body, renames, next_local);
    }
    for (const Term& a : r.head.args()) collect_constants(a, result.universe);
    for (const Term& b : r.body) {
      for (const Term& a : b.args()) collect_constants(a, result.universe);
    }
    rules.push_back(std::move(r));
  }
  for (;;) {
    std::set<Term> derived;
    for (const Rule& r : rules) {
      Env env;
      join(r, 0, env, result.atoms, result.universe, derived);
    }
    const std::size_t before = result.atoms.size();
    result.atoms.insert(derived.begin(), derived.end());
    if (result.atoms.size() == before) break;
    ++result.stages;
  }
  return result;
}

std::set<Term> fixpoint_oracle(const Program& program) { return least_model(program).atoms; }

}  // namespace prologi
