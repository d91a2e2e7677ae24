#include "prologi/substitution.hpp"

#include <set>
#include <utility>

namespace prologi {

Substitution Substitution::from_idempotent(Map bindings) {
  Substitution s;
  s.bindings_ = std::move(bindings);
  return s;
}

const Term* Substitution::lookup(const Var& v) const {
  auto it = bindings_.find(v);
  return it == bindings_.end() ? nullptr : &it->second;
}

bool Substitution::bind(const Var& v, const Term& t) {
  if (t.is_var() && t.as_var() == v) return true;
  if (occurs_in(v, t)) return false;
  Substitution single;
  single.bindings_.emplace(v, t);
  for (auto& [_, bound] : bindings_) bound = apply(single, bound);
  bindings_.emplace(v, t);
  return true;
}

Substitution Substitution::restricted_to(const std::vector<Var>& vars) const {
  Substitution out;
  for (const Var& v : vars) {
    if (const Term* t = lookup(v)) out.bindings_.emplace(v, *t);
  }
  return out;
}

Substitution Substitution::without(const Var& v) const {
  Substitution out = *this;
  out.bindings_.erase(v);
  return out;
}

Term apply(const Substitution& s, const Term& t) {
  if (s.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    const Term* bound = s.lookup(t.as_var());
    return bound ? *bound : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(apply(s, a));
    changed = changed || args.back().id() != a.id();
  }
  return changed ? Term::compound(t.name(), std::move(args)) : t;
}

Substitution compose(const Substitution& s1, const Substitution& s2) {
  Substitution::Map out;
  for (const auto& [v, t] : s1) {
    Term image = apply(s2, t);
    if (!(image.is_var() && image.as_var() == v)) out.emplace(v, std::move(image));
  }
  for (const auto& [v, t] : s2) {
    if (!s1.binds(v)) out.emplace(v, t);
  }
  for (const auto& [v, _] : out) {
    for (const auto& [__, t] : out) {
      if (occurs_in(v, t)) {
        throw std::invalid_argument("composition binds " + v.name + " to a term containing itself");
      }
    }
  }
  return Substitution::from_idempotent(std::move(out));
}

namespace {

class Unifier {
 public:
  explicit Unifier(bool occurs_check) : occurs_check_(occurs_check) {}

  bool run(const Term& a, const Term& b) {
    std::vector<std::pair<Term, Term>> pending{{a, b}};
    while (!pending.empty()) {
      auto [x, y] = std::move(pending.back());
      pending.pop_back();
      x = walk(x);
      y = walk(y);
      if (x.id() == y.id()) continue;
      if (x.is_var() && y.is_var()) {
        if (x.as_var() == y.as_var()) continue;
        // Bind the newer variable so that older (query) variables survive.
        if (std::pair(x.serial(), x.name()) < std::pair(y.serial(), y.name())) std::swap(x, y);
        store_.emplace(x.as_var(), y);
        continue;
      }
      if (x.is_var() || y.is_var()) {
        if (y.is_var()) std::swap(x, y);
        if (occurs_check_ && occurs_walked(x.as_var(), y)) return false;
        store_.emplace(x.as_var(), y);
        continue;
      }
      if (x.kind() != y.kind()) return false;
      switch (x.kind()) {
        case Term::Kind::Int:
          if (x.int_value() != y.int_value()) return false;
          break;
        case Term::Kind::Atom:
          if (x.name() != y.name()) return false;
          break;
        case Term::Kind::Compound: {
          if (x.name() != y.name() || x.arity() != y.arity()) return false;
          // A pair already scheduled is assumed equal; this keeps the loop
          // finite when transient cycles exist without the occurs check.
          if (!occurs_check_ && !seen_.insert({x.id(), y.id()}).second) break;
          for (std::size_t i = 0; i < x.arity(); ++i) pending.emplace_back(x.args()[i], y.args()[i]);
          break;
        }
        case Term::Kind::Var:
          break;
      }
    }
    return true;
  }

  std::optional<Substitution> materialize() {
    Substitution::Map out;
    for (const auto& [v, _] : store_) {
      auto resolved = resolve(Term::var(v));
      if (!resolved) return std::nullopt;
      out.emplace(v, *resolved);
    }
    return Substitution::from_idempotent(std::move(out));
  }

 private:
  Term walk(Term t) const {
    while (t.is_var()) {
      auto it = store_.find(t.as_var());
      if (it == store_.end()) break;
      t = it->second;
    }
    return t;
  }

  bool occurs_walked(const Var& v, const Term& t) const {
    Term w = walk(t);
    if (w.is_var()) return w.as_var() == v;
    for (const Term& a : w.args()) {
      if (occurs_walked(v, a)) return true;
    }
    return false;
  }

  std::optional<Term> resolve(const Term& t) {
    if (t.is_ground()) return t;
    if (t.is_var()) {
      Var v = t.as_var();
      auto it = store_.find(v);
      if (it == store_.end()) return t;
      if (auto done = resolved_.find(v); done != resolved_.end()) return done->second;
      if (!in_progress_.insert(v).second) return std::nullopt;
      auto r = resolve(it->second);
      in_progress_.erase(v);
      if (r) resolved_.emplace(v, *r);
      return r;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) {
      auto r = resolve(a);
      if (!r) return std::nullopt;
      args.push_back(std::move(*r));
    }
    return Term::compound(t.name(), std::move(args));
  }

  bool occurs_check_;
  std::map<Var, Term> store_;
  std::set<std::pair<const void*, const void*>> seen_;
  std::map<Var, Term> resolved_;
  std::set<Var> in_progress_;
};

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b, bool occurs_check) {
  Unifier u(occurs_check);
  if (!u.run(a, b)) return std::nullopt;
  return u.materialize();
}

Var Renamer::rename(const Var& v) {
  auto it = mapping_.find(v);
  if (it != mapping_.end()) return it->second;
  Var fresh = supply_->fresh(v.name);
  mapping_.emplace(v, fresh);
  return fresh;
}

Term Renamer::rename(const Term& t) {
  if (t.is_ground()) return t;
  if (t.is_var()) return Term::var(rename(t.as_var()));
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(rename(a));
  return Term::compound(t.name(), std::move(args));
}

Term fresh_rename(const Term& t, VarSupply& supply) {
  Renamer r(supply);
  return r.rename(t);
}

}  // namespace prologi
