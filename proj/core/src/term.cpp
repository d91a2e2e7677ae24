#include "prologi/term.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace prologi {

Term Term::var(std::string name, std::uint64_t serial) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Var;
  node->ground = false;
  node->name = std::move(name);
  node->serial = serial;
  return Term(std::move(node));
}

Term Term::integer(std::int64_t value, int width) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Int;
  node->ground = true;
  node->value = value;
  node->width = width;
  return Term(std::move(node));
}

Term Term::atom(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Atom;
  node->ground = true;
  node->name = std::move(name);
  return Term(std::move(node));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) {
    throw std::invalid_argument("compound term '" + functor + "' needs at least one argument");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Compound;
  node->ground = std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
  node->name = std::move(functor);
  node->args = std::move(args);
  return Term(std::move(node));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.serial() == b.serial() && a.name() == b.name();
    case Term::Kind::Int:
      return a.int_value() == b.int_value();
    case Term::Kind::Atom:
      return a.name() == b.name();
    case Term::Kind::Compound:
      return a.name() == b.name() && std::ranges::equal(a.args(), b.args());
  }
  return false;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Term::Kind::Var:
      return a.as_var() <=> b.as_var();
    case Term::Kind::Int:
      return a.int_value() <=> b.int_value();
    case Term::Kind::Atom:
      return a.name() <=> b.name();
    case Term::Kind::Compound: {
      if (auto c = a.arity() <=> b.arity(); c != 0) return c;
      if (auto c = a.name() <=> b.name(); c != 0) return c;
      return std::lexicographical_compare_three_way(a.args().begin(), a.args().end(),
                                                    b.args().begin(), b.args().end());
    }
  }
  return std::strong_ordering::equal;
}

void collect_vars(const Term& t, std::vector<Var>& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    Var v = t.as_var();
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
    return;
  }
  for (const Term& a : t.args()) collect_vars(a, out);
}

std::vector<Var> vars_of(const Term& t) {
  std::vector<Var> out;
  collect_vars(t, out);
  return out;
}

bool occurs_in(const Var& v, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_var()) return t.serial() == v.serial && t.name() == v.name;
  return std::ranges::any_of(t.args(), [&](const Term& a) { return occurs_in(v, a); });
}

std::size_t TermHash::operator()(const Term& t) const {
  std::size_t h = static_cast<std::size_t>(t.kind()) * 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  switch (t.kind()) {
    case Term::Kind::Var:
      mix(std::hash<std::string>{}(t.name()));
      mix(std::hash<std::uint64_t>{}(t.serial()));
      break;
    case Term::Kind::Int:
      mix(std::hash<std::int64_t>{}(t.int_value()));
      break;
    case Term::Kind::Atom:
      mix(std::hash<std::string>{}(t.name()));
      break;
    case Term::Kind::Compound:
      mix(std::hash<std::string>{}(t.name()));
      for (const Term& a : t.args()) mix((*this)(a));
      break;
  }
  return h;
}

}  // namespace prologi
