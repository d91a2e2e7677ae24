#include "testkit.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "prologi/fixpoint.hpp"
#include "prologi/syntax.hpp"

#ifndef PROLOGI_CORPUS_DIR
#define PROLOGI_CORPUS_DIR "corpus"
#endif

namespace prologi::testkit {

void SuiteResult::fail(std::string what) {
  if (failures++ == 0) first_failure = std::move(what);
}

namespace {

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick_from(Rng& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

Term time_term(std::int64_t h, std::int64_t m) { return Term::compound(":", {Term::integer(h), Term::integer(m, 2)}); }

}  // namespace

// --- answers ---------------------------------------------------------------

std::string canonical(const Answer& a) {
  auto bindings = a.bindings;
  std::sort(bindings.begin(), bindings.end(),
            [](const auto& x, const auto& y) { return x.first.name < y.first.name; });
  Substitution::Map renames;
  std::size_t k = 0;
  for (const auto& binding : bindings) {
    for (const Var& v : vars_of(binding.second)) {
      if (v.serial != 0 && !renames.contains(v)) renames.emplace(v, Term::var("_" + std::to_string(++k)));
    }
  }
  const auto s = Substitution::from_idempotent(std::move(renames));
  std::string out;
  for (const auto& [v, t] : bindings) {
    if (!out.empty()) out += ", ";
    out += v.name + " = " + render(apply(s, t));
  }
  return out.empty() ? "true" : out;
}

std::vector<std::string> canonical(const std::vector<Answer>& answers) {
  std::vector<std::string> out;
  for (const Answer& a : answers) out.push_back(canonical(a));
  return out;
}

std::vector<Answer> solve_with(const Program& p, const Goal& g, const std::vector<ScriptEntry>& script,
                               const SolveOptions& opts) {
  auto handler = make_scripted_handler(script);
  return solve_all(p, g, handler, opts);
}

ScriptEntry choose(std::size_t k) { return ScriptEntry{ScriptEntry::Kind::Choose, k, {}, 0}; }
ScriptEntry read(std::string term_text) { return ScriptEntry{ScriptEntry::Kind::Read, 0, std::move(term_text), 0}; }

// --- generators ------------------------------------------------------------

Term random_term(Rng& rng, int depth, bool allow_serials) {
  static const std::vector<std::string> var_names{"X", "Y", "Z", "U", "V"};
  static const std::vector<std::string> atoms{"a", "b", "c"};
  const std::size_t roll = pick(rng, depth > 0 ? 10 : 6);
  if (roll < 3) {
    const std::uint64_t serial = allow_serials && chance(rng, 0.2) ? 1 + pick(rng, 3) : 0;
    return Term::var(pick_from(rng, var_names), serial);
  }
  if (roll < 5) return Term::atom(pick_from(rng, atoms));
  if (roll < 6) return Term::integer(static_cast<std::int64_t>(pick(rng, 4)) - 1);
  static const std::vector<std::pair<std::string, std::size_t>> functors{{"f", 1}, {"g", 2}, {"h", 3}, {"g", 2}};
  const auto& [name, arity] = pick_from(rng, functors);
  std::vector<Term> args;
  for (std::size_t i = 0; i < arity; ++i) args.push_back(random_term(rng, depth - 1, allow_serials));
  return Term::compound(name, std::move(args));
}

Term random_syntax_term(Rng& rng, int depth) {
  static const std::vector<std::string> var_names{"X", "Y", "Dt", "At", "Long_name1", "_Hidden"};
  static const std::vector<std::string> atoms{"a",      "panam", "nil",        "x_1",  "Hello", "two words", "read",
                                              "uchoose", "[]",   "it's",       "a\\b", "",      "9lives",    ":-"};
  const std::size_t roll = pick(rng, depth > 0 ? 12 : 8);
  if (roll < 2) return Term::var(pick_from(rng, var_names));
  if (roll < 4) return Term::atom(pick_from(rng, atoms));
  if (roll < 5) return Term::integer(static_cast<std::int64_t>(pick(rng, 2000)) - 1000);
  if (roll < 6) return Term::integer(static_cast<std::int64_t>(pick(rng, 60)), 2);
  if (roll < 8) return time_term(static_cast<std::int64_t>(pick(rng, 24)), static_cast<std::int64_t>(pick(rng, 60)));
  if (roll < 9 && depth > 0) {
    // Nested `:` on either side.
    return Term::compound(":", {random_syntax_term(rng, depth - 1), random_syntax_term(rng, depth - 1)});
  }
  std::vector<Term> args;
  const std::size_t arity = 1 + pick(rng, 3);
  for (std::size_t i = 0; i < arity; ++i) args.push_back(random_syntax_term(rng, depth - 1));
  return Term::compound(pick_from(rng, atoms), std::move(args));
}

namespace {

Goal random_syntax_atom_goal(Rng& rng) {
  const std::size_t roll = pick(rng, 6);
  if (roll == 0) {
    std::vector<Term> args;
    for (std::size_t i = 0, n = pick(rng, 3); i < n; ++i) args.push_back(random_syntax_term(rng, 1));
    return Goal::atom(Term::var(chance(rng, 0.5) ? "P" : "Carrier"), std::move(args));
  }
  Term t = random_syntax_term(rng, 2);
  while (!t.is_callable() || t.name() == ":") t = random_syntax_term(rng, 2);
  return Goal::call(t);
}

}  // namespace

Goal random_syntax_goal(Rng& rng, int depth) {
  if (depth <= 0) return random_syntax_atom_goal(rng);
  switch (pick(rng, 6)) {
    case 0:
      return Goal::conj(random_syntax_goal(rng, depth - 1), random_syntax_goal(rng, depth - 1));
    case 1:
      return Goal::exists(Var{chance(rng, 0.5) ? "X" : "E"}, random_syntax_goal(rng, depth - 1));
    case 2:
      return Goal::read(Var{chance(rng, 0.5) ? "X" : "R"}, random_syntax_goal(rng, depth - 1));
    case 3: {
      std::vector<Goal> alts;
      for (std::size_t i = 0, n = 2 + pick(rng, 3); i < n; ++i) alts.push_back(random_syntax_goal(rng, depth - 1));
      return Goal::uchoose(std::move(alts));
    }
    default:
      return random_syntax_atom_goal(rng);
  }
}

Program random_syntax_program(Rng& rng) {
  std::vector<Clause> clauses;
  for (std::size_t i = 0, n = pick(rng, 6); i < n; ++i) {
    Term head = random_syntax_term(rng, 2);
    while (!head.is_callable()) head = random_syntax_term(rng, 2);
    std::optional<Goal> body;
    if (chance(rng, 0.6)) body = random_syntax_goal(rng, 2);
    clauses.push_back(Clause{std::move(head), std::move(body)});
  }
  return Program(std::move(clauses));
}

namespace {

Term datalog_arg(Rng& rng, const Signature& sig, double var_chance) {
  static const std::vector<std::string> vars{"X", "Y", "Z"};
  if (sig.constants.empty() || chance(rng, var_chance)) return Term::var(pick_from(rng, vars));
  return pick_from(rng, sig.constants);
}

Term datalog_atom(Rng& rng, const Signature& sig, double var_chance) {
  const auto& [name, arity] = pick_from(rng, sig.predicates);
  if (arity == 0) return Term::atom(name);
  std::vector<Term> args;
  for (std::size_t i = 0; i < arity; ++i) args.push_back(datalog_arg(rng, sig, var_chance));
  return Term::compound(name, std::move(args));
}

Goal datalog_goal(Rng& rng, const Signature& sig) {
  Goal g = Goal::call(datalog_atom(rng, sig, 0.6));
  if (chance(rng, 0.4)) g = Goal::conj(std::move(g), Goal::call(datalog_atom(rng, sig, 0.6)));
  return g;
}

}  // namespace

Program random_datalog(Rng& rng, Signature& sig, std::size_t max_constants, std::size_t max_clauses) {
  static const std::vector<std::string> names{"p", "q", "r", "s"};
  static const std::vector<Term> pool{Term::atom("a"), Term::atom("b"), Term::atom("c"), Term::atom("d"),
                                      Term::atom("e"), Term::integer(7), time_term(9, 0),  Term::atom("h")};
  sig = Signature{};
  for (std::size_t i = 0, n = 1 + pick(rng, names.size()); i < n; ++i) sig.predicates.emplace_back(names[i], pick(rng, 3));
  std::vector<Term> constants = pool;
  std::shuffle(constants.begin(), constants.end(), rng);
  constants.erase(constants.begin() + static_cast<std::ptrdiff_t>(1 + pick(rng, std::min(max_constants, pool.size()))),
                  constants.end());
  sig.constants = constants;

  std::vector<Clause> clauses;
  for (std::size_t i = 0, n = 1 + pick(rng, max_clauses); i < n; ++i) {
    Term head = datalog_atom(rng, sig, 0.4);
    const std::size_t body_size = pick(rng, 5) < 2 ? 0 : 1 + pick(rng, 2);
    std::optional<Goal> body;
    for (std::size_t j = 0; j < body_size; ++j) {
      Goal atom = Goal::call(datalog_atom(rng, sig, 0.6));
      body = body ? Goal::conj(std::move(*body), std::move(atom)) : std::move(atom);
    }
    clauses.push_back(Clause{std::move(head), std::move(body)});
  }
  return Program(std::move(clauses));
}

Goal random_query_atom(Rng& rng, const Signature& sig, bool open) {
  const auto& [name, arity] = pick_from(rng, sig.predicates);
  if (arity == 0) return Goal::call(Term::atom(name));
  std::vector<Term> args;
  for (std::size_t i = 0; i < arity; ++i) {
    if (open || sig.constants.empty() || chance(rng, 0.5)) {
      args.push_back(Term::var(i == 0 ? "A" : (chance(rng, 0.3) ? "A" : "B")));
    } else {
      args.push_back(pick_from(rng, sig.constants));
    }
  }
  return Goal::call(Term::compound(name, std::move(args)));
}

// --- property suites -------------------------------------------------------

namespace {

bool is_variant(const Term& a, const Term& b, std::map<Var, Var>& fwd, std::map<Var, Var>& back) {
  if (a.is_var() && b.is_var()) {
    auto [f, fi] = fwd.emplace(a.as_var(), b.as_var());
    auto [r, ri] = back.emplace(b.as_var(), a.as_var());
    return f->second == b.as_var() && r->second == a.as_var();
  }
  if (a.kind() != b.kind()) return false;
  if (!a.is_compound()) return a == b;
  if (a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!is_variant(a.args()[i], b.args()[i], fwd, back)) return false;
  }
  return true;
}

bool is_variant(const Term& a, const Term& b) {
  std::map<Var, Var> fwd, back;
  return is_variant(a, b, fwd, back);
}

Term random_ground(Rng& rng, int depth) {
  Term t = random_term(rng, depth, false);
  while (!t.is_ground()) t = random_term(rng, depth, false);
  return t;
}

// Replaces random subterms of `g` by variables, recording what each stands
// for; a variable always stands for the same subterm.
Term generalize(Rng& rng, const Term& g, std::map<Var, Term>& meaning) {
  static const std::vector<std::string> names{"X", "Y", "Z", "U", "V", "W"};
  if (chance(rng, 0.3)) {
    const Var v{pick_from(rng, names), pick(rng, 2)};
    auto [it, inserted] = meaning.emplace(v, g);
    if (inserted || it->second == g) return Term::var(v);
  }
  if (!g.is_compound()) return g;
  std::vector<Term> args;
  for (const Term& a : g.args()) args.push_back(generalize(rng, a, meaning));
  return Term::compound(g.name(), std::move(args));
}

Term embed(Rng& rng, const Term& inner, int depth) {
  if (depth == 0) return Term::compound("f", {inner});
  std::vector<Term> args{inner, random_term(rng, 1)};
  if (chance(rng, 0.5)) std::swap(args[0], args[1]);
  return Term::compound("g", {embed(rng, Term::compound("h", {args[0], args[1], Term::atom("a")}), depth - 1)});
}

std::string show(const Term& a, const Term& b) { return render(a) + " =? " + render(b); }

void check_pair(SuiteResult& r, Rng& rng, const Term& a, const Term& b, const std::map<Var, Term>* witness,
                bool expect_cycle) {
  ++r.cases;
  const auto ab = unify(a, b);
  const auto ba = unify(b, a);
  const auto ab_oc = unify(a, b, true);
  if (ab.has_value() != ba.has_value()) return r.fail("symmetry of success: " + show(a, b));
  if (ab != ab_oc) return r.fail("occurs check changed the outcome: " + show(a, b));
  if (expect_cycle && ab) return r.fail("cyclic pair unified: " + show(a, b));
  if (witness && !ab) return r.fail("unifiable pair rejected: " + show(a, b));
  if (!ab) return;
  const Substitution& s = *ab;
  const Term sa = apply(s, a);
  if (sa != apply(s, b)) return r.fail("mgu does not unify: " + show(a, b) + " with " + render(s));
  if (!is_variant(sa, apply(*ba, a))) return r.fail("symmetric mgus differ: " + show(a, b));
  std::set<Var> vars;
  for (const Var& v : vars_of(a)) vars.insert(v);
  for (const Var& v : vars_of(b)) vars.insert(v);
  for (const auto& [v, t] : s) {
    if (!vars.contains(v)) return r.fail("binding for a foreign variable: " + render(s));
    for (const auto& [w, u] : s) {
      if (occurs_in(v, u)) return r.fail("not idempotent: " + render(s));
    }
  }
  const Term probe = Term::compound("t", {a, b, random_term(rng, 2)});
  if (apply(s, apply(s, probe)) != apply(s, probe)) return r.fail("apply twice differs: " + render(s));
  if (witness) {
    const auto theta = Substitution::from_idempotent(Substitution::Map(witness->begin(), witness->end()));
    for (const Var& v : vars) {
      if (apply(theta, apply(s, Term::var(v))) != apply(theta, Term::var(v))) {
        return r.fail("mgu not more general than a known unifier: " + show(a, b));
      }
    }
  }
}

}  // namespace

SuiteResult unification_suite(std::uint64_t seed, std::size_t pairs) {
  Rng rng(seed);
  SuiteResult r;
  for (std::size_t i = 0; i < pairs; ++i) {
    try {
      switch (i % 4) {
        case 0:
        case 1:
          check_pair(r, rng, random_term(rng, 3), random_term(rng, 3), nullptr, false);
          break;
        case 2: {
          const Term g = random_ground(rng, 3);
          std::map<Var, Term> meaning;
          const Term a = generalize(rng, g, meaning);
          const Term b = generalize(rng, g, meaning);
          check_pair(r, rng, a, b, &meaning, false);
          break;
        }
        case 3: {
          const Term v = Term::var("X", pick(rng, 2));
          const Term cyclic = embed(rng, v, static_cast<int>(pick(rng, 3)));
          if (chance(rng, 0.5)) {
            check_pair(r, rng, v, cyclic, nullptr, true);
          } else {
            check_pair(r, rng, Term::compound("k", {v, cyclic}), Term::compound("k", {cyclic, v}), nullptr, true);
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
  }
  return r;
}

SuiteResult parser_roundtrip_suite(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  SuiteResult r;
  for (std::size_t i = 0; i < cases; ++i) {
    std::string text;
    try {
      ++r.cases;
      const Term t = random_syntax_term(rng, 3);
      text = render(t);
      if (parse_term(text) != t) r.fail("term: " + text);

      ++r.cases;
      const Goal g = random_syntax_goal(rng, 3);
      text = render(g);
      if (parse_goal(text) != g) r.fail("goal: " + text);

      ++r.cases;
      const Program p = random_syntax_program(rng);
      text = render(p);
      if (parse_program(text).clauses() != p.clauses()) r.fail("program: " + text);
    } catch (const std::exception& e) {
      r.fail("exception on `" + text + "`: " + e.what());
    }
  }
  return r;
}

SuiteResult choice_suite(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  SuiteResult r;
  SolveOptions opts;
  opts.depth_limit = 4;
  opts.max_solutions = 25;
  for (std::size_t i = 0; i < cases; ++i) {
    Signature sig;
    const Program p = random_datalog(rng, sig, 6, 8);
    std::vector<Goal> alts;
    const std::size_t n = 2 + pick(rng, 3);
    const std::size_t chosen = 1 + pick(rng, n);
    std::vector<ScriptEntry> inner;
    for (std::size_t k = 1; k <= n; ++k) {
      Goal g = datalog_goal(rng, sig);
      if (chance(rng, 0.15)) g = Goal::exists(Var{"X"}, std::move(g));
      if (k == chosen && chance(rng, 0.2)) {
        g = Goal::read(Var{"Y"}, std::move(g));
        inner.push_back(read(render(pick_from(rng, sig.constants))));
      }
      alts.push_back(std::move(g));
    }
    const Goal choice = Goal::uchoose(alts);
    std::vector<ScriptEntry> script{choose(chosen)};
    script.insert(script.end(), inner.begin(), inner.end());
    try {
      ++r.cases;
      const auto via_choice = canonical(solve_with(p, choice, script, opts));
      const auto direct = canonical(solve_with(p, alts[chosen - 1], inner, opts));
      if (via_choice != direct) {
        r.fail("choice " + std::to_string(chosen) + " of " + render(choice) + "\nprogram:\n" + render(p));
      }
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what() + " on " + render(choice));
    }
  }
  return r;
}

SuiteResult read_suite(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  SuiteResult r;
  SolveOptions opts;
  opts.depth_limit = 4;
  opts.max_solutions = 25;
  for (std::size_t i = 0; i < cases; ++i) {
    Signature sig;
    const Program p = random_datalog(rng, sig, 6, 8);
    const Goal body = datalog_goal(rng, sig);
    const Var binder = pick_from(rng, free_vars(body).empty() ? std::vector<Var>{Var{"X"}} : free_vars(body));
    Term typed = pick_from(rng, sig.constants);
    if (chance(rng, 0.2)) typed = Term::compound("f", {typed, Term::atom("b")});
    const Goal goal = Goal::read(binder, body);
    Substitution s;
    s.bind(binder, typed);
    try {
      ++r.cases;
      const auto via_read = canonical(solve_with(p, goal, {read(render(typed))}, opts));
      const auto direct = canonical(solve_with(p, apply(s, body), {}, opts));
      if (via_read != direct) r.fail("read " + render(typed) + " in " + render(goal) + "\nprogram:\n" + render(p));
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what() + " on " + render(goal));
    }
  }
  return r;
}

namespace {

void ground_over(const Term& t, const std::vector<Term>& universe, std::set<Term>& out) {
  const auto vars = vars_of(t);
  if (vars.empty()) {
    out.insert(t);
    return;
  }
  if (universe.empty()) return;
  std::vector<std::size_t> odometer(vars.size(), 0);
  for (;;) {
    Substitution::Map m;
    for (std::size_t i = 0; i < vars.size(); ++i) m.emplace(vars[i], universe[odometer[i]]);
    out.insert(apply(Substitution::from_idempotent(std::move(m)), t));
    std::size_t i = 0;
    while (i < odometer.size() && ++odometer[i] == universe.size()) odometer[i++] = 0;
    if (i == odometer.size()) return;
  }
}

std::string show_set(const std::set<Term>& s) {
  std::string out = "{";
  for (const Term& t : s) out += (out.size() > 1 ? ", " : "") + render(t);
  return out + "}";
}

}  // namespace

SuiteResult oracle_suite(std::uint64_t seed, std::size_t programs) {
  Rng rng(seed);
  SuiteResult r;
  for (std::size_t i = 0; i < programs; ++i) {
    Signature sig;
    const Program p = random_datalog(rng, sig, 8, 10);
    const LeastModel model = least_model(p);
    const std::vector<Term> universe(model.universe.begin(), model.universe.end());
    Signature query_sig = sig;
    query_sig.constants = universe;
    SolveOptions opts;
    opts.depth_limit = std::max<std::size_t>(model.stages, 1);

    std::vector<Goal> queries;
    for (const auto& [name, arity] : sig.predicates) {
      Signature one{{{name, arity}}, query_sig.constants};
      queries.push_back(random_query_atom(rng, one, true));
      queries.push_back(random_query_atom(rng, one, false));
    }
    for (const Goal& q : queries) {
      ++r.cases;
      try {
        const Term atom = q.callable();
        std::set<Term> expected;
        for (const Term& m : model.atoms) {
          if (unify(atom, m)) expected.insert(m);
        }
        std::set<Term> found;
        for (const Answer& a : solve_with(p, q, {}, opts)) ground_over(apply(a.substitution(), atom), universe, found);
        if (found != expected) {
          r.fail("query " + render(q) + "\nprogram:\n" + render(p) + "solve:  " + show_set(found) +
                 "\noracle: " + show_set(expected));
        }
      } catch (const std::exception& e) {
        r.fail(std::string("exception: ") + e.what() + " on " + render(q) + "\nprogram:\n" + render(p));
      }
    }
  }
  return r;
}

namespace {

// A query mixing plain atoms with interactions answered from `script`.
Goal interactive_query(Rng& rng, const Signature& sig, std::vector<ScriptEntry>& script) {
  Goal g = datalog_goal(rng, sig);
  if (chance(rng, 0.5)) {
    const std::size_t k = 1 + pick(rng, 2);
    g = Goal::uchoose({std::move(g), datalog_goal(rng, sig)});
    script.push_back(choose(k));
  }
  if (chance(rng, 0.5)) {
    g = Goal::read(Var{"X"}, std::move(g));
    script.insert(script.begin(), read(render(pick_from(rng, sig.constants))));
  }
  return g;
}

std::vector<std::string> raw(const std::vector<Answer>& answers) {
  std::vector<std::string> out;
  for (const Answer& a : answers) {
    std::string line;
    for (const auto& [name, text] : rendered_bindings(a)) line += name + "=" + text + ";";
    for (const auto& rec : a.transcript) line += "|" + rec.response;
    out.push_back(line);
  }
  return out;
}

}  // namespace

SuiteResult determinism_suite(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  SuiteResult r;
  SolveOptions opts;
  opts.depth_limit = 4;
  opts.max_solutions = 30;
  for (std::size_t i = 0; i < cases; ++i) {
    Signature sig;
    const Program p = random_datalog(rng, sig, 6, 8);
    std::vector<ScriptEntry> script;
    const Goal q = interactive_query(rng, sig, script);
    ++r.cases;
    try {
      const auto first = raw(solve_with(p, q, script, opts));
      const auto second = raw(solve_with(p, q, script, opts));
      if (first != second) r.fail("two runs differ on " + render(q));
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what() + " on " + render(q));
    }
  }
  return r;
}

SuiteResult depth_monotonicity_suite(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  SuiteResult r;
  for (std::size_t i = 0; i < cases; ++i) {
    Signature sig;
    const Program p = random_datalog(rng, sig, 6, 5);
    const Goal q = datalog_goal(rng, sig);
    ++r.cases;
    try {
      std::set<std::string> previous;
      for (std::size_t d = 1; d <= 3; ++d) {
        SolveOptions opts;
        opts.depth_limit = d;
        const auto answers = canonical(solve_with(p, q, {}, opts));
        const std::set<std::string> current(answers.begin(), answers.end());
        if (!std::includes(current.begin(), current.end(), previous.begin(), previous.end())) {
          r.fail("depth " + std::to_string(d) + " lost answers of depth " + std::to_string(d - 1) + " for " +
                 render(q) + "\nprogram:\n" + render(p));
          break;
        }
        previous = current;
      }
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what() + " on " + render(q));
    }
  }
  return r;
}

SuiteResult soundness_suite(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  SuiteResult r;
  SolveOptions opts;
  opts.depth_limit = 4;
  opts.max_solutions = 5;
  for (std::size_t i = 0; i < cases; ++i) {
    Signature sig;
    const Program p = random_datalog(rng, sig, 6, 8);
    std::vector<ScriptEntry> script;
    const Goal q = interactive_query(rng, sig, script);
    try {
      for (const Answer& a : solve_with(p, q, script, opts)) {
        ++r.cases;
        const Goal instance = apply(a.substitution(), q);
        SolveOptions again = opts;
        again.max_solutions = 500;
        const auto replay = solve_with(p, instance, to_script(a.transcript), again);
        const bool trivial = std::any_of(replay.begin(), replay.end(), [](const Answer& b) {
          std::set<Var> targets;
          for (const auto& [v, t] : b.bindings) {
            if (!t.is_var() || !targets.insert(t.as_var()).second) return false;
          }
          return true;
        });
        if (!trivial) r.fail("answer " + canonical(a) + " of " + render(q) + " not reproduced\nprogram:\n" + render(p));
      }
    } catch (const std::exception& e) {
      ++r.cases;
      r.fail(std::string("exception: ") + e.what() + " on " + render(q));
    }
  }
  return r;
}

// --- shipped corpus ----------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

std::string trimmed(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<CorpusCase> load_cases(const std::string& dir) {
  std::istringstream in(read_file(dir + "/cases.txt"));
  std::vector<CorpusCase> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trimmed(line).empty() || trimmed(line)[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
      const auto bar = line.find(" | ", start);
      if (bar == std::string::npos) throw std::runtime_error("bad manifest line: " + line);
      fields.push_back(trimmed(line.substr(start, bar - start)));
      start = bar + 3;
    }
    fields.push_back(trimmed(line.substr(start)));
    CorpusCase c;
    c.name = fields[0];
    c.program = dir + "/" + fields[1];
    c.script = fields[2] == "-" ? "" : dir + "/" + fields[2];
    c.goal = fields[3];
    c.golden = dir + "/golden/" + c.name + ".out";
    out.push_back(std::move(c));
  }
  return out;
}

std::string batch_output(const CorpusCase& c, int* exit_code) {
  cli::CliConfig config;
  config.program_path = c.program;
  config.goal_text = c.goal;
  if (!c.script.empty()) config.script_path = c.script;
  std::ostringstream out, err;
  const int code = cli::run_batch(config, out, err);
  if (exit_code) *exit_code = code;
  return out.str();
}

std::string wire_output(const CorpusCase& c) {
  ScriptedClient client(read_file(c.program), c.goal,
                        c.script.empty() ? std::vector<ScriptEntry>{} : parse_script(read_file(c.script)));
  protocol::serve(client, protocol::ServeOptions{});
  return client.transcript();
}

ScriptedClient::ScriptedClient(std::string program_text, std::string goal, std::vector<ScriptEntry> script)
    : script_(std::move(script)) {
  protocol::Message load;
  load.type = protocol::Type::Load;
  load.program = std::move(program_text);
  protocol::Message query;
  query.type = protocol::Type::Query;
  query.goal = std::move(goal);
  outbox_.push_back(protocol::encode(load));
  outbox_.push_back(protocol::encode(query));
}

std::optional<std::string> ScriptedClient::read_line() {
  if (sent_ < outbox_.size()) return outbox_[sent_++];
  return std::nullopt;
}

void ScriptedClient::write_line(std::string_view line) {
  using protocol::Message;
  using protocol::Type;
  const Message m = protocol::decode(line);
  received_.push_back(m);
  if (finished_) return;
  auto reply = [&](Message out) {
    outstanding_.reset();
    outbox_.push_back(protocol::encode(out));
  };
  switch (m.type) {
    case Type::Choice:
    case Type::Read: {
      if (outstanding_) overlapping_ = true;
      outstanding_ = m.id;
      const auto wanted = m.type == Type::Choice ? ScriptEntry::Kind::Choose : ScriptEntry::Kind::Read;
      if (next_entry_ >= script_.size() || script_[next_entry_].kind != wanted) {
        finished_ = true;
        return;
      }
      const ScriptEntry& e = script_[next_entry_++];
      Message out;
      out.id = m.id;
      if (wanted == ScriptEntry::Kind::Choose) {
        out.type = Type::Choose;
        out.index = e.index;
      } else {
        out.type = Type::Term;
        out.text = e.term_text;
      }
      reply(std::move(out));
      return;
    }
    case Type::More: {
      Message out;
      out.type = Type::Next;
      reply(std::move(out));
      return;
    }
    case Type::Done:
      finished_ = true;
      return;
    default:
      return;
  }
}

std::string ScriptedClient::transcript() const {
  std::string out;
  bool any = false;
  for (const auto& m : received_) {
    if (m.type == protocol::Type::Error && !m.id) return out;
    if (m.type != protocol::Type::Solution) continue;
    any = true;
    if (m.bindings.empty()) out += "true\n";
    for (const auto& [name, text] : m.bindings) out += name + " = " + text + "\n";
    out += "\n";
  }
  return out + (any ? "yes\n" : "no\n");
}

}  // namespace prologi::testkit
