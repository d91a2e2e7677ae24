#include "prologi/engine.hpp"

#include <algorithm>

#include "prologi/syntax.hpp"

namespace prologi {

void SolveOptions::validate() const {
  if (depth_limit && *depth_limit == 0) throw std::invalid_argument("depth limit must be at least 1");
  if (max_solutions && *max_solutions == 0) throw std::invalid_argument("max solutions must be at least 1");
}

Substitution Answer::substitution() const {
  Substitution::Map m;
  for (const auto& [v, t] : bindings) m.emplace(v, t);
  return Substitution::from_idempotent(std::move(m));
}

std::vector<std::pair<std::string, std::string>> rendered_bindings(const Answer& a) {
  VarNames names;
  for (const auto& [v, t] : a.bindings) {
    names.add(v);
    names.add(t);
  }
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(a.bindings.size());
  for (const auto& [v, t] : a.bindings) out.emplace_back(names.name_of(v), render(t, names));
  return out;
}

std::vector<ScriptEntry> to_script(const std::vector<InteractionRecord>& transcript) {
  std::vector<ScriptEntry> out;
  out.reserve(transcript.size());
  for (const InteractionRecord& r : transcript) {
    ScriptEntry e;
    if (r.kind == InteractionRecord::Kind::Choose) {
      e.kind = ScriptEntry::Kind::Choose;
      e.index = std::stoul(r.response);
    } else {
      e.kind = ScriptEntry::Kind::Read;
      e.term_text = r.response;
    }
    e.line = out.size() + 1;
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

bool reportable(const Var& v) { return !v.name.starts_with('_'); }

}  // namespace

Solver::Solver(const Program& program, const Goal& query, InteractionHandler& handler, SolveOptions options)
    : program_(program), handler_(handler), options_(options), supply_(max_serial(query) + 1) {
  options_.validate();
  for (const Var& v : free_vars(query)) {
    if (reportable(v)) query_vars_.push_back(v);
  }
  State initial;
  initial.answer.reserve(query_vars_.size());
  for (const Var& v : query_vars_) initial.answer.push_back(Term::var(v));
  initial.goals.push_back(Pending{instantiate_query(query, supply_), 1});
  current_ = std::move(initial);
}

std::optional<Answer> Solver::next() {
  if (done_) return std::nullopt;
  if (options_.max_solutions && answers_ >= *options_.max_solutions) {
    done_ = true;
    return std::nullopt;
  }
  for (;;) {
    if (!current_) {
      if (!resume()) {
        done_ = true;
        return std::nullopt;
      }
      continue;
    }
    if (current_->goals.empty()) {
      Answer answer;
      for (std::size_t i = 0; i < query_vars_.size(); ++i) {
        const Term& image = current_->answer[i];
        if (image.is_var() && image.as_var() == query_vars_[i]) continue;
        answer.bindings.emplace_back(query_vars_[i], image);
      }
      answer.transcript = transcript_;
      current_.reset();
      ++answers_;
      return answer;
    }
    State state = std::move(*current_);
    current_.reset();
    Pending pending = std::move(state.goals.back());
    state.goals.pop_back();
    reduce_goal(std::move(state), std::move(pending));
  }
}

// Leaves the continuation in current_, or nothing when the branch fails.
void Solver::reduce_goal(State state, Pending pending) {
  const Goal& goal = pending.goal;
  switch (goal.kind()) {
    case Goal::Kind::Conj:
      state.goals.push_back(Pending{goal.right(), pending.depth});
      state.goals.push_back(Pending{goal.left(), pending.depth});
      current_ = std::move(state);
      return;

    case Goal::Kind::Exists: {
      // The witness is left open and found by unification.
      Substitution witness;
      witness.bind(goal.binder(), Term::var(supply_.fresh(goal.binder().name)));
      state.goals.push_back(Pending{apply(witness, goal.body()), pending.depth});
      current_ = std::move(state);
      return;
    }

    case Goal::Kind::Read: {
      if (!claim(goal)) return;
      Term typed = Term::atom("true");
      try {
        typed = handler_.read_term(goal.binder().name);
      } catch (const InteractionError& e) {
        if (e.kind() != InteractionError::Kind::Input) throw;
        ++input_failures_;
        return;
      }
      transcript_.push_back({InteractionRecord::Kind::Read, {goal.binder().name}, render(typed)});
      // Variables typed by the user are fresh.
      Substitution input;
      input.bind(goal.binder(), fresh_rename(typed, supply_));
      state.goals.push_back(Pending{apply(input, goal.body()), pending.depth});
      current_ = std::move(state);
      return;
    }

    case Goal::Kind::Uchoose: {
      if (!claim(goal)) return;
      const std::size_t index = ask_choice(goal.alternatives());
      if (options_.choice_policy == ChoicePolicy::Retry) {
        std::vector<Goal> untried = goal.alternatives();
        untried.erase(untried.begin() + static_cast<std::ptrdiff_t>(index - 1));
        stack_.emplace_back(RetryPoint{state, std::move(untried), pending.depth, answers_});
      }
      enter_alternative(std::move(state), goal.alternatives()[index - 1], pending.depth);
      return;
    }

    case Goal::Kind::Atom: {
      const Term& head = goal.head();
      if (head.is_var()) {
        throw SolveError(SolveError::Kind::Instantiation,
                         "instantiation error: predicate variable " + render(head) + " is unbound at call time");
      }
      Term atom = head;
      if (!goal.args().empty()) {
        if (!head.is_atom()) {
          throw SolveError(SolveError::Kind::Type, "type error: " + render(head) + " cannot be applied to arguments");
        }
        atom = Term::compound(head.name(), goal.args());
      } else if (!head.is_callable()) {
        throw SolveError(SolveError::Kind::Type, "type error: " + render(head) + " is not callable");
      }
      if (options_.depth_limit && pending.depth > *options_.depth_limit) {
        truncated_ = true;
        return;
      }
      const auto* candidates = &program_.candidates(predicate_of(atom));
      backchain(ClausePoint{std::move(state), std::move(atom), pending.depth, candidates, 0});
      return;
    }
  }
}

// Tries candidate clauses from point.next on; the first whose renamed head
// unifies becomes current_, and the point is kept for the later ones.
bool Solver::backchain(ClausePoint point) {
  const auto& candidates = *point.candidates;
  while (point.next < candidates.size()) {
    const Clause& clause = program_.clauses()[candidates[point.next]];
    ++point.next;
    Clause instance = fresh_rename(clause, supply_);
    auto mgu = unify(point.atom, instance.head, options_.occurs_check);
    if (!mgu) continue;
    State state = point.next < candidates.size() ? point.rest : std::move(point.rest);
    if (instance.body) state.goals.push_back(Pending{std::move(*instance.body), point.depth + 1});
    apply_to(*mgu, state);
    if (point.next < candidates.size()) stack_.emplace_back(std::move(point));
    current_ = std::move(state);
    return true;
  }
  return false;
}

bool Solver::resume() {
  while (!stack_.empty()) {
    auto top = std::move(stack_.back());
    stack_.pop_back();
    if (auto* point = std::get_if<ClausePoint>(&top)) {
      if (backchain(std::move(*point))) return true;
      continue;
    }
    auto& retry = std::get<RetryPoint>(top);
    // Only a branch that produced nothing is offered again.
    if (answers_ > retry.answers_before || retry.untried.empty()) continue;
    const std::size_t index = ask_choice(retry.untried);
    Goal chosen = retry.untried[index - 1];
    retry.untried.erase(retry.untried.begin() + static_cast<std::ptrdiff_t>(index - 1));
    if (!retry.untried.empty()) stack_.emplace_back(RetryPoint{retry.rest, retry.untried, retry.depth, answers_});
    enter_alternative(std::move(retry.rest), chosen, retry.depth);
    return true;
  }
  return false;
}

void Solver::enter_alternative(State state, const Goal& alternative, std::size_t depth) {
  state.goals.push_back(Pending{alternative, depth});
  current_ = std::move(state);
}

std::size_t Solver::ask_choice(const std::vector<Goal>& alternatives) {
  std::vector<std::string> menu = render_all(alternatives);
  const std::size_t index = handler_.choose(menu);
  if (index < 1 || index > alternatives.size()) {
    throw InteractionError(InteractionError::Kind::OutOfRange,
                           "choice " + std::to_string(index) + " out of range 1.." + std::to_string(alternatives.size()));
  }
  transcript_.push_back({InteractionRecord::Kind::Choose, std::move(menu), std::to_string(index)});
  return index;
}

bool Solver::claim(const Goal& interaction) {
  if (interaction.instance() == 0) return true;
  return consumed_.insert(interaction.instance()).second;
}

void Solver::apply_to(const Substitution& s, State& state) {
  if (s.empty()) return;
  for (Pending& p : state.goals) p.goal = apply(s, p.goal);
  for (Term& t : state.answer) t = apply(s, t);
}

Solver solve(const Program& program, const Goal& query, InteractionHandler& handler, SolveOptions options) {
  return Solver(program, query, handler, options);
}

std::vector<Answer> solve_all(const Program& program, const Goal& query, InteractionHandler& handler,
                              SolveOptions options) {
  Solver solver(program, query, handler, options);
  std::vector<Answer> out;
  while (auto a = solver.next()) out.push_back(std::move(*a));
  return out;
}

}  // namespace prologi
