#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prologi/interaction.hpp"
#include "prologi/program.hpp"
#include "prologi/substitution.hpp"

namespace prologi {

/// What happens when the branch picked at a uchoose fails to produce any
/// answer. `Fail` fails the whole uchoose; `Retry` asks again with the
/// alternatives that have not been tried yet.
enum class ChoicePolicy { Fail, Retry };

struct SolveOptions {
  bool occurs_check = false;
  /// Maximum derivation depth; query atoms sit at depth 1.
  std::optional<std::size_t> depth_limit;
  std::optional<std::size_t> max_solutions;
  ChoicePolicy choice_policy = ChoicePolicy::Fail;

  /// Throws std::invalid_argument when a present limit is zero.
  void validate() const;
};

struct InteractionRecord {
  enum class Kind { Choose, Read };
  Kind kind;
  /// Alternatives shown (choose) or the variable name (read).
  std::vector<std::string> prompt;
  /// Chosen 1-based index, or the term as typed.
  std::string response;

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

struct Answer {
  /// Bindings of the query's free variables, in first-occurrence order.
  /// Variables left unbound are omitted.
  std::vector<std::pair<Var, Term>> bindings;
  /// Every interaction of the run up to this answer, in the order asked.
  std::vector<InteractionRecord> transcript;

  Substitution substitution() const;
};

/// `Var = term` strings sharing one variable naming table.
std::vector<std::pair<std::string, std::string>> rendered_bindings(const Answer& a);

/// Script that replays a transcript.
std::vector<ScriptEntry> to_script(const std::vector<InteractionRecord>& transcript);

class SolveError : public std::runtime_error {
 public:
  enum class Kind { Instantiation, Type };

  SolveError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Lazy depth-first enumeration of the answers to one query.
///
/// Goals are reduced leftmost first; atoms are resolved against clauses in
/// textual order, each clause renamed apart before unification. Answers
/// are produced one per call to next(); handler calls happen inside
/// next() and block it. Interactions are never undone: once a read or
/// uchoose node has been answered, backtracking into it fails.
class Solver {
 public:
  Solver(const Program& program, const Goal& query, InteractionHandler& handler, SolveOptions options = {});

  std::optional<Answer> next();

  /// True once some branch was cut off by the depth limit.
  bool truncated() const { return truncated_; }
  /// Read requests whose replies were rejected by the handler.
  std::size_t input_failures() const { return input_failures_; }
  std::size_t answers_found() const { return answers_; }
  const std::vector<Var>& query_vars() const { return query_vars_; }
  const std::vector<InteractionRecord>& transcript() const { return transcript_; }

 private:
  struct Pending {
    Goal goal;
    std::size_t depth;
  };
  struct State {
    std::vector<Pending> goals;  // next goal at the back
    std::vector<Term> answer;    // current image of each query variable
  };
  struct ClausePoint {
    State rest;
    Term atom;
    std::size_t depth;
    const std::vector<std::size_t>* candidates;
    std::size_t next;
  };
  struct RetryPoint {
    State rest;
    std::vector<Goal> untried;
    std::size_t depth;
    std::size_t answers_before;
  };

  void reduce_goal(State state, Pending pending);
  bool backchain(ClausePoint point);
  bool resume();
  void enter_alternative(State state, const Goal& alternative, std::size_t depth);
  std::size_t ask_choice(const std::vector<Goal>& alternatives);
  bool claim(const Goal& interaction);
  static void apply_to(const Substitution& s, State& state);

  const Program& program_;
  InteractionHandler& handler_;
  SolveOptions options_;
  VarSupply supply_;
  std::vector<Var> query_vars_;
  std::optional<State> current_;
  std::vector<std::variant<ClausePoint, RetryPoint>> stack_;
  std::set<std::uint64_t> consumed_;
  std::vector<InteractionRecord> transcript_;
  std::size_t answers_ = 0;
  std::size_t input_failures_ = 0;
  bool truncated_ = false;
  bool done_ = false;
};

Solver solve(const Program& program, const Goal& query, InteractionHandler& handler, SolveOptions options = {});

/// Drains a solver (bounded by max_solutions when set).
std::vector<Answer> solve_all(const Program& program, const Goal& query, InteractionHandler& handler,
                              SolveOptions options = {});

}  // namespace prologi
