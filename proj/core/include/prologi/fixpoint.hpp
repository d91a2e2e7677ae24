#pragma once

#include <set>
#include <stdexcept>

#include "prologi/program.hpp"
#include "prologi/term.hpp"

namespace prologi {

/// Thrown for programs outside the oracle's reach: clause bodies with
/// interactions or flex goals, or arguments that are compound terms other
/// than `H:M` constants.
class OracleScopeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LeastModel {
  std::set<Term> atoms;
  /// Constants of the program, i.e. the Herbrand universe.
  std::set<Term> universe;
  /// Number of immediate-consequence rounds that added something. Every
  /// atom of the model has a proof tree no deeper than this.
  std::size_t stages = 0;
};

/// Naive bottom-up least fixpoint over the finite Herbrand base.
LeastModel least_model(const Program& program);

/// The ground atoms of the least model.
std::set<Term> fixpoint_oracle(const Program& program);

}  // namespace prologi
