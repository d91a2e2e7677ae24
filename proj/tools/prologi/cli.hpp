#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prologi/engine.hpp"

namespace prologi::cli {

enum class Mode { Repl, Batch, Serve };

struct CliConfig {
  Mode mode = Mode::Batch;
  std::optional<std::string> program_path;
  std::optional<std::string> goal_text;
  std::optional<std::string> script_path;
  SolveOptions solve;
  std::string endpoint = "stdio";
};

/// `Var = term` lines, or `true` for an answer without bindings.
std::string format_answer(const Answer& answer);

/// Prints every answer followed by a blank line, then `yes` or `no`.
/// Returns 0 when at least one answer was found, 1 when none, 2 on error.
int run_batch(const CliConfig& config, std::ostream& out, std::ostream& err);

/// `?- goal.` loop. After an answer `;` asks for the next one and an empty
/// line stops.
int run_repl(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

int run_serve(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

/// Parses the command line and dispatches.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace prologi::cli
