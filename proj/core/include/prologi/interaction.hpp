#pragma once

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "prologi/term.hpp"

namespace prologi {

/// How a goal consults the user. `choose` picks one of the rendered
/// alternatives (1-based); `read_term` returns the parsed term typed for a
/// variable. Both calls block the search.
class InteractionHandler {
 public:
  virtual ~InteractionHandler() = default;

  virtual std::size_t choose(const std::vector<std::string>& alternatives) = 0;
  virtual Term read_term(const std::string& variable_name) = 0;
};

/// Raised by handlers. `Input` is the only recoverable kind: the solver
/// treats it as failure of the read branch. Every other kind ends the run.
class InteractionError : public std::runtime_error {
 public:
  enum class Kind { Abort, ScriptExhausted, ScriptMismatch, OutOfRange, Input };

  InteractionError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// One line of an interaction script: `choose <k>` or `read <term>`.
struct ScriptEntry {
  enum class Kind { Choose, Read };
  Kind kind;
  std::size_t index = 0;
  std::string term_text;
  std::size_t line = 0;
};

/// Parses the script format: one directive per line, `#` comment lines and
/// blank lines ignored. Throws std::invalid_argument naming the bad line.
std::vector<ScriptEntry> parse_script(std::string_view text);
std::string render_script(const std::vector<ScriptEntry>& entries);

/// Replays scripted responses in order.
class ScriptedHandler : public InteractionHandler {
 public:
  explicit ScriptedHandler(std::vector<ScriptEntry> script);

  std::size_t choose(const std::vector<std::string>& alternatives) override;
  Term read_term(const std::string& variable_name) override;

  std::size_t consumed() const { return next_; }
  std::size_t remaining() const { return script_.size() - next_; }

 private:
  const ScriptEntry& take(ScriptEntry::Kind wanted, const std::string& request);

  std::vector<ScriptEntry> script_;
  std::size_t next_ = 0;
};

ScriptedHandler make_scripted_handler(std::vector<ScriptEntry> script);
ScriptedHandler make_scripted_handler(std::string_view script_text);

/// Terminal handler: numbered menu for choices, `X? ` prompt for reads.
/// A reply that does not parse is re-prompted up to `max_reprompts` times,
/// after which the read fails with an Input error.
class ConsoleHandler : public InteractionHandler {
 public:
  ConsoleHandler(std::istream& in, std::ostream& out, int max_reprompts = 3);

  std::size_t choose(const std::vector<std::string>& alternatives) override;
  Term read_term(const std::string& variable_name) override;

 private:
  std::istream& in_;
  std::ostream& out_;
  int max_reprompts_;
};

}  // namespace prologi
