#include "prologi/interaction.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "prologi/syntax.hpp"

namespace prologi {

std::vector<ScriptEntry> parse_script(std::string_view text) {
  std::vector<ScriptEntry> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    auto bad = [&](const std::string& why) {
      return std::invalid_argument("script line " + std::to_string(line_no) + ": " + why);
    };
    ScriptEntry entry;
    entry.line = line_no;
    if (line.starts_with("choose ")) {
      const std::string_view k = line.substr(7);
      auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), entry.index);
      if (ec != std::errc() || ptr != k.data() + k.size() || entry.index == 0) {
        throw bad("expected a positive decimal index after 'choose'");
      }
      entry.kind = ScriptEntry::Kind::Choose;
    } else if (line.starts_with("read ")) {
      entry.kind = ScriptEntry::Kind::Read;
      entry.term_text = std::string(line.substr(5));
      try {
        parse_term(entry.term_text);
      } catch (const ParseError& e) {
        throw bad("unparsable term: " + std::string(e.what()));
      }
    } else {
      throw bad("expected 'choose <k>' or 'read <term>'");
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::string render_script(const std::vector<ScriptEntry>& entries) {
  std::string out;
  for (const ScriptEntry& e : entries) {
    out += e.kind == ScriptEntry::Kind::Choose ? "choose " + std::to_string(e.index) : "read " + e.term_text;
    out += '\n';
  }
  return out;
}

ScriptedHandler::ScriptedHandler(std::vector<ScriptEntry> script) : script_(std::move(script)) {}

const ScriptEntry& ScriptedHandler::take(ScriptEntry::Kind wanted, const std::string& request) {
  if (next_ >= script_.size()) {
    throw InteractionError(InteractionError::Kind::ScriptExhausted,
                           "script exhausted: no response left for " + request);
  }
  const ScriptEntry& e = script_[next_];
  if (e.kind != wanted) {
    throw InteractionError(InteractionError::Kind::ScriptMismatch,
                           "script line " + std::to_string(e.line) + " does not answer " + request);
  }
  ++next_;
  return e;
}

std::size_t ScriptedHandler::choose(const std::vector<std::string>& alternatives) {
  const ScriptEntry& e = take(ScriptEntry::Kind::Choose, "a choice request");
  if (e.index < 1 || e.index > alternatives.size()) {
    throw InteractionError(InteractionError::Kind::OutOfRange,
                           "script line " + std::to_string(e.line) + ": choice " + std::to_string(e.index) +
                               " out of range 1.." + std::to_string(alternatives.size()));
  }
  return e.index;
}

Term ScriptedHandler::read_term(const std::string& variable_name) {
  const ScriptEntry& e = take(ScriptEntry::Kind::Read, "a read request for " + variable_name);
  return parse_term(e.term_text);
}

ScriptedHandler make_scripted_handler(std::vector<ScriptEntry> script) { return ScriptedHandler(std::move(script)); }

ScriptedHandler make_scripted_handler(std::string_view script_text) {
  return ScriptedHandler(parse_script(script_text));
}

ConsoleHandler::ConsoleHandler(std::istream& in, std::ostream& out, int max_reprompts)
    : in_(in), out_(out), max_reprompts_(max_reprompts) {}

std::size_t ConsoleHandler::choose(const std::vector<std::string>& alternatives) {
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    out_ << i + 1 << ") " << alternatives[i] << '\n';
  }
  std::string line;
  for (;;) {
    out_ << "choice? " << std::flush;
    if (!std::getline(in_, line)) throw InteractionError(InteractionError::Kind::Abort, "input closed");
    std::size_t k = 0;
    const auto first = line.find_first_not_of(" \t");
    const auto last = line.find_last_not_of(" \t\r");
    if (first != std::string::npos) {
      auto [ptr, ec] = std::from_chars(line.data() + first, line.data() + last + 1, k);
      if (ec == std::errc() && ptr == line.data() + last + 1 && k >= 1 && k <= alternatives.size()) return k;
    }
    out_ << "please type a number from 1 to " << alternatives.size() << '\n';
  }
}

Term ConsoleHandler::read_term(const std::string& variable_name) {
  std::string line;
  for (int attempt = 0;; ++attempt) {
    out_ << variable_name << "? " << std::flush;
    if (!std::getline(in_, line)) throw InteractionError(InteractionError::Kind::Abort, "input closed");
    std::string_view text = line;
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.remove_suffix(1);
    if (!text.empty() && text.back() == '.') text.remove_suffix(1);
    try {
      return parse_term(text);
    } catch (const ParseError& e) {
      out_ << "syntax error: " << e.what() << '\n';
      if (attempt >= max_reprompts_) {
        throw InteractionError(InteractionError::Kind::Input, "no valid term for " + variable_name);
      }
    }
  }
}

}  // namespace prologi
