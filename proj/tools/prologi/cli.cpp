#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "prologi/interaction.hpp"
#include "prologi/protocol.hpp"
#include "prologi/syntax.hpp"

namespace prologi::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Program load_program(const std::optional<std::string>& path) {
  if (!path) return Program{};
  try {
    return parse_program(read_file(*path));
  } catch (const ParseError& e) {
    throw std::runtime_error(*path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                             e.detail());
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_full_stop(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  return s;
}

// Everything except a branch failure ends the run.
void report_truncation(const Solver& solver, std::ostream& err) {
  if (solver.truncated()) err << "warning: search truncated by the depth limit\n";
}

}  // namespace

std::string format_answer(const Answer& answer) {
  if (answer.bindings.empty()) return "true\n";
  std::string out;
  for (const auto& [name, text] : rendered_bindings(answer)) out += name + " = " + text + "\n";
  return out;
}

int run_batch(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (!config.goal_text) {
    err << "error: run needs --goal\n";
    return 2;
  }
  try {
    const Program program = load_program(config.program_path);
    const Goal goal = parse_goal(strip_full_stop(*config.goal_text));
    ScriptedHandler handler = config.script_path ? make_scripted_handler(read_file(*config.script_path))
                                                 : make_scripted_handler(std::vector<ScriptEntry>{});
    Solver solver(program, goal, handler, config.solve);
    std::size_t found = 0;
    while (auto answer = solver.next()) {
      out << format_answer(*answer) << '\n';
      ++found;
    }
    report_truncation(solver, err);
    out << (found ? "yes" : "no") << '\n';
    return found ? 0 : 1;
  } catch (const ParseError& e) {
    err << "error: goal: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 2;
}

int run_repl(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
  Program program;
  try {
    program = load_program(config.program_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  ConsoleHandler handler(in, out);
  std::string line;
  for (;;) {
    std::string text;
    out << "?- " << std::flush;
    while (std::getline(in, line)) {
      text += line;
      text += '\n';
      if (trim(text).ends_with('.')) break;
      if (trim(text).empty()) {
        text.clear();
        out << "?- " << std::flush;
        continue;
      }
      out << "|  " << std::flush;
    }
    if (trim(text).empty()) {
      out << '\n';
      return 0;
    }
    Goal goal = Goal::atom(Term::atom("true"));
    try {
      goal = parse_goal(strip_full_stop(text));
    } catch (const ParseError& e) {
      out << "syntax error: " << e.what() << '\n';
      continue;
    }
    try {
      Solver solver(program, goal, handler, config.solve);
      bool stopped = false;
      while (auto answer = solver.next()) {
        out << format_answer(*answer) << std::flush;
        if (!std::getline(in, line) || trim(line) != ";") {
          stopped = true;
          break;
        }
      }
      if (!stopped) report_truncation(solver, out);
      out << (stopped ? "yes" : "no") << '\n';
    } catch (const std::exception& e) {
      out << "error: " << e.what() << '\n';
    }
    if (!in) return 0;
  }
}

int run_serve(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
  protocol::ServeOptions options;
  std::optional<std::uint16_t> port;
  try {
    port = protocol::parse_endpoint(config.endpoint);
    if (config.program_path) options.program = load_program(config.program_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  options.solve = config.solve;
  if (!port) {
    protocol::StreamTransport transport(in, out);
    protocol::serve(transport, options);
    return 0;
  }
  try {
    protocol::TcpServer server(std::move(options));
    const auto bound = server.listen(*port);
    err << "listening on 127.0.0.1:" << bound << '\n';
    server.run();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interpreter for Horn clauses with read and uchoose goals", "prologi"};
  app.require_subcommand(1);

  CliConfig config;
  std::optional<std::size_t> max_solutions;
  std::optional<std::size_t> depth_limit;
  std::string policy = "fail";
  std::string program_path;

  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--max-solutions", max_solutions, "Stop after N answers")->check(CLI::PositiveNumber);
    sub->add_option("--depth-limit", depth_limit, "Maximum derivation depth")->check(CLI::PositiveNumber);
    sub->add_flag("--occurs-check", config.solve.occurs_check, "Enable the occurs check in unification");
    sub->add_option("--choice-policy", policy, "What a failed uchoose branch does")
        ->check(CLI::IsMember({"fail", "retry"}));
  };

  auto* run_cmd = app.add_subcommand("run", "Answer one goal, taking interactions from a script");
  run_cmd->add_option("program", program_path, "Program file")->required();
  run_cmd->add_option("--goal", config.goal_text, "Goal to prove")->required();
  run_cmd->add_option("--script", config.script_path, "Interaction script (choose <k> / read <term>)");
  add_solver_flags(run_cmd);

  auto* repl_cmd = app.add_subcommand("repl", "Interactive top level");
  repl_cmd->add_option("program", program_path, "Program file");
  add_solver_flags(repl_cmd);

  auto* serve_cmd = app.add_subcommand("serve", "Line-delimited JSON session server");
  serve_cmd->add_option("program", program_path, "Program loaded before the first session");
  serve_cmd->add_option("--protocol", config.endpoint, "stdio or tcp:PORT");
  add_solver_flags(serve_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  config.solve.max_solutions = max_solutions;
  config.solve.depth_limit = depth_limit;
  config.solve.choice_policy = policy == "retry" ? ChoicePolicy::Retry : ChoicePolicy::Fail;
  if (!program_path.empty()) config.program_path = program_path;

  if (run_cmd->parsed()) {
    config.mode = Mode::Batch;
    return run_batch(config, out, err);
  }
  if (repl_cmd->parsed()) {
    config.mode = Mode::Repl;
    return run_repl(config, in, out, err);
  }
  config.mode = Mode::Serve;
  return run_serve(config, in, out, err);
}

}  // namespace prologi::cli
