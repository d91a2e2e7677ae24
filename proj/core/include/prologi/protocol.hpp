#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prologi/engine.hpp"
#include "prologi/program.hpp"

namespace prologi::protocol {

// One JSON object per line. Client to server: load, query, choose, term,
// next, stop. Server to client: choice, read, solution, more, fail, error,
// done. Requests (choice, read) carry an id that the reply must echo.
enum class Type { Load, Query, Choice, Choose, Read, Term, Solution, More, Next, Stop, Fail, Error, Done };

std::string_view type_name(Type t);
std::optional<Type> type_from_name(std::string_view name);

struct Message {
  Type type = Type::Done;
  std::optional<std::uint64_t> id;
  std::string program;                        // load
  std::string goal;                           // query
  std::vector<std::string> alternatives;      // choice
  std::size_t index = 0;                      // choose, 1-based
  std::string variable;                       // read
  std::string text;                           // term
  std::vector<std::pair<std::string, std::string>> bindings;  // solution
  std::string message;                        // error
  bool truncated = false;                     // fail: depth limit cut the search

  // Optional per-query solver settings.
  std::optional<std::size_t> max_solutions;
  std::optional<std::size_t> depth_limit;
  std::optional<bool> occurs_check;
  std::optional<ChoicePolicy> choice_policy;

  friend bool operator==(const Message&, const Message&) = default;
};

class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::size_t offset, const std::string& message)
      : std::runtime_error("byte " + std::to_string(offset) + ": " + message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Single line, no trailing newline, no pretty-printing.
std::string encode(const Message& m);
/// Unknown fields are ignored; missing required fields are errors.
Message decode(std::string_view line);

/// Blocking line-oriented byte stream.
class LineTransport {
 public:
  virtual ~LineTransport() = default;
  /// Next line without its terminator, or nullopt at end of stream.
  virtual std::optional<std::string> read_line() = 0;
  virtual void write_line(std::string_view line) = 0;
};

class StreamTransport : public LineTransport {
 public:
  StreamTransport(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  std::optional<std::string> read_line() override;
  void write_line(std::string_view line) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

/// Owns a connected socket.
class FdTransport : public LineTransport {
 public:
  explicit FdTransport(int fd) : fd_(fd) {}
  ~FdTransport() override;
  FdTransport(const FdTransport&) = delete;
  FdTransport& operator=(const FdTransport&) = delete;

  std::optional<std::string> read_line() override;
  void write_line(std::string_view line) override;

 private:
  int fd_;
  std::string buffer_;
  bool eof_ = false;
};

struct ServeOptions {
  std::optional<Program> program;
  SolveOptions solve;
};

/// Runs one session until the transport reaches end of stream.
void serve(LineTransport& transport, const ServeOptions& options);

/// Accepts connections on a TCP port and serves each on its own thread.
class TcpServer {
 public:
  explicit TcpServer(ServeOptions options) : options_(std::move(options)) {}
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  /// Binds 127.0.0.1:port (0 picks a free port) and returns the bound port.
  std::uint16_t listen(std::uint16_t port, bool any_address = false);
  /// Accepts until stop() is called.
  void run();
  void stop();

 private:
  ServeOptions options_;
  std::atomic<int> listen_fd_{-1};
};

/// Parses `stdio` or `tcp:PORT`; returns nullopt for stdio. Throws
/// std::invalid_argument on anything else.
std::optional<std::uint16_t> parse_endpoint(std::string_view endpoint);

}  // namespace prologi::protocol
