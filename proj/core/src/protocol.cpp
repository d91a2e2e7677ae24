#include "prologi/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "prologi/syntax.hpp"

namespace prologi::protocol {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Type, std::string_view>, 13> kTypeNames{{
    {Type::Load, "load"},
    {Type::Query, "query"},
    {Type::Choice, "choice"},
    {Type::Choose, "choose"},
    {Type::Read, "read"},
    {Type::Term, "term"},
    {Type::Solution, "solution"},
    {Type::More, "more"},
    {Type::Next, "next"},
    {Type::Stop, "stop"},
    {Type::Fail, "fail"},
    {Type::Error, "error"},
    {Type::Done, "done"},
}};

bool has_id(Type t) {
  return t == Type::Choice || t == Type::Choose || t == Type::Read || t == Type::Term;
}

template <typename T>
T field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw DecodeError(0, std::string("missing field '") + name + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DecodeError(0, std::string("field '") + name + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* name) {
  if (!j.contains(name)) return std::nullopt;
  return field<T>(j, name);
}

}  // namespace

std::string_view type_name(Type t) {
  for (const auto& [type, name] : kTypeNames) {
    if (type == t) return name;
  }
  return "?";
}

std::optional<Type> type_from_name(std::string_view name) {
  for (const auto& [type, n] : kTypeNames) {
    if (n == name) return type;
  }
  return std::nullopt;
}

std::string encode(const Message& m) {
  json j;
  j["type"] = type_name(m.type);
  if (m.id && (has_id(m.type) || m.type == Type::Error)) j["id"] = *m.id;
  switch (m.type) {
    case Type::Load:
      j["program"] = m.program;
      break;
    case Type::Query:
      j["goal"] = m.goal;
      if (m.max_solutions) j["max_solutions"] = *m.max_solutions;
      if (m.depth_limit) j["depth_limit"] = *m.depth_limit;
      if (m.occurs_check) j["occurs_check"] = *m.occurs_check;
      if (m.choice_policy) j["choice_policy"] = *m.choice_policy == ChoicePolicy::Retry ? "retry" : "fail";
      break;
    case Type::Choice:
      j["alternatives"] = m.alternatives;
      break;
    case Type::Choose:
      j["index"] = m.index;
      break;
    case Type::Read:
      j["variable"] = m.variable;
      break;
    case Type::Term:
      j["text"] = m.text;
      break;
    case Type::Solution: {
      json b = json::object();
      for (const auto& [k, v] : m.bindings) b[k] = v;
      j["bindings"] = std::move(b);
      break;
    }
    case Type::Error:
      j["message"] = m.message;
      break;
    case Type::Fail:
      if (m.truncated) j["truncated"] = true;
      break;
    case Type::More:
    case Type::Next:
    case Type::Stop:
    case Type::Done:
      break;
  }
  return j.dump();
}

Message decode(std::string_view line) {
  if (line.empty()) throw DecodeError(0, "empty line");
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DecodeError(e.byte > 0 ? e.byte - 1 : 0, "malformed JSON");
  }
  if (!j.is_object()) throw DecodeError(0, "message must be a JSON object");
  const auto name = field<std::string>(j, "type");
  const auto type = type_from_name(name);
  if (!type) throw DecodeError(0, "unknown message type '" + name + "'");

  Message m;
  m.type = *type;
  if (has_id(m.type)) {
    m.id = field<std::uint64_t>(j, "id");
  } else if (m.type == Type::Error) {
    m.id = optional_field<std::uint64_t>(j, "id");
  }
  switch (m.type) {
    case Type::Load:
      m.program = field<std::string>(j, "program");
      break;
    case Type::Query: {
      m.goal = field<std::string>(j, "goal");
      m.max_solutions = optional_field<std::size_t>(j, "max_solutions");
      m.depth_limit = optional_field<std::size_t>(j, "depth_limit");
      m.occurs_check = optional_field<bool>(j, "occurs_check");
      if (auto policy = optional_field<std::string>(j, "choice_policy")) {
        if (*policy == "fail") {
          m.choice_policy = ChoicePolicy::Fail;
        } else if (*policy == "retry") {
          m.choice_policy = ChoicePolicy::Retry;
        } else {
          throw DecodeError(0, "choice_policy must be 'fail' or 'retry'");
        }
      }
      break;
    }
    case Type::Choice:
      m.alternatives = field<std::vector<std::string>>(j, "alternatives");
      break;
    case Type::Choose:
      m.index = field<std::size_t>(j, "index");
      break;
    case Type::Read:
      m.variable = field<std::string>(j, "variable");
      break;
    case Type::Term:
      m.text = field<std::string>(j, "text");
      break;
    case Type::Solution: {
      const auto it = j.find("bindings");
      if (it == j.end() || !it->is_object()) throw DecodeError(0, "field 'bindings' must be an object");
      for (const auto& [k, v] : it->items()) {
        if (!v.is_string()) throw DecodeError(0, "binding values must be strings");
        m.bindings.emplace_back(k, v.get<std::string>());
      }
      break;
    }
    case Type::Error:
      m.message = field<std::string>(j, "message");
      break;
    case Type::Fail:
      m.truncated = optional_field<bool>(j, "truncated").value_or(false);
      break;
    case Type::More:
    case Type::Next:
    case Type::Stop:
    case Type::Done:
      break;
  }
  return m;
}

std::optional<std::string> StreamTransport::read_line() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void StreamTransport::write_line(std::string_view line) {
  out_ << line << '\n';
  out_.flush();
}

FdTransport::~FdTransport() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<std::string> FdTransport::read_line() {
  for (;;) {
    const auto eol = buffer_.find('\n');
    if (eol != std::string::npos) {
      std::string line = buffer_.substr(0, eol);
      buffer_.erase(0, eol + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (eof_) {
      if (buffer_.empty()) return std::nullopt;
      return std::exchange(buffer_, {});
    }
    char chunk[4096];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      eof_ = true;
      continue;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void FdTransport::write_line(std::string_view line) {
  std::string data(line);
  data.push_back('\n');
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw std::runtime_error("connection lost");
    sent += static_cast<std::size_t>(n);
  }
}

namespace {

struct Closed {};
struct Stopped {};
class Violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Session;

// Carries the engine's choice and read requests over the wire.
class WireHandler : public InteractionHandler {
 public:
  explicit WireHandler(Session& session) : session_(session) {}

  std::size_t choose(const std::vector<std::string>& alternatives) override;
  Term read_term(const std::string& variable_name) override;

 private:
  Session& session_;
};

class Session {
 public:
  Session(LineTransport& transport, const ServeOptions& options)
      : transport_(transport), options_(options), program_(options.program.value_or(Program{})) {}

  void run() {
    while (auto line = transport_.read_line()) {
      Message m;
      try {
        m = decode(*line);
      } catch (const DecodeError& e) {
        send_error(e.what());
        continue;
      }
      switch (m.type) {
        case Type::Load:
          try {
            program_ = parse_program(m.program);
          } catch (const ParseError& e) {
            send_error(std::string("program: ") + e.what());
          }
          break;
        case Type::Query:
          if (!run_query(m)) return;
          break;
        default:
          send_error("unexpected '" + std::string(type_name(m.type)) + "' outside a query");
          break;
      }
    }
  }

  void send(const Message& m) { transport_.write_line(encode(m)); }

  void send_error(const std::string& text) {
    Message e;
    e.type = Type::Error;
    e.message = text;
    send(e);
  }

  std::uint64_t next_id() { return next_id_++; }

  /// Next client message during a query.
  Message await() {
    auto line = transport_.read_line();
    if (!line) throw Closed{};
    Message m;
    try {
      m = decode(*line);
    } catch (const DecodeError& e) {
      throw Violation(e.what());
    }
    if (m.type == Type::Stop) throw Stopped{};
    return m;
  }

 private:
  // Returns false when the transport closed mid-query.
  bool run_query(const Message& query) {
    Message done;
    done.type = Type::Done;
    Goal goal = Goal::atom(Term::atom("true"));
    try {
      goal = parse_goal(query.goal);
    } catch (const ParseError& e) {
      send_error(std::string("goal: ") + e.what());
      send(done);
      return true;
    }
    SolveOptions opts = options_.solve;
    if (query.max_solutions) opts.max_solutions = *query.max_solutions;
    if (query.depth_limit) opts.depth_limit = *query.depth_limit;
    if (query.occurs_check) opts.occurs_check = *query.occurs_check;
    if (query.choice_policy) opts.choice_policy = *query.choice_policy;

    WireHandler handler(*this);
    try {
      Solver solver(program_, goal, handler, opts);
      for (;;) {
        auto answer = solver.next();
        if (!answer) {
          Message fail;
          fail.type = Type::Fail;
          fail.truncated = solver.truncated();
          send(fail);
          send(done);
          return true;
        }
        Message solution;
        solution.type = Type::Solution;
        solution.bindings = rendered_bindings(*answer);
        send(solution);
        Message more;
        more.type = Type::More;
        send(more);
        const Message reply = await();
        if (reply.type != Type::Next) {
          throw Violation("expected 'next' or 'stop' but got '" + std::string(type_name(reply.type)) + "'");
        }
      }
    } catch (const Stopped&) {
      send(done);
    } catch (const Closed&) {
      return false;
    } catch (const std::exception& e) {
      // Protocol violations, solve errors and handler errors all end the
      // query but not the session.
      send_error(e.what());
      send(done);
    }
    return true;
  }

  LineTransport& transport_;
  const ServeOptions& options_;
  Program program_;
  std::uint64_t next_id_ = 1;
};

std::size_t WireHandler::choose(const std::vector<std::string>& alternatives) {
  Message request;
  request.type = Type::Choice;
  request.id = session_.next_id();
  request.alternatives = alternatives;
  session_.send(request);
  const Message reply = session_.await();
  if (reply.type != Type::Choose || reply.id != request.id) {
    throw Violation("expected 'choose' with id " + std::to_string(*request.id));
  }
  if (reply.index < 1 || reply.index > alternatives.size()) throw Violation("index out of range");
  return reply.index;
}

Term WireHandler::read_term(const std::string& variable_name) {
  constexpr int kMaxReprompts = 3;
  for (int attempt = 0;; ++attempt) {
    Message request;
    request.type = Type::Read;
    request.id = session_.next_id();
    request.variable = variable_name;
    session_.send(request);
    const Message reply = session_.await();
    if (reply.type != Type::Term || reply.id != request.id) {
      throw Violation("expected 'term' with id " + std::to_string(*request.id));
    }
    try {
      return parse_term(reply.text);
    } catch (const ParseError& e) {
      Message error;
      error.type = Type::Error;
      error.id = request.id;
      error.message = std::string("term: ") + e.what();
      session_.send(error);
      if (attempt >= kMaxReprompts) {
        throw InteractionError(InteractionError::Kind::Input, "no valid term for " + variable_name);
      }
    }
  }
}

}  // namespace

void serve(LineTransport& transport, const ServeOptions& options) {
  Session session(transport, options);
  try {
    session.run();
  } catch (const std::runtime_error&) {
    // Write failure: the peer is gone.
  }
}

TcpServer::~TcpServer() { stop(); }

std::uint16_t TcpServer::listen(std::uint16_t port, bool any_address) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(any_address ? INADDR_ANY : INADDR_LOOPBACK);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    const std::string why = std::strerror(errno);
    stop();
    throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

void TcpServer::run() {
  for (;;) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    std::thread([fd, options = options_] {
      FdTransport transport(fd);
      serve(transport, options);
    }).detach();
  }
}

void TcpServer::stop() {
  const int fd = listen_fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

std::optional<std::uint16_t> parse_endpoint(std::string_view endpoint) {
  if (endpoint == "stdio") return std::nullopt;
  if (endpoint.starts_with("tcp:")) {
    const std::string_view digits = endpoint.substr(4);
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (!digits.empty() && ec == std::errc() && ptr == digits.data() + digits.size() && value <= 65535) {
      return static_cast<std::uint16_t>(value);
    }
  }
  throw std::invalid_argument("invalid protocol endpoint '" + std::string(endpoint) + "' (expected stdio or tcp:PORT)");
}

}  // namespace prologi::protocol
