#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "fairstream/harness.hpp"

namespace fairstream {

using nlohmann::json;

Decision parse_reply(const json& reply, Direction direction, int n, bool allow_hold) {
  if (!reply.is_object() || !reply.contains("decision") || !reply["decision"].is_string()) {
    throw ProtocolError("reply lacks a decision: " + reply.dump());
  }
  const std::string kind = reply["decision"].get<std::string>();
  if (kind == "assign") {
    if (!reply.contains("agent") || !reply["agent"].is_number_integer()) {
      throw ProtocolError("assign reply lacks an integer agent: " + reply.dump());
    }
    int agent = reply["agent"].get<int>();
    if (agent < 1 || agent > n) throw ProtocolError("agent out of range: " + reply.dump());
    return Decision::assign(agent);
  }
  if (kind == "discard") {
    if (direction == Direction::Chores) throw ProtocolError("chores cannot be discarded");
    return Decision::discard();
  }
  if (kind == "hold") {
    if (!allow_hold) throw ProtocolError("hold is not permitted here");
    return Decision::hold();
  }
  throw ProtocolError("unknown decision '" + kind + "'");
}

ExternalAllocator::ExternalAllocator(std::string command, std::chrono::milliseconds timeout,
                                     Representation representation)
    : command_(std::move(command)), name_("external"), timeout_(timeout), representation_(representation) {}

ExternalAllocator::~ExternalAllocator() { shutdown(); }

void ExternalAllocator::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    bool done = false;
    for (int k = 0; k < 20 && !done; ++k) {
      done = ::waitpid(pid_, &status, WNOHANG) != 0;
      if (!done) ::usleep(10000);
    }
    if (!done) {
      ::kill(-pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
}

void ExternalAllocator::init(Direction direction, int n, const std::vector<ValuationClass>& classes,
                             const AllocatorParams&) {
  shutdown();
  direction_ = direction;
  n_ = n;
  round_ = 0;
  held_.reset();
  buffer_.clear();

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ProtocolError(std::string("pipe: ") + std::strerror(errno));
  }
  ::signal(SIGPIPE, SIG_IGN);
  pid_t pid = ::fork();
  if (pid < 0) throw ProtocolError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  pid_ = pid;
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  json header = {{"direction", to_string(direction)}, {"n", n}, {"deadline", deadline_}};
  json names = json::array();
  for (const auto& c : classes) names.push_back(c.str());
  bool uniform = !classes.empty() &&
                 std::all_of(classes.begin(), classes.end(), [&](const auto& c) { return c == classes.front(); });
  header["class"] = uniform ? json(classes.front().str()) : json("mixed");
  header["classes"] = names;
  send(header);
  json ack = receive();
  if (!ack.is_object() || ack.value("ack", false) != true) throw ProtocolError("expected ack, got " + ack.dump());
}

void ExternalAllocator::send(const json& message) {
  if (to_child_ < 0) throw ProtocolError("external allocator is not running");
  std::string line = message.dump() + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t w = ::write(to_child_, line.data() + off, line.size() - off);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("write to external allocator failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(w);
  }
}

json ExternalAllocator::receive() {
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      try {
        return json::parse(line);
      } catch (const json::parse_error&) {
        throw ProtocolError("malformed line from external allocator: " + line);
      }
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw Timeout("external allocator did not reply in time");
    pollfd p{from_child_, POLLIN, 0};
    int r = ::poll(&p, 1, static_cast<int>(left.count()));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll: ") + std::strerror(errno));
    }
    if (r == 0) throw Timeout("external allocator did not reply in time");
    char chunk[4096];
    ssize_t got = ::read(from_child_, chunk, sizeof chunk);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("read: ") + std::strerror(errno));
    }
    if (got == 0) throw ProtocolError("external allocator closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

Decision ExternalAllocator::read_decision(bool allow_hold) {
  return parse_reply(receive(), direction_, n_, allow_hold);
}

Action ExternalAllocator::step(const ItemView& item) {
  round_ = item.id;
  json line = {{"round", item.id}};
  if (item.values) {
    json vs = json::array();
    for (const auto& v : *item.values) vs.push_back(v.str());
    line["values"] = vs;
  } else {
    if (item.categories) {
      json cs = json::array();
      for (const auto& c : *item.categories) cs.push_back(c ? json(*c) : json(nullptr));
      line["categories"] = cs;
    }
    json ms = json::array();
    for (const auto& m : item.marginals) ms.push_back(m.str());
    line["marginals"] = ms;
  }
  send(line);
  Action a{read_decision(deadline_ == 1), std::nullopt};
  if (held_) {
    send({{"round", item.id}, {"resolve", *held_}});
    a.held = read_decision(false);
    held_.reset();
  }
  if (a.current.kind == Decision::Kind::Hold) held_ = item.id;
  return a;
}

std::optional<Decision> ExternalAllocator::flush() {
  if (!held_) return std::nullopt;
  send({{"round", round_}, {"resolve", *held_}});
  held_.reset();
  return read_decision(false);
}

}  // namespace fairstream
