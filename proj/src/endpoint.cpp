#include "rdeg/endpoint.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <poll.h>
#include <set>
#include <spawn.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include <json.hpp>

#include "rdeg/error.hpp"

extern char** environ;

namespace rdeg {
namespace {

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

std::string request_line(const ImageRequest& req) {
  const auto abs = std::filesystem::absolute(req.second).lexically_normal();
  return nlohmann::json{{"id", req.first}, {"path", abs.string()}}.dump();
}

// Parses one response line and returns the item id it answers. `field`
// receives the payload value for the caller to check.
std::string parse_response(const std::string& line, const char* key, nlohmann::json& field) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("malformed response line: " + line);
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    throw ProtocolError("response without a string id: " + line);
  }
  std::string id = j["id"].get<std::string>();
  if (!j.contains(key)) {
    throw ProtocolError("response for item '" + id + "' lacks \"" + key + "\"");
  }
  field = j[key];
  return id;
}

// Drives one request/response session for every item. `accept` validates a
// response payload for an id and stores it.
template <typename Accept>
std::vector<std::string> drive(const DetectorEndpoint& endpoint,
                               const std::vector<ImageRequest>& images, const char* key,
                               Accept accept) {
  validate(endpoint);
  {
    std::set<std::string> ids;
    for (const auto& [id, path] : images) {
      if (!ids.insert(id).second) throw ParameterError("duplicate request id '" + id + "'");
    }
  }
  std::vector<std::string> failed;
  std::size_t completed = 0;
  const auto timeout = std::chrono::milliseconds(
      static_cast<long long>(endpoint.timeout_s * 1000.0));
  std::unique_ptr<ChildProcess> child;
  auto exited = [&] {
    return DetectorError(endpoint.display_name() + ": process exited before completion (" +
                             std::to_string(completed) + " item(s) scored)",
                         completed);
  };
  // Sends images[idx...] as one round trip. Returns the indices still
  // unanswered when the wait timed out (the child is then discarded).
  auto round_trip = [&](const std::vector<std::size_t>& idx) {
    if (!child) child = std::make_unique<ChildProcess>(endpoint.command);
    std::set<std::string> outstanding;
    for (std::size_t i : idx) {
      outstanding.insert(images[i].first);
      if (!child->write_line(request_line(images[i]))) throw exited();
    }
    while (!outstanding.empty()) {
      std::string line;
      const auto status = child->read_line(line, timeout);
      if (status == ChildProcess::ReadStatus::timeout) {
        child->kill();
        child.reset();
        std::vector<std::size_t> left;
        for (std::size_t i : idx) {
          if (outstanding.count(images[i].first)) left.push_back(i);
        }
        return left;
      }
      if (status == ChildProcess::ReadStatus::eof) throw exited();
      if (line.empty()) continue;
      nlohmann::json field;
      const std::string id = parse_response(line, key, field);
      if (!outstanding.erase(id)) {
        throw ProtocolError("response for unknown or already answered item '" + id + "'");
      }
      accept(id, field);
      ++completed;
    }
    return std::vector<std::size_t>{};
  };
  for (std::size_t start = 0; start < images.size(); start += endpoint.batch_size) {
    const std::size_t end = std::min(images.size(), start + endpoint.batch_size);
    std::vector<std::size_t> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(i);
    const auto left = round_trip(batch);
    // A stalled batch is retried item by item so only the items that
    // actually hang are dropped.
    for (std::size_t i : left) {
      if (batch.size() == 1 || !round_trip({i}).empty()) failed.push_back(images[i].first);
    }
  }
  if (child) child->close();
  return failed;
}

}  // namespace

std::string DetectorEndpoint::display_name() const {
  if (!name.empty()) return name;
  if (command.empty()) return "detector";
  return std::filesystem::path(command.front()).stem().string();
}

void validate(const DetectorEndpoint& endpoint) {
  if (endpoint.command.empty() || endpoint.command.front().empty()) {
    throw ParameterError("detector command is empty");
  }
  if (!(endpoint.timeout_s > 0.0)) throw ParameterError("detector timeout must be > 0");
  if (endpoint.batch_size == 0) throw ParameterError("detector batch_size must be >= 1");
}

ChildProcess::ChildProcess(const std::vector<std::string>& argv) {
  ignore_sigpipe();
  if (argv.empty()) throw DetectorError("empty command", 0);
  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw DetectorError("pipe failed", 0);
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw DetectorError("pipe failed", 0);
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const int rc = ::posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    pid_ = -1;
    throw DetectorError("cannot launch '" + argv[0] + "': " + std::strerror(rc), 0);
  }
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
}

ChildProcess::~ChildProcess() { close(); }

bool ChildProcess::write_line(const std::string& line) {
  if (in_fd_ < 0) return false;
  std::string data = line + '\n';
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = ::write(in_fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      close_fd(in_fd_);
      return false;
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  return true;
}

ChildProcess::ReadStatus ChildProcess::read_line(std::string& line,
                                                 std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return ReadStatus::line;
    }
    if (out_fd_ < 0) return ReadStatus::eof;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return ReadStatus::timeout;
    pollfd pfd{out_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      return ReadStatus::eof;
    }
    if (rc == 0) return ReadStatus::timeout;
    char chunk[4096];
    const ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      close_fd(out_fd_);
      continue;  // deliver any buffered line before reporting eof
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ChildProcess::close() {
  close_fd(in_fd_);
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 200; ++i) {
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || r < 0) {
        pid_ = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (pid_ > 0) kill();
  }
  close_fd(out_fd_);
}

void ChildProcess::kill() {
  close_fd(in_fd_);
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
  close_fd(out_fd_);
}

ScoreResult score_images(const DetectorEndpoint& endpoint,
                         const std::vector<ImageRequest>& images) {
  std::map<std::string, double> got;
  ScoreResult result;
  result.failed = drive(endpoint, images, "score",
                        [&](const std::string& id, const nlohmann::json& v) {
                          if (!v.is_number()) {
                            throw ProtocolError("item '" + id + "': score is not a number");
                          }
                          const double s = v.get<double>();
                          if (!(s >= 0.0 && s <= 1.0)) {
                            throw ProtocolError("item '" + id + "': score " + v.dump() +
                                                " outside [0, 1]");
                          }
                          got[id] = s;
                        });
  for (const auto& [id, path] : images) {
    if (auto it = got.find(id); it != got.end()) result.scores.emplace_back(id, it->second);
  }
  return result;
}

TransformResult transform_images(const DetectorEndpoint& endpoint,
                                 const std::vector<ImageRequest>& images) {
  std::map<std::string, std::filesystem::path> got;
  TransformResult result;
  result.failed = drive(endpoint, images, "path",
                        [&](const std::string& id, const nlohmann::json& v) {
                          if (!v.is_string()) {
                            throw ProtocolError("item '" + id + "': path is not a string");
                          }
                          std::filesystem::path p = v.get<std::string>();
                          std::error_code ec;
                          if (!std::filesystem::is_regular_file(p, ec)) {
                            throw ProtocolError("item '" + id + "': output file '" +
                                                p.string() + "' does not exist");
                          }
                          got[id] = std::move(p);
                        });
  for (const auto& [id, path] : images) {
    if (auto it = got.find(id); it != got.end()) result.outputs.emplace_back(id, it->second);
  }
  return result;
}

}  // namespace rdeg
