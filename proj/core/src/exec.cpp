#include "sctree/exec.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>

#include "sctree/errors.hpp"
#include "sctree/extract.hpp"
#include "sctree/parallel.hpp"
#include "sctree/text.hpp"

extern char** environ;

namespace sctree {

std::string_view to_string(CaseStatus status) {
  switch (status) {
    case CaseStatus::ok: return "ok";
    case CaseStatus::error: return "error";
    case CaseStatus::timeout: return "timeout";
  }
  return "error";
}

std::vector<ExecCase> make_cases(const TestInputs& inputs, std::chrono::milliseconds timeout) {
  std::vector<ExecCase> cases;
  cases.reserve(inputs.size());
  for (const auto& input : inputs) cases.push_back({input.args, timeout});
  return cases;
}

std::string ExecTranscript::concatenated() const {
  std::string out;
  for (std::size_t i = 0; i < per_case.size(); ++i) {
    if (i) out += '\n';
    out += per_case[i].rendered;
  }
  return out;
}

namespace {

using nlohmann::json;

std::optional<std::string> render_nested(const json& value);

std::optional<std::string> render_scalar_or_container(const json& value, bool nested) {
  switch (value.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return value.get<bool>() ? "true" : "false";
    case json::value_t::number_integer: return std::to_string(value.get<std::int64_t>());
    case json::value_t::number_unsigned: return std::to_string(value.get<std::uint64_t>());
    case json::value_t::number_float: {
      auto s = text::shortest_double(value.get<double>());
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case json::value_t::string:
      if (!nested) return value.get<std::string>();
      return value.dump(-1, ' ', false, json::error_handler_t::replace);
    case json::value_t::array: {
      std::string out = "[";
      bool first = true;
      for (const auto& item : value) {
        auto rendered = render_nested(item);
        if (!rendered) return std::nullopt;
        if (!first) out += ", ";
        out += *rendered;
        first = false;
      }
      return out + "]";
    }
    case json::value_t::object: {
      // nlohmann::json objects iterate in sorted key order.
      std::string out = "{";
      bool first = true;
      for (const auto& [key, item] : value.items()) {
        auto rendered = render_nested(item);
        if (!rendered) return std::nullopt;
        if (!first) out += ", ";
        out += json(key).dump(-1, ' ', false, json::error_handler_t::replace) + ": " + *rendered;
        first = false;
      }
      return out + "}";
    }
    case json::value_t::binary:
    case json::value_t::discarded: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::string> render_nested(const json& value) { return render_scalar_or_container(value, true); }

CaseOutcome error_outcome(std::string detail) {
  return {CaseStatus::error, std::string(kErrorToken), std::move(detail)};
}

CaseOutcome timeout_outcome() { return {CaseStatus::timeout, std::string(kTimeoutToken), "killed at timeout"}; }

struct WorkerRun {
  bool timed_out = false;
  bool output_overflow = false;
  int wait_status = 0;
  std::string out;
  std::string err;
};

constexpr std::size_t kMaxWorkerOutput = 16 * 1024 * 1024;

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_.data(), O_CLOEXEC) != 0) throw HarnessError(std::string("pipe2: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() { close_fd(fds_[0]); }
  void close_write() { close_fd(fds_[1]); }

 private:
  static void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  std::array<int, 2> fds_{-1, -1};
};

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

WorkerRun run_worker(const std::vector<std::string>& command, const std::string& request,
                     std::chrono::milliseconds timeout) {
  ignore_sigpipe_once();
  Pipe in, out, err;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in.read_end(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out.write_end(), STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err.write_end(), STDERR_FILENO);

  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  sigset_t defaults;
  sigemptyset(&defaults);
  sigaddset(&defaults, SIGPIPE);
  sigset_t empty_mask;
  sigemptyset(&empty_mask);
  posix_spawnattr_setsigdefault(&attr, &defaults);
  posix_spawnattr_setsigmask(&attr, &empty_mask);
  posix_spawnattr_setpgroup(&attr, 0);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGDEF | POSIX_SPAWN_SETSIGMASK);

  std::vector<char*> argv;
  for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);

  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + timeout;
  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, &attr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) throw HarnessError("cannot spawn worker '" + command.front() + "': " + std::strerror(rc));

  in.close_read();
  out.close_write();
  err.close_write();
  set_nonblocking(in.write_end());
  set_nonblocking(out.read_end());
  set_nonblocking(err.read_end());

  WorkerRun run;
  std::size_t written = 0;
  bool stdin_open = true, stdout_open = true, stderr_open = true;
  std::array<char, 65536> buffer{};

  const auto remaining_ms = [&] {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    return std::max<long long>(0, left.count());
  };

  while ((stdout_open || stderr_open) && !run.output_overflow) {
    const long long left = remaining_ms();
    if (left == 0) {
      run.timed_out = true;
      break;
    }
    std::array<pollfd, 3> fds{};
    nfds_t count = 0;
    int stdin_slot = -1, stdout_slot = -1, stderr_slot = -1;
    if (stdin_open) {
      stdin_slot = static_cast<int>(count);
      fds[count++] = {in.write_end(), POLLOUT, 0};
    }
    if (stdout_open) {
      stdout_slot = static_cast<int>(count);
      fds[count++] = {out.read_end(), POLLIN, 0};
    }
    if (stderr_open) {
      stderr_slot = static_cast<int>(count);
      fds[count++] = {err.read_end(), POLLIN, 0};
    }
    const int ready = ::poll(fds.data(), count, static_cast<int>(std::min<long long>(left, 1000)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      throw HarnessError(std::string("poll: ") + std::strerror(errno));
    }
    if (stdin_slot >= 0 && fds[stdin_slot].revents) {
      if (fds[stdin_slot].revents & (POLLERR | POLLHUP)) {
        in.close_write();
        stdin_open = false;
      } else {
        const ssize_t n = ::write(in.write_end(), request.data() + written, request.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == request.size()) {
          in.close_write();
          stdin_open = false;
        }
      }
    }
    const auto drain = [&](int slot, int fd, bool& open, std::string& sink) {
      if (slot < 0 || !fds[slot].revents) return;
      const ssize_t n = ::read(fd, buffer.data(), buffer.size());
      if (n > 0) {
        sink.append(buffer.data(), static_cast<std::size_t>(n));
        if (sink.size() > kMaxWorkerOutput) run.output_overflow = true;
      } else if (n == 0 || (errno != EAGAIN && errno != EINTR)) {
        open = false;
      }
    };
    drain(stdout_slot, out.read_end(), stdout_open, run.out);
    drain(stderr_slot, err.read_end(), stderr_open, run.err);
  }

  if (!run.timed_out && !run.output_overflow) {
    // Output closed; give the process until the deadline to exit.
    while (true) {
      const pid_t done = ::waitpid(pid, &run.wait_status, WNOHANG);
      if (done == pid) return run;
      if (done < 0 && errno != EINTR) throw HarnessError(std::string("waitpid: ") + std::strerror(errno));
      if (remaining_ms() == 0) {
        run.timed_out = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }
  ::kill(-pid, SIGKILL);
  while (::waitpid(pid, &run.wait_status, 0) < 0 && errno == EINTR) {
  }
  return run;
}

std::string tail(const std::string& s, std::size_t n = 400) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

}  // namespace

std::optional<std::string> render_value(const nlohmann::json& value) {
  return render_scalar_or_container(value, false);
}

ExecHarness::ExecHarness(HarnessConfig config) : config_(std::move(config)) {
  if (config_.pool_size < 1) throw ConfigError("harness pool size must be >= 1");
}

CaseOutcome ExecHarness::run_case(std::string_view code, const nlohmann::json& args, std::string_view case_id,
                                  std::chrono::milliseconds timeout) const {
  if (config_.worker_command.empty()) throw HarnessError("no execution worker configured");
  if (timeout.count() <= 0) throw ConfigError("case timeout must be positive");
  const json request = {{"code", code}, {"args", args}, {"case_id", case_id}};
  const std::string line = request.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";

  const WorkerRun run = run_worker(config_.worker_command, line, timeout);
  if (run.timed_out) return timeout_outcome();
  if (run.output_overflow) return error_outcome("worker output exceeded limit");
  if (!WIFEXITED(run.wait_status) || WEXITSTATUS(run.wait_status) != 0) {
    const std::string how = WIFSIGNALED(run.wait_status) ? "killed by signal " + std::to_string(WTERMSIG(run.wait_status))
                                                         : "exit status " + std::to_string(WEXITSTATUS(run.wait_status));
    return error_outcome("worker " + how + ": " + tail(run.err));
  }

  std::vector<std::string_view> lines;
  std::string_view rest = run.out;
  while (!rest.empty()) {
    const auto end = rest.find('\n');
    const auto line_view = rest.substr(0, end);
    if (!text::trim(line_view).empty()) lines.push_back(line_view);
    if (end == std::string_view::npos) break;
    rest.remove_prefix(end + 1);
  }
  if (lines.size() != 1) {
    return error_outcome("expected exactly one response line, got " + std::to_string(lines.size()));
  }
  json response;
  try {
    response = json::parse(lines.front());
  } catch (const json::exception&) {
    return error_outcome("malformed response line");
  }
  if (!response.is_object() || !response.contains("case_id") || !response["case_id"].is_string() ||
      !response.contains("status") || !response["status"].is_string()) {
    return error_outcome("malformed response line");
  }
  if (response["case_id"].get<std::string>() != case_id) {
    throw HarnessError("worker answered case '" + response["case_id"].get<std::string>() + "' for request '" +
                       std::string(case_id) + "'");
  }
  const auto status = response["status"].get<std::string>();
  if (status == "ok") {
    if (!response.contains("value")) return error_outcome("ok response without value");
    auto rendered = render_value(response["value"]);
    if (!rendered) return error_outcome("unserializable");
    return {CaseStatus::ok, std::move(*rendered), {}};
  }
  if (status == "error") {
    const auto it = response.find("error");
    return error_outcome(it != response.end() && it->is_string() ? it->get<std::string>() : "error");
  }
  throw HarnessError("worker returned unknown status '" + status + "'");
}

ExecTranscript ExecHarness::execute(std::string_view content, std::span<const ExecCase> cases, TaskKind kind) const {
  ExecTranscript transcript;
  const std::size_t records = kind == TaskKind::translation ? 1 : cases.size();
  if (is_sentinel(content)) {
    transcript.per_case.assign(records, error_outcome("sentinel content"));
    return transcript;
  }
  if (kind == TaskKind::translation) {
    if (!defines_main(content)) {
      transcript.per_case.push_back({CaseStatus::ok, std::string(content), {}});
      return transcript;
    }
    const auto timeout = cases.empty() ? kDefaultCaseTimeout : cases.front().timeout;
    transcript.per_case.push_back(run_case(content, json::array(), "case-0", timeout));
    return transcript;
  }
  transcript.per_case.resize(cases.size());
  parallel_for(cases.size(), config_.pool_size, [&](std::size_t i) {
    transcript.per_case[i] = run_case(content, cases[i].args, "case-" + std::to_string(i), cases[i].timeout);
  });
  return transcript;
}

}  // namespace sctree
