#include "twoloop/runner/external.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "twoloop/core/error.hpp"
#include "twoloop/runner/csv_protocol.hpp"

namespace twoloop::runner {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const std::map<std::string, std::string>& placeholder_names() {
  static const std::map<std::string, std::string> names{{"params_file", ""},
                                                        {"fitness_file", ""},
                                                        {"generation", ""},
                                                        {"index", ""},
                                                        {"work_dir", ""}};
  return names;
}

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

int open_or_throw(const fs::path& path, int flags) {
  const int fd = ::open(path.c_str(), flags | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorKind::Io, "cannot open '" + path.string() + "': " + std::strerror(errno));
  }
  return fd;
}

bool wait_until(pid_t pid, int& status, Clock::time_point deadline) {
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) return true;
    if (r < 0 && errno != EINTR) return true;
    if (Clock::now() >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

}  // namespace

void ExternalCommandSpec::validate() const {
  if (command_template.empty()) throw config_error("external command template is empty");
  if (expected_fitness_length < 1) throw config_error("external fitness length must be at least 1");
  substitute_placeholders(command_template, placeholder_names());
}

std::string substitute_placeholders(const std::string& templ,
                                    const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(templ.size());
  for (std::size_t i = 0; i < templ.size(); ++i) {
    const char c = templ[i];
    if (c == '}') throw config_error("unbalanced '}' in command template '" + templ + "'");
    if (c != '{') {
      out.push_back(c);
      continue;
    }
    const auto close = templ.find('}', i + 1);
    if (close == std::string::npos) {
      throw config_error("unbalanced '{' in command template '" + templ + "'");
    }
    const std::string name = templ.substr(i + 1, close - i - 1);
    if (name.find('{') != std::string::npos) {
      throw config_error("nested placeholder in command template '" + templ + "'");
    }
    const auto it = values.find(name);
    if (it == values.end()) {
      throw config_error("unknown placeholder '{" + name + "}' in command template");
    }
    out += it->second;
    i = close;
  }
  return out;
}

EvalOutcome run_external(const ExternalCommandSpec& spec, const Individual& individual,
                         const fs::path& work_dir, double timeout_seconds,
                         const std::atomic<bool>* cancel) {
  EvalOutcome out;
  const auto start = Clock::now();
  auto finish = [&](EvalStatus status, std::string diagnostic) {
    out.status = status;
    out.diagnostic = std::move(diagnostic);
    out.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  };

  pid_t pid = -1;
  try {
    fs::create_directories(work_dir);
    const fs::path dir = fs::absolute(work_dir);
    const fs::path params_file = dir / kParamsFileName;
    const fs::path fitness_file = dir / kFitnessFileName;
    fs::remove(fitness_file);
    write_params_file(individual, params_file);

    const std::string command =
        substitute_placeholders(spec.command_template, {{"params_file", params_file.string()},
                                                        {"fitness_file", fitness_file.string()},
                                                        {"generation", std::to_string(individual.generation)},
                                                        {"index", std::to_string(individual.index)},
                                                        {"work_dir", dir.string()}});

    // Everything the child needs is prepared before fork; the child only
    // makes async-signal-safe calls.
    Fd out_fd(open_or_throw(dir / kStdoutLog, O_WRONLY | O_CREAT | O_TRUNC));
    Fd err_fd(open_or_throw(dir / kStderrLog, O_WRONLY | O_CREAT | O_TRUNC));
    Fd null_fd(open_or_throw("/dev/null", O_RDONLY));
    const std::string dir_str = dir.string();

    pid = ::fork();
    if (pid < 0) {
      return finish(EvalStatus::Failed, std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
      ::setpgid(0, 0);
      if (::chdir(dir_str.c_str()) != 0) ::_exit(126);
      ::dup2(null_fd.get(), STDIN_FILENO);
      ::dup2(out_fd.get(), STDOUT_FILENO);
      ::dup2(err_fd.get(), STDERR_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::setpgid(pid, pid);

    int status = 0;
    bool timed_out = false;
    const bool has_timeout = timeout_seconds > 0.0;
    const auto deadline =
        has_timeout ? start + std::chrono::duration_cast<Clock::duration>(
                                  std::chrono::duration<double>(timeout_seconds))
                    : Clock::time_point::max();
    while (true) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid || (r < 0 && errno != EINTR)) {
        break;
      }
      if (Clock::now() >= deadline ||
          (cancel != nullptr && cancel->load(std::memory_order_relaxed))) {
        timed_out = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }

    if (timed_out) {
      ::kill(-pid, SIGTERM);
      const auto grace = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double>(spec.kill_grace_seconds));
      if (!wait_until(pid, status, grace)) {
        ::kill(-pid, SIGKILL);
        while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
        }
      }
      return finish(EvalStatus::Timeout, "external command exceeded its time limit");
    }
    if (WIFSIGNALED(status)) {
      return finish(EvalStatus::Failed,
                    "external command killed by signal " + std::to_string(WTERMSIG(status)));
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      return finish(EvalStatus::Failed, "external command exited with code " +
                                            std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    }
    out.fitness = read_fitness_file(fitness_file, spec.expected_fitness_length);
    for (double v : out.fitness) {
      if (!std::isfinite(v)) {
        out.fitness.clear();
        return finish(EvalStatus::Failed, "non-finite fitness");
      }
    }
    return finish(EvalStatus::Ok, "");
  } catch (const std::exception& ex) {
    out.fitness.clear();
    return finish(EvalStatus::Failed, ex.what());
  }
}

}  // namespace twoloop::runner
