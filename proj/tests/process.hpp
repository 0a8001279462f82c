#pragma once

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "support.hpp"

extern char** environ;

namespace support {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("movavg-" + name + "-" +
                                                       std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  return out + "'";
}

/// Runs the CLI binary with an isolated config directory. `env` entries are
/// prepended as NAME=value assignments.
inline CliResult run_cli(const std::vector<std::string>& args,
                         const std::vector<std::string>& env = {}) {
  const auto dir = scratch_dir("cli");
  const auto out_path = dir / "stdout", err_path = dir / "stderr";
  std::string cmd = "XDG_CONFIG_HOME=" + shell_quote((dir / "xdg").string()) + " ";
  for (const auto& e : env) cmd += e + " ";
  cmd += shell_quote(MOVAVG_CLI_PATH);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " >" + shell_quote(out_path.string()) + " 2>" + shell_quote(err_path.string());
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path.string());
  result.err = read_file(err_path.string());
  return result;
}

/// A CLI process running in the background with stdout on a pipe.
class BackgroundCli {
 public:
  explicit BackgroundCli(const std::vector<std::string>& args) {
    int fds[2];
    if (::pipe(fds) != 0) return;
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    std::vector<std::string> argv_store = {MOVAVG_CLI_PATH};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    argv.push_back(nullptr);
    if (posix_spawn(&pid_, MOVAVG_CLI_PATH, &actions, nullptr, argv.data(), environ) != 0) {
      pid_ = -1;
    }
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    out_fd_ = fds[0];
  }

  ~BackgroundCli() {
    if (pid_ > 0 && !reaped_) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
    if (out_fd_ >= 0) ::close(out_fd_);
  }

  /// Blocks until a full line arrives on stdout (empty on EOF).
  std::string read_line() {
    std::string line;
    char c = 0;
    while (::read(out_fd_, &c, 1) == 1) {
      if (c == '\n') return line;
      line.push_back(c);
    }
    return line;
  }

  /// Sends `sig` and returns the exit code (-1 if killed by a signal).
  int stop(int sig = SIGTERM) {
    ::kill(pid_, sig);
    return wait();
  }

  int wait() {
    int status = 0;
    ::waitpid(pid_, &status, 0);
    reaped_ = true;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

 private:
  pid_t pid_ = -1;
  int out_fd_ = -1;
  bool reaped_ = false;
};

/// Port number from a "Listening on http://host:port/" line.
inline int port_from_banner(const std::string& line) {
  const auto colon = line.rfind(':');
  if (colon == std::string::npos) return -1;
  return std::atoi(line.c_str() + colon + 1);
}

}  // namespace support
