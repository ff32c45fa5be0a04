// Copyright 2026 The codequal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "codequal/error.hpp"

namespace codequal {

struct ProcessResult {
  int exit_code = -1;   // -1 when killed by a signal or timed out
  bool timed_out = false;
  std::string stdout_text;
  std::string stderr_text;
};

namespace internal_subprocess {

inline void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

/// Drains pipes until both close or the deadline passes. Returns false on
/// deadline expiry with whatever was read so far kept.
inline bool drain_until(int out_fd, int err_fd, std::string& out,
                        std::string& err,
                        std::chrono::steady_clock::time_point deadline) {
  char buf[4096];
  int fds[2] = {out_fd, err_fd};
  std::string* sinks[2] = {&out, &err};
  bool open_fds[2] = {out_fd >= 0, err_fd >= 0};
  while (open_fds[0] || open_fds[1]) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return false;
    int timeout_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
            .count());
    if (timeout_ms < 1) timeout_ms = 1;
    struct pollfd pfds[2];
    nfds_t n = 0;
    for (int i = 0; i < 2; ++i) {
      if (!open_fds[i]) continue;
      pfds[n].fd = fds[i];
      pfds[n].events = POLLIN;
      pfds[n].revents = 0;
      ++n;
    }
    int rc = ::poll(pfds, n, timeout_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw permanent_error(std::string("poll failed: ") +
                            std::strerror(errno));
    }
    if (rc == 0) continue;  // re-check deadline at loop head
    for (nfds_t i = 0; i < n; ++i) {
      if (!(pfds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      int which = (pfds[i].fd == fds[0]) ? 0 : 1;
      ssize_t got = ::read(pfds[i].fd, buf, sizeof(buf));
      if (got > 0) {
        sinks[which]->append(buf, static_cast<size_t>(got));
      } else if (got == 0 || (got < 0 && errno != EINTR)) {
        open_fds[which] = false;
      }
    }
  }
  return true;
}

}  // namespace internal_subprocess

/// Runs argv[0] with the given arguments, capturing stdout and stderr.
/// A missing executable raises a permanent error (detected through a
/// close-on-exec status pipe, so it is never confused with the child's own
/// exit code). Exceeding timeout_seconds kills the process group and
/// reports timed_out.
inline ProcessResult run_process(const std::vector<std::string>& argv,
                                 double timeout_seconds) {
  using internal_subprocess::close_fd;
  if (argv.empty()) throw permanent_error("empty command line");

  int out_pipe[2] = {-1, -1};
  int err_pipe[2] = {-1, -1};
  int status_pipe[2] = {-1, -1};
  if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0 ||
      ::pipe(status_pipe) != 0)
    throw permanent_error(std::string("pipe failed: ") +
                          std::strerror(errno));
  ::fcntl(status_pipe[1], F_SETFD, FD_CLOEXEC);

  pid_t pid = ::fork();
  if (pid < 0) {
    for (int* p : {out_pipe, err_pipe, status_pipe}) {
      close_fd(p[0]);
      close_fd(p[1]);
    }
    throw permanent_error(std::string("fork failed: ") +
                          std::strerror(errno));
  }

  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    for (int* p : {out_pipe, err_pipe}) {
      ::close(p[0]);
      ::close(p[1]);
    }
    ::close(status_pipe[0]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    ::execvp(cargv[0], cargv.data());
    int err = errno;  // exec failed; report it through the status pipe
    ssize_t ignored = ::write(status_pipe[1], &err, sizeof(err));
    (void)ignored;
    ::_exit(127);
  }

  close_fd(out_pipe[1]);
  close_fd(err_pipe[1]);
  close_fd(status_pipe[1]);

  int exec_errno = 0;
  {
    ssize_t got = ::read(status_pipe[0], &exec_errno, sizeof(exec_errno));
    if (got <= 0) exec_errno = 0;  // pipe closed on exec: launch succeeded
  }
  close_fd(status_pipe[0]);
  if (exec_errno != 0) {
    int status = 0;
    ::waitpid(pid, &status, 0);
    close_fd(out_pipe[0]);
    close_fd(err_pipe[0]);
    if (exec_errno == ENOENT)
      throw permanent_error("command not found: " + argv[0]);
    throw permanent_error("cannot run " + argv[0] + ": " +
                          std::strerror(exec_errno));
  }

  ProcessResult result;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(timeout_seconds));
  bool finished = internal_subprocess::drain_until(
      out_pipe[0], err_pipe[0], result.stdout_text, result.stderr_text,
      deadline);
  close_fd(out_pipe[0]);
  close_fd(err_pipe[0]);

  if (!finished) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    result.timed_out = true;
    result.exit_code = -1;
    return result;
  }

  int status = 0;
  if (::waitpid(pid, &status, 0) < 0)
    throw permanent_error(std::string("waitpid failed: ") +
                          std::strerror(errno));
  if (WIFEXITED(status))
    result.exit_code = WEXITSTATUS(status);
  else
    result.exit_code = -1;
  return result;
}

}  // namespace codequal
