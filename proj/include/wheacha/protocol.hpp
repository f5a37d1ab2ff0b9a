#pragma once

#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "wheacha/errors.hpp"

namespace wheacha {

// Bidirectional line-oriented pipe to a child process. One request line in,
// one reply line out, in order.
class LineProcess {
 public:
  explicit LineProcess(const std::vector<std::string>& argv) {
    if (argv.empty()) throw ProtocolError("empty external command");
    signal(SIGPIPE, SIG_IGN);  // a dead child surfaces as a write error instead
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
      throw ProtocolError("pipe() failed");
    pid_ = fork();
    if (pid_ < 0) throw ProtocolError("fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      std::vector<char*> cargv;
      for (const std::string& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
      cargv.push_back(nullptr);
      execvp(cargv[0], cargv.data());
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = from_child[0];
    out_fd_ = to_child[1];
  }

  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  ~LineProcess() {
    if (out_fd_ >= 0) close(out_fd_);
    if (in_fd_ >= 0) close(in_fd_);
    if (pid_ > 0) {
      int status = 0;
      if (waitpid(pid_, &status, WNOHANG) == 0) {
        kill(pid_, SIGTERM);
        waitpid(pid_, &status, 0);
      }
    }
  }

  std::string request(const std::string& line, int timeout_ms) {
    std::string payload = line + "\n";
    std::size_t off = 0;
    while (off < payload.size()) {
      ssize_t n = write(out_fd_, payload.data() + off, payload.size() - off);
      if (n < 0) throw ProtocolError("write to external model failed");
      off += static_cast<std::size_t>(n);
    }
    for (;;) {
      auto nl = buf_.find('\n');
      if (nl != std::string::npos) {
        std::string reply = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return reply;
      }
      struct pollfd pfd{in_fd_, POLLIN, 0};
      int pr = poll(&pfd, 1, timeout_ms);
      if (pr == 0) throw ProtocolError("external model timed out");
      if (pr < 0) throw ProtocolError("poll() failed");
      char chunk[4096];
      ssize_t n = read(in_fd_, chunk, sizeof(chunk));
      if (n <= 0) throw ProtocolError("external model closed the stream");
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buf_;
};

inline std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::istringstream ss(cmd);
  std::string word;
  while (ss >> word) out.push_back(word);
  return out;
}

}  // namespace wheacha
