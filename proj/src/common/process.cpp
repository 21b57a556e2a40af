#include "semaclaw/common/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "semaclaw/common/error.hpp"

namespace semaclaw {

namespace {

struct Pipe {
    int fds[2] = {-1, -1};
    Pipe() {
        if (::pipe2(fds, O_CLOEXEC) != 0) fail(Errc::io, "pipe() failed");
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (fds[0] >= 0) ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0) ::close(fds[1]);
        fds[1] = -1;
    }
};

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options) {
    if (argv.empty()) fail(Errc::argument, "empty command");
    Pipe in, out, err;

    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    pid_t pid = ::fork();
    if (pid < 0) fail(Errc::io, "fork() failed");
    if (pid == 0) {
        ::dup2(in.fds[0], STDIN_FILENO);
        ::dup2(out.fds[1], STDOUT_FILENO);
        ::dup2(err.fds[1], STDERR_FILENO);
        ::setpgid(0, 0);
        if (options.workdir && ::chdir(options.workdir->c_str()) != 0) _exit(126);
        for (const auto& [k, v] : options.env) ::setenv(k.c_str(), v.c_str(), 1);
        ::execvp(cargv[0], cargv.data());
        _exit(127);
    }
    ::setpgid(pid, pid);
    in.close_read();
    out.close_write();
    err.close_write();
    ::signal(SIGPIPE, SIG_IGN);

    ProcessResult result;
    std::size_t written = 0;
    if (options.stdin_data.empty()) in.close_write();
    auto deadline = std::chrono::steady_clock::now() + options.timeout;
    char buf[8192];

    auto drain = [&](int fd, std::string& sink) {
        ssize_t n = ::read(fd, buf, sizeof buf);
        if (n <= 0) return false;
        auto room = options.max_output > sink.size() ? options.max_output - sink.size() : 0;
        if (static_cast<std::size_t>(n) > room) result.truncated = true;
        sink.append(buf, std::min<std::size_t>(room, static_cast<std::size_t>(n)));
        return true;
    };

    while (out.fds[0] >= 0 || err.fds[0] >= 0) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            result.timed_out = true;
            ::kill(-pid, SIGKILL);
            break;
        }
        std::vector<pollfd> pfds;
        if (out.fds[0] >= 0) pfds.push_back({out.fds[0], POLLIN, 0});
        if (err.fds[0] >= 0) pfds.push_back({err.fds[0], POLLIN, 0});
        if (in.fds[1] >= 0) pfds.push_back({in.fds[1], POLLOUT, 0});
        int rc = ::poll(pfds.data(), pfds.size(), static_cast<int>(std::min<long>(remaining.count(), 1000)));
        if (rc < 0 && errno != EINTR) break;
        for (const auto& p : pfds) {
            if (p.revents == 0) continue;
            if (p.fd == in.fds[1]) {
                ssize_t n = ::write(p.fd, options.stdin_data.data() + written,
                                    options.stdin_data.size() - written);
                if (n > 0) written += static_cast<std::size_t>(n);
                if (n < 0 || written >= options.stdin_data.size()) in.close_write();
            } else if (p.fd == out.fds[0]) {
                if (!drain(p.fd, result.out)) out.close_read();
            } else if (p.fd == err.fds[0]) {
                if (!drain(p.fd, result.err)) err.close_read();
            }
        }
    }
    in.close_write();

    int status = 0;
    if (result.timed_out) {
        ::waitpid(pid, &status, 0);
        return result;
    }
    for (;;) {
        pid_t w = ::waitpid(pid, &status, WNOHANG);
        if (w == pid) break;
        if (w < 0 && errno != EINTR) break;
        if (std::chrono::steady_clock::now() >= deadline) {
            result.timed_out = true;
            ::kill(-pid, SIGKILL);
            ::waitpid(pid, &status, 0);
            return result;
        }
        ::usleep(1000);
    }
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

ProcessResult run_shell(const std::string& command, const ProcessOptions& options) {
    return run_process({"/bin/sh", "-c", command}, options);
}

}  // namespace semaclaw
