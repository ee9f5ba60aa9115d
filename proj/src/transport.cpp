#include "latentsearch/transport.hpp"

#include "latentsearch/errors.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <mutex>
#include <poll.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

namespace latentsearch {

namespace {

std::string errno_message(const char* what) {
    return std::string(what) + ": " + std::strerror(errno);
}

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

} // namespace

Subprocess::Subprocess(std::string command) : command_(std::move(command)) {
    ignore_sigpipe();

    int in_pipe[2];
    int out_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
        throw TransportError(errno_message("pipe"));
    }
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw TransportError(errno_message("pipe"));
    }

    pid_ = ::fork();
    if (pid_ < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) {
            ::close(fd);
        }
        throw TransportError(errno_message("fork"));
    }
    if (pid_ == 0) {
        // Own process group, so a forced stop also reaches whatever the shell started.
        ::setpgid(0, 0);
        ::dup2(in_pipe[0], STDIN_FILENO);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }

    ::setpgid(pid_, pid_);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

Subprocess::~Subprocess() {
    try {
        wait();
    } catch (...) {
    }
    if (from_child_ >= 0) {
        ::close(from_child_);
    }
}

void Subprocess::write_line(std::string_view line) {
    if (to_child_ < 0) {
        throw TransportError("write to '" + command_ + "' after stdin was closed");
    }
    std::string data(line);
    data.push_back('\n');
    std::size_t written = 0;
    while (written < data.size()) {
        const ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            if (errno == EPIPE) {
                throw TransportError("external process '" + command_ + "' exited (broken pipe)");
            }
            throw TransportError(errno_message("write"));
        }
        written += static_cast<std::size_t>(n);
    }
}

std::optional<std::string> Subprocess::read_line(std::chrono::milliseconds timeout) {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + timeout;
    for (;;) {
        if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            return line;
        }
        if (eof_) {
            return std::nullopt;
        }

        int wait_ms = -1;
        if (timeout.count() > 0) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
            if (left.count() <= 0) {
                throw TransportError("timed out after " + std::to_string(timeout.count()) +
                                     " ms waiting for '" + command_ + "'");
            }
            wait_ms = static_cast<int>(left.count());
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, wait_ms);
        if (ready < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw TransportError(errno_message("poll"));
        }
        if (ready == 0) {
            continue;
        }
        char chunk[4096];
        const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw TransportError(errno_message("read"));
        }
        if (n == 0) {
            eof_ = true;
            // A final unterminated line is dropped: every protocol message ends in '\n'.
            continue;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::string Subprocess::describe() const {
    return "process '" + command_ + "' (pid " + std::to_string(pid_) + ")";
}

void Subprocess::close_stdin() {
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
}

int Subprocess::wait(std::chrono::milliseconds grace) {
    if (status_) {
        return *status_;
    }
    close_stdin();
    if (pid_ <= 0) {
        return 0;
    }
    const auto deadline = std::chrono::steady_clock::now() + grace;
    int status = 0;
    for (;;) {
        const pid_t r = ::waitpid(pid_, &status, WNOHANG);
        if (r == pid_) {
            break;
        }
        if (r < 0 && errno != EINTR) {
            status = -1;
            break;
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    status_ = status;
    return status;
}

} // namespace latentsearch
