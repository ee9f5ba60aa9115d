#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>

namespace latentsearch {

/// Bidirectional newline-delimited text channel.
class LineTransport {
  public:
    virtual ~LineTransport() = default;

    /// Sends `line` followed by '\n'. Throws TransportError if the peer is gone.
    virtual void write_line(std::string_view line) = 0;

    /// Next line without its terminator, or nullopt once the peer closed the
    /// channel. A zero timeout waits indefinitely; otherwise throws
    /// TransportError when no complete line arrives in time.
    virtual std::optional<std::string> read_line(std::chrono::milliseconds timeout) = 0;

    /// Short human-readable peer description for diagnostics.
    virtual std::string describe() const = 0;
};

/// Child process started with `/bin/sh -c command`; its stdin/stdout are the channel.
///
/// stderr is inherited. The destructor closes the child's stdin and reaps it,
/// killing it if it does not exit within a short grace period. SIGPIPE is
/// ignored process-wide once the first child is spawned so a dead peer shows up
/// as a TransportError instead of terminating the caller.
class Subprocess final : public LineTransport {
  public:
    explicit Subprocess(std::string command);
    ~Subprocess() override;

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    void write_line(std::string_view line) override;
    std::optional<std::string> read_line(std::chrono::milliseconds timeout) override;
    std::string describe() const override;

    void close_stdin();

    /// Blocks until exit (up to `grace`, then SIGKILL). Returns the wait status.
    int wait(std::chrono::milliseconds grace = std::chrono::milliseconds(2000));

  private:
    std::string command_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool eof_ = false;
    std::optional<int> status_;
};

} // namespace latentsearch
