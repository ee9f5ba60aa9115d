#pragma once

#include "latentsearch/objectives.hpp"
#include "latentsearch/protocol.hpp"
#include "latentsearch/transport.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

namespace latentsearch {

struct ExternalCommand {
    std::string command;
    std::chrono::milliseconds handshake_timeout{10000};
    /// Zero waits indefinitely for each score.
    std::chrono::milliseconds response_timeout{0};
};

/// Objective evaluated by a separate process over the line-JSON protocol.
///
/// One request is in flight at a time and ids increase by one per request
/// starting at 1. The dimension and determinism flag come from the handshake.
/// Destruction sends the shutdown command.
class ExternalObjective final : public Objective {
  public:
    ExternalObjective(std::unique_ptr<LineTransport> transport, std::chrono::milliseconds handshake_timeout,
                      std::chrono::milliseconds response_timeout = std::chrono::milliseconds(0));
    ~ExternalObjective() override;

    /// Spawns `/bin/sh -c command` and completes the handshake.
    static std::unique_ptr<ExternalObjective> connect(const ExternalCommand& command);

    std::size_t dimension() const override { return handshake_.dimension; }
    bool deterministic() const override { return handshake_.deterministic; }
    bool concurrency_safe() const override { return false; }
    std::string name() const override { return "external"; }

    const protocol::Handshake& handshake() const noexcept { return handshake_; }
    std::uint64_t requests_sent() const noexcept { return next_id_ - 1; }

    /// Idempotent.
    void shutdown();

  protected:
    double score(std::span<const double> z) override;

  private:
    std::unique_ptr<LineTransport> transport_;
    std::chrono::milliseconds response_timeout_;
    protocol::Handshake handshake_;
    std::uint64_t next_id_ = 1;
    bool closed_ = false;
};

} // namespace latentsearch
