#include "latentsearch/external_objective.hpp"

#include "latentsearch/errors.hpp"

namespace latentsearch {

ExternalObjective::ExternalObjective(std::unique_ptr<LineTransport> transport,
                                     std::chrono::milliseconds handshake_timeout,
                                     std::chrono::milliseconds response_timeout)
    : transport_(std::move(transport)), response_timeout_(response_timeout) {
    const auto line = transport_->read_line(handshake_timeout);
    if (!line) {
        throw TransportError(transport_->describe() + " exited before sending a handshake");
    }
    handshake_ = protocol::parse_handshake(*line, protocol::kObjectiveProtocol);
}

ExternalObjective::~ExternalObjective() {
    try {
        shutdown();
    } catch (...) {
    }
}

std::unique_ptr<ExternalObjective> ExternalObjective::connect(const ExternalCommand& command) {
    if (command.command.empty()) {
        throw ConfigError("external objective command is empty");
    }
    return std::make_unique<ExternalObjective>(std::make_unique<Subprocess>(command.command),
                                               command.handshake_timeout, command.response_timeout);
}

void ExternalObjective::shutdown() {
    if (closed_) {
        return;
    }
    closed_ = true;
    transport_->write_line(protocol::encode_shutdown());
}

double ExternalObjective::score(std::span<const double> z) {
    if (closed_) {
        throw TransportError("external objective used after shutdown");
    }
    const std::uint64_t id = next_id_++;
    transport_->write_line(protocol::encode_objective_request(id, z));
    const auto line = transport_->read_line(response_timeout_);
    if (!line) {
        closed_ = true;
        throw TransportError(transport_->describe() + " exited while request " + std::to_string(id) +
                             " was pending");
    }
    const protocol::Reply reply = protocol::parse_reply(*line, "score");
    if (reply.id != id) {
        throw TransportError("id mismatch: sent request " + std::to_string(id) + ", reply carries id " +
                             std::to_string(reply.id));
    }
    if (reply.error) {
        throw EvaluationError("external objective reported an error for request " + std::to_string(id) + ": " +
                              *reply.error);
    }
    return *reply.value;
}

} // namespace latentsearch
