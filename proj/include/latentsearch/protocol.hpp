#pragma once

// Line-delimited JSON protocol spoken by external objective and distance processes.
//
//   handshake (process -> client, first line): {"protocol":"evolgan-obj/1","d":<int>}
//   request   (client -> process):             {"id":<uint64>,"z":[<d floats>]}
//   response  (process -> client):             {"id":<uint64>,"score":<float>}
//                                           or {"id":<uint64>,"error":"<message>"}
//   shutdown  (client -> process):             {"id":null,"cmd":"shutdown"}
//
// The handshake may carry optional "deterministic" (bool) and "meta" (object)
// fields. Distance servers use protocol "evolgan-dist/1" with requests
// {"id":..,"a":[..],"b":[..]} and responses {"id":..,"distance":..}.
// Reals are written with 17 significant digits, which round-trips binary64 exactly.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace latentsearch::protocol {

inline constexpr std::string_view kObjectiveProtocol = "evolgan-obj/1";
inline constexpr std::string_view kDistanceProtocol = "evolgan-dist/1";

std::string format_real(double value);
std::string format_reals(std::span<const double> values);

struct Handshake {
    std::string protocol;
    std::size_t dimension = 0;
    bool deterministic = true;
    nlohmann::json meta = nlohmann::json::object();
};

/// Throws TransportError on malformed JSON, wrong protocol tag or a missing/invalid "d".
Handshake parse_handshake(std::string_view line, std::string_view expected_protocol);
std::string encode_handshake(const Handshake& handshake);

std::string encode_objective_request(std::uint64_t id, std::span<const double> z);
std::string encode_distance_request(std::uint64_t id, std::span<const double> a, std::span<const double> b);
std::string encode_shutdown();

/// A decoded reply. Exactly one of `value` / `error` is set; `value` holds the
/// score or the distance depending on the protocol.
struct Reply {
    std::uint64_t id = 0;
    std::optional<double> value;
    std::optional<std::string> error;
};

/// `value_key` is "score" or "distance". Throws TransportError on malformed input.
Reply parse_reply(std::string_view line, std::string_view value_key);

std::string encode_score_reply(std::uint64_t id, double score);
std::string encode_error_reply(std::uint64_t id, std::string_view message);

/// Server-side decoding of an objective request. `id` is nullopt for the shutdown command.
struct Request {
    std::optional<std::uint64_t> id;
    bool shutdown = false;
    std::vector<double> z;
};
Request parse_objective_request(std::string_view line);

} // namespace latentsearch::protocol
