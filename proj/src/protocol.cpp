#include "latentsearch/protocol.hpp"

#include "latentsearch/errors.hpp"

#include <cstdio>

namespace latentsearch::protocol {

using nlohmann::json;

namespace {

json parse_line(std::string_view line, const char* what) {
    try {
        return json::parse(line);
    } catch (const json::out_of_range& e) {
        // A number literal too large for a double, such as 1e999.
        throw EvaluationError(std::string("non-finite number in ") + what + ": '" +
                              std::string(line.substr(0, 200)) + "'");
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed ") + what + ": " + e.what() + " in line '" +
                             std::string(line.substr(0, 200)) + "'");
    }
}

std::uint64_t parse_id(const json& msg) {
    const auto it = msg.find("id");
    if (it == msg.end() || !it->is_number_unsigned()) {
        if (it != msg.end() && it->is_number_integer() && it->get<std::int64_t>() >= 0) {
            return it->get<std::uint64_t>();
        }
        throw TransportError("reply is missing a non-negative integer \"id\": " + msg.dump());
    }
    return it->get<std::uint64_t>();
}

} // namespace

std::string format_real(double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string format_reals(std::span<const double> values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += format_real(values[i]);
    }
    out += ']';
    return out;
}

Handshake parse_handshake(std::string_view line, std::string_view expected_protocol) {
    const json msg = parse_line(line, "handshake");
    if (!msg.is_object()) {
        throw TransportError("handshake is not a JSON object: " + std::string(line));
    }
    Handshake hs;
    // A missing tag is read as the expected protocol; a different tag is rejected.
    hs.protocol = std::string(expected_protocol);
    if (const auto p = msg.find("protocol"); p != msg.end()) {
        hs.protocol = p->is_string() ? p->get<std::string>() : p->dump();
    }
    if (hs.protocol != expected_protocol) {
        throw TransportError("handshake announced protocol '" + hs.protocol + "', expected '" +
                             std::string(expected_protocol) + "'");
    }
    const auto d = msg.find("d");
    if (d == msg.end() || !d->is_number_integer() || d->get<std::int64_t>() < 1) {
        throw TransportError("handshake \"d\" must be a positive integer: " + msg.dump());
    }
    hs.dimension = d->get<std::size_t>();
    if (const auto det = msg.find("deterministic"); det != msg.end()) {
        if (!det->is_boolean()) {
            throw TransportError("handshake \"deterministic\" must be a boolean");
        }
        hs.deterministic = det->get<bool>();
    }
    if (const auto meta = msg.find("meta"); meta != msg.end()) {
        hs.meta = *meta;
    }
    return hs;
}

std::string encode_handshake(const Handshake& handshake) {
    json msg = {{"protocol", handshake.protocol}, {"d", handshake.dimension}};
    if (!handshake.deterministic) {
        msg["deterministic"] = false;
    }
    if (!handshake.meta.empty()) {
        msg["meta"] = handshake.meta;
    }
    return msg.dump();
}

std::string encode_objective_request(std::uint64_t id, std::span<const double> z) {
    return "{\"id\":" + std::to_string(id) + ",\"z\":" + format_reals(z) + "}";
}

std::string encode_distance_request(std::uint64_t id, std::span<const double> a, std::span<const double> b) {
    return "{\"id\":" + std::to_string(id) + ",\"a\":" + format_reals(a) + ",\"b\":" + format_reals(b) + "}";
}

std::string encode_shutdown() {
    return R"({"id":null,"cmd":"shutdown"})";
}

Reply parse_reply(std::string_view line, std::string_view value_key) {
    const json msg = parse_line(line, "reply");
    if (!msg.is_object()) {
        throw TransportError("reply is not a JSON object: " + std::string(line));
    }
    Reply reply;
    reply.id = parse_id(msg);
    const auto value = msg.find(value_key);
    const auto error = msg.find("error");
    if (value != msg.end() && error != msg.end()) {
        throw TransportError("reply carries both \"" + std::string(value_key) + "\" and \"error\"");
    }
    if (value != msg.end()) {
        if (!value->is_number()) {
            throw TransportError("reply \"" + std::string(value_key) + "\" is not a number: " + msg.dump());
        }
        reply.value = value->get<double>();
    } else if (error != msg.end()) {
        reply.error = error->is_string() ? error->get<std::string>() : error->dump();
    } else {
        throw TransportError("reply has neither \"" + std::string(value_key) + "\" nor \"error\": " + msg.dump());
    }
    return reply;
}

std::string encode_score_reply(std::uint64_t id, double score) {
    return "{\"id\":" + std::to_string(id) + ",\"score\":" + format_real(score) + "}";
}

std::string encode_error_reply(std::uint64_t id, std::string_view message) {
    return json{{"id", id}, {"error", message}}.dump();
}

Request parse_objective_request(std::string_view line) {
    const json msg = parse_line(line, "request");
    if (!msg.is_object()) {
        throw TransportError("request is not a JSON object");
    }
    Request req;
    if (const auto cmd = msg.find("cmd"); cmd != msg.end()) {
        req.shutdown = cmd->is_string() && cmd->get<std::string>() == "shutdown";
        if (!req.shutdown) {
            throw TransportError("unknown command: " + cmd->dump());
        }
        return req;
    }
    req.id = parse_id(msg);
    const auto z = msg.find("z");
    if (z == msg.end() || !z->is_array()) {
        throw TransportError("request \"z\" must be an array");
    }
    req.z.reserve(z->size());
    for (const auto& v : *z) {
        if (!v.is_number()) {
            throw TransportError("request \"z\" contains a non-number");
        }
        req.z.push_back(v.get<double>());
    }
    return req;
}

} // namespace latentsearch::protocol
