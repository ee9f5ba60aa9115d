// Test double for external objective / distance processes.
//
//   fake_objective_server --dim 4 [--mode MODE] [--log FILE] [--exit-after N]
//
// Modes:
//   echo          score = z[0]; a request of the wrong length gets an error reply
//   mismatch      replies carry id + 1
//   malformed     replies are not JSON
//   error         every request gets {"id":..,"error":"scorer failed"}
//   huge          score 1e999 (parses as infinity)
//   silent        never sends a handshake
//   bad-protocol  handshake announces another protocol
//   stochastic    handshake says deterministic=false; score = z[0] + call count
//   distance      evolgan-dist/1 server returning the euclidean distance
//
// Written against nlohmann/json directly, not the library's protocol helpers.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

using nlohmann::json;

int main(int argc, char** argv) {
    std::size_t dim = 4;
    std::string mode = "echo";
    std::string log_path;
    long exit_after = -1;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        const std::string value = argv[i + 1];
        if (flag == "--dim") {
            dim = std::stoul(value);
        } else if (flag == "--mode") {
            mode = value;
        } else if (flag == "--log") {
            log_path = value;
        } else if (flag == "--exit-after") {
            exit_after = std::stol(value);
        }
    }
    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path);
    }
    auto send = [&](const std::string& line) {
        std::cout << line << '\n' << std::flush;
        if (log) {
            log << "< " << line << '\n' << std::flush;
        }
    };

    if (mode == "silent") {
        std::this_thread::sleep_for(std::chrono::seconds(30));
        return 0;
    }
    if (mode == "bad-protocol") {
        send(json{{"protocol", "something-else/9"}, {"d", dim}}.dump());
    } else if (mode == "distance") {
        send(json{{"protocol", "evolgan-dist/1"}, {"d", dim}, {"meta", {{"metric", "fake-euclidean"}}}}.dump());
    } else if (mode == "stochastic") {
        send(json{{"protocol", "evolgan-obj/1"}, {"d", dim}, {"deterministic", false}}.dump());
    } else {
        send(json{{"protocol", "evolgan-obj/1"}, {"d", dim}}.dump());
    }

    long served = 0;
    long calls = 0;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (log) {
            log << "> " << line << '\n' << std::flush;
        }
        const json req = json::parse(line, nullptr, false);
        if (req.is_discarded()) {
            send(json{{"id", nullptr}, {"error", "malformed request"}}.dump());
            continue;
        }
        if (req.contains("cmd") && req["cmd"] == "shutdown") {
            return 0;
        }
        if (exit_after >= 0 && served >= exit_after) {
            return 3;
        }
        ++served;
        const auto id = req.at("id").get<std::uint64_t>();
        if (mode == "distance") {
            const auto a = req.at("a").get<std::vector<double>>();
            const auto b = req.at("b").get<std::vector<double>>();
            double ss = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                ss += (a[i] - b[i]) * (a[i] - b[i]);
            }
            send(json{{"id", id}, {"distance", std::sqrt(ss)}}.dump());
            continue;
        }
        const auto z = req.at("z").get<std::vector<double>>();
        if (mode == "mismatch") {
            send(json{{"id", id + 1}, {"score", z.at(0)}}.dump());
        } else if (mode == "malformed") {
            send("this is not json");
        } else if (mode == "error") {
            send(json{{"id", id}, {"error", "scorer failed"}}.dump());
        } else if (mode == "huge") {
            send("{\"id\":" + std::to_string(id) + ",\"score\":1e999}");
        } else if (z.size() != dim) {
            send(json{{"id", id}, {"error", "dimension mismatch"}}.dump());
        } else if (mode == "stochastic") {
            send(json{{"id", id}, {"score", z[0] + static_cast<double>(calls++)}}.dump());
        } else {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", z[0]);
            send("{\"id\":" + std::to_string(id) + ",\"score\":" + buf + "}");
        }
    }
    return 0;
}
