#include "latentsearch/report_io.hpp"

#include "stat_oracles.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run_cli(const std::string& args) {
    const std::string cmd = std::string("'") + LATENTSEARCH_CLI + "' " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Result r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, n);
    }
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("latentsearch-cli-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(file(name)) << text;
        return file(name);
    }

  private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json last_json_line(const std::string& out) {
    std::istringstream in(out);
    std::string line;
    std::string last;
    while (std::getline(in, line)) {
        if (!line.empty() && line.front() == '{') {
            last = line;
        }
    }
    return json::parse(last);
}

const char* kSixCellGrid = R"({
  "name": "six-cells",
  "objective": {"kind": "sphere", "target_seed": 1},
  "grid": {"dimension": [16], "budget": [40, 320], "alpha": [0, 1, "inf"]},
  "replicas": 20,
  "base_seed": 5
})";

} // namespace

TEST_CASE("cli evolve: b + 1 evaluations") {
    const auto r = run_cli("evolve --alpha 0 --budget 40 --dim 256 --objective sphere --seed 1");
    REQUIRE(r.code == 0);
    const auto summary = last_json_line(r.out);
    CHECK(summary["evaluations"] == 41);
    for (const char* key : {"initial_score", "final_score", "hamming_drift", "evaluations"}) {
        CHECK(summary.contains(key));
    }
    CHECK(summary["final_score"].get<double>() >= summary["initial_score"].get<double>());
}

TEST_CASE("cli evolve: alpha inf resamples everything") {
    TempDir dir("inf");
    const auto trace = dir.file("trace.jsonl");
    const auto r = run_cli("evolve --alpha inf --budget 25 --dim 5 --objective sphere --trace-out '" + trace + "'");
    REQUIRE(r.code == 0);
    std::ifstream in(trace);
    const auto steps = latentsearch::read_trace_jsonl(in);
    REQUIRE(steps.size() == 25);
    for (const auto& s : steps) {
        CHECK(s.sampled_rate == 1.0);
    }
    // The header echoes the effective config.
    std::ifstream again(trace);
    std::string header;
    std::getline(again, header);
    const auto h = json::parse(header);
    CHECK(h["type"] == "header");
    CHECK(h["config"]["alpha"] == "inf");
    CHECK(h["config"]["budget"] == 25);
}

TEST_CASE("cli evolve: flags override the config file, which is echoed") {
    TempDir dir("override");
    const auto config = dir.write("run.json", R"({"dimension": 4, "alpha": 0, "budget": 10, "seed": 2,
                                                  "objective": {"kind": "sphere"}})");
    const auto r = run_cli("evolve --config '" + config + "' --budget 30 --alpha 0.5");
    REQUIRE(r.code == 0);
    const auto summary = last_json_line(r.out);
    CHECK(summary["evaluations"] == 31);
    CHECK(summary["config"]["alpha"] == 0.5);
    CHECK(summary["config"]["dimension"] == 4);
    CHECK(summary["config"]["seed"] == 2);
}

TEST_CASE("cli evolve: a report file equals the printed summary") {
    TempDir dir("report");
    const auto report = dir.file("summary.json");
    const auto r = run_cli("evolve --alpha 1 --budget 12 --dim 3 --objective staircase:3 --report-out '" + report + "'");
    REQUIRE(r.code == 0);
    CHECK(json::parse(slurp(report)) == last_json_line(r.out));
}

TEST_CASE("cli evolve: start point") {
    TempDir dir("start");
    const auto good = dir.write("z0.json", "[0.5, 0.5, 0.5]");
    const auto bad = dir.write("z0_bad.json", "[0.5, 0.5]");
    auto r = run_cli("evolve --alpha 0 --budget 1 --dim 3 --objective constant:1 --start-point '" + good + "'");
    REQUIRE(r.code == 0);
    CHECK(last_json_line(r.out)["final_point"] == json::parse("[0.5, 0.5, 0.5]"));

    r = run_cli("evolve --alpha 0 --budget 5 --dim 3 --objective sphere --start-point '" + bad + "'");
    CHECK(r.code == 2);
    CHECK(r.out.find("dimension mismatch") != std::string::npos);
}

TEST_CASE("cli evolve: configuration errors exit 2") {
    CHECK(run_cli("evolve --alpha 0 --budget 5 --dim 3").code == 2);
    CHECK(run_cli("evolve --alpha -1 --budget 5 --dim 3 --objective sphere").code == 2);
    CHECK(run_cli("evolve --alpha 0 --budget 0 --dim 3 --objective sphere").code == 2);
    CHECK(run_cli("evolve --alpha 0 --budget 5 --dim 3 --objective nonsense").code == 2);
    CHECK(run_cli("evolve --config /nonexistent/run.json").code == 2);
    TempDir dir("strict");
    const auto typo = dir.write("run.json", R"({"dimension": 4, "alpha": 0, "budgte": 10, "objective": {"kind": "sphere"}})");
    const auto r = run_cli("evolve --config '" + typo + "'");
    CHECK(r.code == 2);
    CHECK(r.out.find("budgte") != std::string::npos);
}

TEST_CASE("cli evolve: objective failures exit 3") {
    const std::string server = std::string("'") + LATENTSEARCH_FAKE_SERVER + "'";
    auto r = run_cli("evolve --alpha 0 --budget 5 --dim 2 --objective \"external:" + server + " --dim 2 --mode error\"");
    CHECK(r.code == 3);
    r = run_cli("evolve --alpha 0 --budget 5 --dim 2 --objective \"external:" + server + " --dim 2 --mode mismatch\"");
    CHECK(r.code == 3);
    CHECK(r.out.find("id mismatch") != std::string::npos);
    r = run_cli("evolve --alpha 0 --budget 5 --dim 2 --objective \"external:" + server + " --dim 2 --exit-after 3\"");
    CHECK(r.code == 3);
    // Handshake dimension disagreeing with --dim is a configuration problem.
    r = run_cli("evolve --alpha 0 --budget 5 --dim 3 --objective \"external:" + server + " --dim 2\"");
    CHECK(r.code == 2);
}

TEST_CASE("cli evolve: external echo objective") {
    const std::string server = std::string("'") + LATENTSEARCH_FAKE_SERVER + "'";
    const auto r = run_cli("evolve --alpha 0.5 --budget 30 --dim 4 --seed 3 --objective \"external:" + server + " --dim 4\"");
    REQUIRE(r.code == 0);
    const auto ext = last_json_line(r.out);
    const auto local = last_json_line(run_cli("evolve --alpha 0.5 --budget 30 --dim 4 --seed 3 --objective first-coordinate").out);
    CHECK(ext["final_point"] == local["final_point"]);
    CHECK(ext["evaluations"] == 31);

    // A server declaring itself non-deterministic switches on re-evaluation.
    const auto s = run_cli("evolve --alpha 0.5 --budget 30 --dim 1 --objective \"external:" + server +
                           " --dim 1 --mode stochastic\"");
    REQUIRE(s.code == 0);
    CHECK(last_json_line(s.out)["evaluations"] == 61);
}

TEST_CASE("cli campaign: a 2 x 3 grid gives six CSV rows, identical across --parallel") {
    TempDir dir("campaign");
    const auto config = dir.write("campaign.json", kSixCellGrid);
    // The report echoes its output paths, so both runs write to the same ones.
    const auto csv_path = dir.file("report.csv");
    const auto report_path = dir.file("report.json");
    const std::string outputs = " --csv-out '" + csv_path + "' --report-out '" + report_path + "'";
    auto r = run_cli("campaign --config '" + config + "' --parallel 1" + outputs);
    REQUIRE(r.code == 0);
    const auto csv1 = slurp(csv_path);
    const auto json1 = slurp(report_path);
    r = run_cli("campaign --config '" + config + "' --parallel 4" + outputs);
    REQUIRE(r.code == 0);
    CHECK(csv1 == slurp(csv_path));
    CHECK(json1 == slurp(report_path));

    std::istringstream in(csv1);
    const auto table = latentsearch::read_csv(in);
    CHECK(table.rows.size() == 6);
    const auto report = latentsearch::campaign_report_from_json(json::parse(json1));
    CHECK(report.cells.size() == 6);
    CHECK(report.config["grid"]["alpha"][2] == "inf");
}

TEST_CASE("cli campaign: traces and stdout report") {
    TempDir dir("campaign-trace");
    const auto config = dir.write("campaign.json", R"({"objective": {"kind": "sphere"},
        "grid": {"dimension": [3], "budget": [4], "alpha": [0]}, "replicas": 2})");
    const auto traces = dir.file("traces.jsonl");
    auto r = run_cli("campaign --config '" + config + "' --trace-out '" + traces + "'");
    REQUIRE(r.code == 0);
    std::ifstream in(traces);
    CHECK(latentsearch::read_trace_jsonl(in).size() == 8);
    r = run_cli("campaign --config '" + config + "'");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["cells"].size() == 1);
}

TEST_CASE("cli campaign: errors") {
    TempDir dir("campaign-err");
    const auto empty = dir.write("empty.json", R"({"objective": {"kind": "sphere"},
        "grid": {"dimension": [3], "budget": [], "alpha": [0]}, "replicas": 2})");
    CHECK(run_cli("campaign --config '" + empty + "'").code == 2);
    const std::string server = std::string(LATENTSEARCH_FAKE_SERVER);
    const auto failing = dir.write("failing.json", json{{"objective", {{"kind", "external"}, {"command", "'" + server + "' --dim 2 --mode error"}}},
                                                        {"grid", {{"dimension", {2}}, {"budget", {3}}, {"alpha", {0}}}},
                                                        {"replicas", 2}}
                                                       .dump());
    const auto csv = dir.file("failing.csv");
    const auto r = run_cli("campaign --config '" + failing + "' --csv-out '" + csv + "'");
    CHECK(r.code == 3);
    std::ifstream in(csv);
    const auto table = latentsearch::read_csv(in);
    CHECK(table.rows.at(0)[table.column("status")] == "failed");
}

TEST_CASE("cli diversity") {
    TempDir dir("diversity");
    auto r = run_cli("diversity '" + dir.write("one.json", "[[1, 2]]") + "'");
    CHECK(r.code == 2);
    r = run_cli("diversity '" + dir.write("bad.json", "[[1, 2], [3]]") + "'");
    CHECK(r.code == 2);
    r = run_cli("diversity '" + dir.write("garbage.json", "{{{") + "'");
    CHECK(r.code == 2);

    r = run_cli("diversity --points '" + dir.write("same.jsonl", "[1, 2]\n[1, 2]\n") + "'");
    REQUIRE(r.code == 0);
    auto report = last_json_line(r.out);
    CHECK(report["mean"] == 0.0);
    CHECK(report["n"] == 2);
    CHECK(report["metric"] == "euclidean-latent");

    latentsearch::RandomStream rng(2718);
    json points = json::array();
    for (int i = 0; i < 10000; ++i) {
        points.push_back({rng.standard_normal(), rng.standard_normal()});
    }
    const auto out = dir.file("report.json");
    r = run_cli("diversity '" + dir.write("normal.json", points.dump()) + "' --seed 3 --report-out '" + out + "'");
    REQUIRE(r.code == 0);
    report = json::parse(slurp(out));
    CHECK(report["n"] == 10000);
    CHECK(report["pairing_seed"] == 3);
    const double mean = report["mean"].get<double>();
    const double se = report["stderr"].get<double>();
    CHECK(std::abs(mean - std::sqrt(std::numbers::pi)) <= 3.0 * se);
}

TEST_CASE("cli diversity reads campaign-style run summaries") {
    TempDir dir("summaries");
    std::string lines;
    for (int seed = 0; seed < 5; ++seed) {
        const auto r = run_cli("evolve --alpha 0 --budget 10 --dim 3 --objective sphere --seed " + std::to_string(seed));
        REQUIRE(r.code == 0);
        lines += last_json_line(r.out).dump() + "\n";
    }
    const auto r = run_cli("diversity --metric hamming '" + dir.write("runs.jsonl", lines) + "'");
    REQUIRE(r.code == 0);
    CHECK(last_json_line(r.out)["metric"] == "normalized-hamming-latent");
}

TEST_CASE("cli probe") {
    const std::string server = std::string("'") + LATENTSEARCH_FAKE_SERVER + "'";
    auto r = run_cli("probe --objective \"external:" + server + " --dim 3\" --point '[0.25, 1, 2]'");
    REQUIRE(r.code == 0);
    const auto j = last_json_line(r.out);
    CHECK(j["d"] == 3);
    CHECK(j["score"] == 0.25);
    r = run_cli("probe --objective \"external:" + server + " --mode silent\" --timeout-ms 200");
    CHECK(r.code == 3);
    r = run_cli("probe --objective sphere");
    CHECK(r.code == 2);
}

TEST_CASE("cli usage errors") {
    CHECK(run_cli("").code != 0);
    CHECK(run_cli("frobnicate").code != 0);
    CHECK(run_cli("--version").code == 0);
}
