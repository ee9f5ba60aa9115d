// latentsearch command-line frontend.
//
//   latentsearch evolve    [--config run.json] [--alpha A] [--budget B] [--dim D] ...
//   latentsearch campaign  --config campaign.json [--parallel N]
//   latentsearch diversity --points points.jsonl [--metric euclidean] [--seed S]
//   latentsearch probe     --objective external:<command> [--point z.json]
//
// Exit codes: 0 success, 2 configuration/input error, 3 objective or
// transport error, 4 internal invariant violation.

#include "latentsearch/config.hpp"
#include "latentsearch/diversity.hpp"
#include "latentsearch/errors.hpp"
#include "latentsearch/evolve.hpp"
#include "latentsearch/external_objective.hpp"
#include "latentsearch/harness.hpp"
#include "latentsearch/report_io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace ls = latentsearch;
using nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kConfig = 2, kObjective = 3, kInvariant = 4 };

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("latentsearch");
    logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("LATENTSEARCH_LOG")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            spdlog::warn("ignoring unknown LATENTSEARCH_LOG level '{}'", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ls::ConfigError("cannot write '" + path + "'");
    }
    return out;
}

struct EvolveArgs {
    std::string config;
    std::optional<std::string> alpha;
    std::optional<std::uint64_t> budget;
    std::optional<std::size_t> dim;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> objective;
    std::optional<std::string> start_point;
    std::optional<std::string> trace_out;
    std::optional<std::string> report_out;
    bool reevaluate = false;
};

int cmd_evolve(const EvolveArgs& args) {
    ls::RunConfig rc;
    if (!args.config.empty()) {
        rc = ls::RunConfig::from_json(ls::read_json_file(args.config));
    }
    if (args.alpha) {
        rc.alpha = ls::parse_alpha(*args.alpha);
    }
    if (args.budget) {
        rc.budget = *args.budget;
    }
    if (args.dim) {
        rc.dimension = *args.dim;
    }
    if (args.seed) {
        rc.seed = *args.seed;
    }
    if (args.objective) {
        rc.objective = ls::ObjectiveSpec::from_flag(*args.objective);
    }
    if (args.start_point) {
        rc.start_point = *args.start_point;
    }
    if (args.trace_out) {
        rc.trace_out = *args.trace_out;
    }
    if (args.report_out) {
        rc.report_out = *args.report_out;
    }
    if (args.reevaluate) {
        rc.reevaluate_incumbent = true;
    }

    ls::EvolConfig config = rc.evol_config();
    const ls::LatentDistribution dist = rc.distribution.build(config.dimension);
    std::optional<ls::LatentVector> start;
    if (rc.start_point) {
        start = ls::read_start_point(*rc.start_point);
        if (start->size() != config.dimension) {
            throw ls::DimensionMismatch("start point '" + *rc.start_point + "'", config.dimension, start->size());
        }
    }

    auto objective = rc.objective->build(config.dimension, dist);
    if (rc.objective->external() && !objective->deterministic() && !config.reevaluate_incumbent) {
        spdlog::info("external objective declared itself non-deterministic; re-evaluating the incumbent");
        config.reevaluate_incumbent = true;
        rc.reevaluate_incumbent = true;
    }
    const json effective = rc.to_json();
    spdlog::debug("effective config: {}", effective.dump());

    const ls::RunTrace trace = ls::evolve(*objective, dist, config, start);
    if (auto* ext = dynamic_cast<ls::ExternalObjective*>(objective.get())) {
        ext->shutdown();
    }

    if (rc.trace_out) {
        auto out = open_output(*rc.trace_out);
        ls::write_trace_jsonl(out, trace, json{{"config", effective}});
    }
    const std::string summary = ls::run_summary_json(trace, effective).dump();
    if (rc.report_out) {
        open_output(*rc.report_out) << summary << '\n';
    }
    std::cout << summary << '\n';
    spdlog::info("initial {} -> final {}, drift {}, {} evaluations", trace.initial_score.value,
                 trace.final_score.value, trace.hamming_drift, trace.evaluations);
    return kOk;
}

struct CampaignArgs {
    std::string config;
    std::size_t parallel = 1;
    std::optional<std::string> report_out;
    std::optional<std::string> csv_out;
    std::optional<std::string> trace_out;
};

int cmd_campaign(const CampaignArgs& args) {
    ls::Campaign campaign = ls::Campaign::from_json(ls::read_json_file(args.config));
    if (args.report_out) {
        campaign.report_out = *args.report_out;
    }
    if (args.csv_out) {
        campaign.csv_out = *args.csv_out;
    }
    if (args.trace_out) {
        campaign.trace_out = *args.trace_out;
    }

    ls::CampaignOptions options;
    options.keep_traces = campaign.trace_out.has_value();
    spdlog::info("campaign '{}': {} cells x {} replicas on {} threads", campaign.name, campaign.cells().size(),
                 campaign.replicas, args.parallel);
    const ls::CampaignReport report = ls::run_campaign(campaign, args.parallel, options);
    const json report_json = ls::campaign_report_to_json(report);

    if (campaign.report_out) {
        open_output(*campaign.report_out) << report_json.dump(2) << '\n';
    }
    if (campaign.csv_out) {
        auto out = open_output(*campaign.csv_out);
        ls::write_campaign_csv(out, report);
    }
    if (campaign.trace_out) {
        auto out = open_output(*campaign.trace_out);
        out << json{{"type", "header"}, {"config", report.config}}.dump() << '\n';
        for (const auto& run : report.runs) {
            if (run.trace) {
                ls::write_trace_jsonl(out, *run.trace, nullptr, json{{"cell", run.cell}, {"replica", run.replica}});
            }
        }
    }
    if (!campaign.report_out && !campaign.csv_out) {
        std::cout << report_json.dump(2) << '\n';
    }
    if (report.failed_runs > 0) {
        for (const auto& cell : report.cells) {
            if (cell.failed > 0) {
                spdlog::error("cell d={} b={} alpha={}: {} of {} runs failed; first error: {}", cell.cell.dimension,
                              cell.cell.budget, cell.cell.alpha, cell.failed, cell.replicas, cell.first_error);
            }
        }
        return kObjective;
    }
    return kOk;
}

/// Points file: JSON-lines whose lines are arrays of numbers or objects with a
/// "final_point" array (evolve summaries), or a single JSON array of arrays.
std::vector<ls::LatentVector> read_points(const std::string& path) {
    const std::string text = ls::read_text_file(path);
    auto to_point = [&](const json& j, std::size_t where) {
        const json& arr = j.is_object() && j.contains("final_point") ? j["final_point"] : j;
        if (!arr.is_array() || arr.empty()) {
            throw ls::ConfigError("'" + path + "' entry " + std::to_string(where) + " is not a nonempty array");
        }
        std::vector<double> v;
        for (const auto& x : arr) {
            if (!x.is_number()) {
                throw ls::ConfigError("'" + path + "' entry " + std::to_string(where) + " contains a non-number");
            }
            v.push_back(x.get<double>());
        }
        return ls::LatentVector(std::move(v));
    };

    std::vector<ls::LatentVector> points;
    try {
        const json whole = json::parse(text);
        if (whole.is_array() && !whole.empty() && (whole.front().is_array() || whole.front().is_object())) {
            for (std::size_t i = 0; i < whole.size(); ++i) {
                points.push_back(to_point(whole[i], i + 1));
            }
            return points;
        }
        points.push_back(to_point(whole, 1));
        return points;
    } catch (const json::parse_error&) {
        // Fall through to JSON-lines.
    }
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ls::ConfigError("'" + path + "' line " + std::to_string(lineno) + ": " + e.what());
        }
        points.push_back(to_point(j, lineno));
    }
    return points;
}

struct DiversityArgs {
    std::string points;
    std::string metric = "euclidean";
    std::uint64_t seed = 0;
    std::optional<std::string> report_out;
};

int cmd_diversity(const DiversityArgs& args) {
    const auto points = read_points(args.points);
    auto metric = ls::make_metric(args.metric);
    const ls::DiversityReport report = ls::random_pairing_diversity(points, *metric, args.seed);
    const std::string text = ls::diversity_report_to_json(report).dump();
    if (args.report_out) {
        open_output(*args.report_out) << text << '\n';
    }
    std::cout << text << '\n';
    return kOk;
}

struct ProbeArgs {
    std::string objective;
    std::optional<std::string> point;
    std::uint64_t timeout_ms = 10000;
};

int cmd_probe(const ProbeArgs& args) {
    const ls::ObjectiveSpec spec = ls::ObjectiveSpec::from_flag(args.objective);
    if (!spec.external()) {
        throw ls::ConfigError("probe needs an external objective (external:<command>)");
    }
    ls::ExternalCommand cmd{spec.to_json()["command"].get<std::string>(), std::chrono::milliseconds(args.timeout_ms),
                            std::chrono::milliseconds(args.timeout_ms)};
    auto objective = ls::ExternalObjective::connect(cmd);
    json out = {{"protocol", objective->handshake().protocol},
                {"d", objective->dimension()},
                {"deterministic", objective->deterministic()}};
    if (!objective->handshake().meta.empty()) {
        out["meta"] = objective->handshake().meta;
    }
    if (args.point) {
        const bool inline_array = !args.point->empty() && args.point->front() == '[';
        const ls::LatentVector z = inline_array ? ls::parse_point(*args.point)
                                                : ls::read_start_point(*args.point);
        out["score"] = objective->evaluate(z).value;
    }
    objective->shutdown();
    std::cout << out.dump() << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Latent-space (1+1)-ES with mixed mutation rates", "latentsearch"};
    app.set_version_flag("--version", std::string(ls::kVersion));
    app.require_subcommand(1);

    EvolveArgs ev;
    auto* evolve = app.add_subcommand("evolve", "Run one optimization and print a JSON summary");
    evolve->add_option("--config", ev.config, "JSON run config");
    evolve->add_option("--alpha", ev.alpha, "Mutation strength (non-negative number or 'inf')");
    evolve->add_option("--budget", ev.budget, "Number of proposals");
    evolve->add_option("--dim", ev.dim, "Latent dimension");
    evolve->add_option("--seed", ev.seed, "RNG seed");
    evolve->add_option("--objective", ev.objective, "sphere | constant:C | staircase:K | rastrigin:A | "
                                                    "first-coordinate | always-accept | external:CMD | JSON");
    evolve->add_option("--start-point", ev.start_point, "JSON array used as z0");
    evolve->add_option("--trace-out", ev.trace_out, "Write the step trace as JSON-lines");
    evolve->add_option("--report-out", ev.report_out, "Also write the summary here");
    evolve->add_flag("--reevaluate-incumbent", ev.reevaluate, "Evaluate the incumbent on every step");

    CampaignArgs ca;
    auto* campaign = app.add_subcommand("campaign", "Run a (d, b, alpha) grid of seeded replicas");
    campaign->add_option("--config", ca.config, "JSON campaign config")->required();
    campaign->add_option("--parallel", ca.parallel, "Worker threads")->check(CLI::PositiveNumber);
    campaign->add_option("--report-out", ca.report_out, "Campaign report (JSON)");
    campaign->add_option("--csv-out", ca.csv_out, "Campaign report (CSV, one row per cell)");
    campaign->add_option("--trace-out", ca.trace_out, "Per-run step traces (JSON-lines)");

    DiversityArgs dv;
    auto* diversity = app.add_subcommand("diversity", "Random-pairing diversity of a set of points");
    diversity->add_option("--points,points", dv.points, "JSON-lines or JSON array of points")->required();
    diversity->add_option("--metric", dv.metric, "euclidean | hamming | external:CMD");
    diversity->add_option("--seed", dv.seed, "Pairing seed");
    diversity->add_option("--report-out", dv.report_out, "Also write the report here");

    ProbeArgs pr;
    auto* probe = app.add_subcommand("probe", "Handshake with an external objective and optionally score a point");
    probe->add_option("--objective", pr.objective, "external:CMD")->required();
    probe->add_option("--point", pr.point, "JSON array (inline or file) to score");
    probe->add_option("--timeout-ms", pr.timeout_ms, "Handshake and response timeout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*evolve) {
            return cmd_evolve(ev);
        }
        if (*campaign) {
            return cmd_campaign(ca);
        }
        if (*diversity) {
            return cmd_diversity(dv);
        }
        if (*probe) {
            return cmd_probe(pr);
        }
    } catch (const ls::ConfigError& e) {
        spdlog::error("{}", e.what());
        return kConfig;
    } catch (const ls::EvaluationError& e) {
        spdlog::error("objective error: {}", e.what());
        return kObjective;
    } catch (const ls::TransportError& e) {
        spdlog::error("transport error: {}", e.what());
        return kObjective;
    } catch (const ls::InvariantViolation& e) {
        spdlog::critical("internal invariant violated: {}", e.what());
        return kInvariant;
    } catch (const std::exception& e) {
        spdlog::critical("unexpected error: {}", e.what());
        return kUnexpected;
    }
    return kUnexpected;
}
