#include "latentsearch/harness.hpp"

#include "latentsearch/errors.hpp"
#include "latentsearch/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <thread>

namespace latentsearch {

using nlohmann::json;

std::vector<CampaignCell> Campaign::cells() const {
    std::vector<CampaignCell> out;
    out.reserve(dimensions.size() * budgets.size() * alphas.size());
    for (std::size_t d : dimensions) {
        for (std::uint64_t b : budgets) {
            for (double a : alphas) {
                out.push_back({d, b, a});
            }
        }
    }
    return out;
}

void Campaign::validate() const {
    if (dimensions.empty() || budgets.empty() || alphas.empty()) {
        throw ConfigError("campaign grid is empty: every axis (dimension, budget, alpha) needs at least one value");
    }
    if (replicas < 1) {
        throw ConfigError("campaign replicas must be at least 1");
    }
    for (const auto& cell : cells()) {
        EvolConfig{cell.dimension, cell.budget, cell.alpha, 0, reevaluate_incumbent}.validate();
    }
    for (std::size_t d : dimensions) {
        distribution.build(d);
    }
}

Campaign Campaign::from_json(const json& j) {
    reject_unknown_keys(j,
                        {"name", "objective", "distribution", "grid", "replicas", "base_seed",
                         "reevaluate_incumbent", "diversity", "record_timing", "report_out", "csv_out",
                         "trace_out"},
                        "campaign config");
    Campaign c;
    auto str = [](const json& v, const char* what) {
        if (!v.is_string()) {
            throw ConfigError(std::string(what) + " must be a string");
        }
        return v.get<std::string>();
    };
    auto uint = [](const json& v, const char* what) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw ConfigError(std::string(what) + " must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    };
    auto boolean = [](const json& v, const char* what) {
        if (!v.is_boolean()) {
            throw ConfigError(std::string(what) + " must be true or false");
        }
        return v.get<bool>();
    };

    if (j.contains("name")) {
        c.name = str(j["name"], "name");
    }
    if (!j.contains("objective")) {
        throw ConfigError("campaign config is missing \"objective\"");
    }
    c.objective = ObjectiveSpec::from_json(j["objective"]);
    if (j.contains("distribution")) {
        c.distribution = DistributionSpec::from_json(j["distribution"]);
    }
    if (!j.contains("grid")) {
        throw ConfigError("campaign config is missing \"grid\"");
    }
    const json& grid = j["grid"];
    reject_unknown_keys(grid, {"dimension", "budget", "alpha"}, "campaign grid");
    auto axis = [&](const char* key) -> const json& {
        if (!grid.contains(key) || !grid[key].is_array()) {
            throw ConfigError(std::string("campaign grid \"") + key + "\" must be an array");
        }
        return grid[key];
    };
    for (const auto& v : axis("dimension")) {
        c.dimensions.push_back(uint(v, "grid dimension"));
    }
    for (const auto& v : axis("budget")) {
        c.budgets.push_back(uint(v, "grid budget"));
    }
    for (const auto& v : axis("alpha")) {
        c.alphas.push_back(parse_alpha(v));
    }
    if (j.contains("replicas")) {
        c.replicas = uint(j["replicas"], "replicas");
    }
    if (j.contains("base_seed")) {
        c.base_seed = uint(j["base_seed"], "base_seed");
    }
    if (j.contains("reevaluate_incumbent")) {
        c.reevaluate_incumbent = boolean(j["reevaluate_incumbent"], "reevaluate_incumbent");
    }
    if (j.contains("diversity")) {
        const json& dv = j["diversity"];
        reject_unknown_keys(dv, {"metric", "seed"}, "campaign diversity");
        DiversitySettings s;
        if (dv.contains("metric")) {
            s.metric = str(dv["metric"], "diversity metric");
        }
        if (dv.contains("seed")) {
            s.pairing_seed = uint(dv["seed"], "diversity seed");
        }
        c.diversity = s;
    }
    if (j.contains("record_timing")) {
        c.record_timing = boolean(j["record_timing"], "record_timing");
    }
    if (j.contains("report_out")) {
        c.report_out = str(j["report_out"], "report_out");
    }
    if (j.contains("csv_out")) {
        c.csv_out = str(j["csv_out"], "csv_out");
    }
    if (j.contains("trace_out")) {
        c.trace_out = str(j["trace_out"], "trace_out");
    }
    c.validate();
    return c;
}

json Campaign::to_json() const {
    json alphas_json = json::array();
    for (double a : alphas) {
        alphas_json.push_back(alpha_to_json(a));
    }
    json j = {
        {"name", name},
        {"objective", objective.to_json()},
        {"distribution", distribution.to_json()},
        {"grid", {{"dimension", dimensions}, {"budget", budgets}, {"alpha", alphas_json}}},
        {"replicas", replicas},
        {"base_seed", base_seed},
        {"reevaluate_incumbent", reevaluate_incumbent},
        {"record_timing", record_timing},
    };
    if (diversity) {
        j["diversity"] = {{"metric", diversity->metric}, {"seed", diversity->pairing_seed}};
    }
    if (report_out) {
        j["report_out"] = *report_out;
    }
    if (csv_out) {
        j["csv_out"] = *csv_out;
    }
    if (trace_out) {
        j["trace_out"] = *trace_out;
    }
    return j;
}

namespace {

/// Objective source for one worker thread.
class WorkerObjectives {
  public:
    explicit WorkerObjectives(const ObjectiveSpec& spec) : spec_(spec) {}

    Objective& get(std::size_t cell, std::size_t dimension, const LatentDistribution& dist) {
        if (!spec_.external()) {
            fresh_ = spec_.build(dimension, dist);
            return *fresh_;
        }
        auto& slot = connections_[cell];
        if (!slot) {
            slot = spec_.build(dimension, dist);
        }
        return *slot;
    }

    void drop(std::size_t cell) { connections_.erase(cell); }

  private:
    const ObjectiveSpec& spec_;
    std::unique_ptr<Objective> fresh_;
    std::map<std::size_t, std::unique_ptr<Objective>> connections_;
};

CellReport summarize_cell(const CampaignCell& cell, std::span<const RunOutcome> runs, bool record_timing) {
    CellReport r;
    r.cell = cell;
    r.replicas = runs.size();
    std::vector<double> initial;
    std::vector<double> final;
    std::vector<double> wall;
    std::vector<DriftSample> drift;
    std::size_t improved = 0;
    double accepted = 0.0;
    for (const auto& run : runs) {
        r.evaluations += run.evaluations;
        if (!run.ok) {
            ++r.failed;
            if (r.first_error.empty()) {
                r.first_error = "replica " + std::to_string(run.replica) + ": " + run.error;
            }
            continue;
        }
        ++r.completed;
        initial.push_back(run.initial_score);
        final.push_back(run.final_score);
        wall.push_back(run.wall_ms);
        drift.push_back({cell.dimension, run.hamming_drift, run.mutated_union});
        improved += run.final_score > run.initial_score ? 1 : 0;
        accepted += static_cast<double>(run.accepted_steps);
    }
    r.status = r.failed == 0 ? "ok" : r.completed == 0 ? "failed" : "partial";
    if (r.completed > 0) {
        const double n = static_cast<double>(r.completed);
        r.initial_score = mean_stderr(initial);
        r.final_score = mean_stderr(final);
        r.improvement_rate = static_cast<double>(improved) / n;
        r.drift = drift_statistics(drift);
        r.mean_accepted_steps = accepted / n;
        if (record_timing) {
            r.mean_wall_ms = mean_stderr(wall).mean;
        }
    }
    return r;
}

} // namespace

CampaignReport run_campaign(const Campaign& campaign, std::size_t parallelism, const CampaignOptions& options) {
    campaign.validate();
    if (parallelism < 1) {
        throw ConfigError("parallelism must be at least 1");
    }

    const std::vector<CampaignCell> cells = campaign.cells();
    std::vector<LatentDistribution> dists;
    dists.reserve(cells.size());
    for (const auto& cell : cells) {
        dists.push_back(campaign.distribution.build(cell.dimension));
    }

    const bool keep_points = options.keep_final_points || campaign.diversity.has_value();
    const std::size_t total = cells.size() * campaign.replicas;
    std::vector<RunOutcome> outcomes(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        WorkerObjectives objectives(campaign.objective);
        for (std::size_t job = next++; job < total; job = next++) {
            RunOutcome& out = outcomes[job];
            out.cell = job / campaign.replicas;
            out.replica = job % campaign.replicas;
            out.seed = derive_seed(campaign.base_seed, out.cell, out.replica);
            const CampaignCell& cell = cells[out.cell];
            const EvolConfig config{cell.dimension, cell.budget, cell.alpha, out.seed, campaign.reevaluate_incumbent};

            const auto started = std::chrono::steady_clock::now();
            try {
                Objective& objective = objectives.get(out.cell, cell.dimension, dists[out.cell]);
                RunTrace trace = evolve(objective, dists[out.cell], config);
                out.ok = true;
                out.initial_score = trace.initial_score.value;
                out.final_score = trace.final_score.value;
                out.hamming_drift = trace.hamming_drift;
                out.mutated_union = trace.mutated_union_size();
                out.accepted_steps = trace.accepted_steps();
                out.evaluations = trace.evaluations;
                if (keep_points) {
                    out.final_point = trace.final_point;
                }
                if (options.keep_traces) {
                    out.trace = std::move(trace);
                }
            } catch (const TransportError& e) {
                out.error = e.what();
                objectives.drop(out.cell);
            } catch (const std::exception& e) {
                out.error = e.what();
            }
            out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        }
    };

    const std::size_t threads = std::min(parallelism, total);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    CampaignReport report;
    report.name = campaign.name;
    report.version = std::string(kVersion);
    report.config = campaign.to_json();

    std::unique_ptr<DistanceMetric> metric;
    if (campaign.diversity) {
        metric = make_metric(campaign.diversity->metric);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::span<const RunOutcome> runs(outcomes.data() + c * campaign.replicas, campaign.replicas);
        CellReport cr = summarize_cell(cells[c], runs, campaign.record_timing);
        if (metric) {
            std::vector<LatentVector> points;
            for (const auto& run : runs) {
                if (run.ok) {
                    points.push_back(*run.final_point);
                }
            }
            if (points.size() >= 2) {
                cr.diversity = random_pairing_diversity(points, *metric, campaign.diversity->pairing_seed);
            }
        }
        report.total_evaluations += cr.evaluations;
        report.failed_runs += cr.failed;
        report.cells.push_back(std::move(cr));
    }
    if (!options.keep_final_points) {
        for (auto& run : outcomes) {
            run.final_point.reset();
        }
    }
    report.runs = std::move(outcomes);
    return report;
}

LatentVector best_of_random_search(const LatentDistribution& dist, Objective& objective, std::uint64_t samples,
                                   std::uint64_t seed) {
    if (samples < 1) {
        throw ConfigError("random search needs at least one sample");
    }
    RandomStream rng(seed);
    LatentVector best = dist.sample_full(rng);
    Score best_score = objective.evaluate(best);
    for (std::uint64_t k = 1; k < samples; ++k) {
        LatentVector x = dist.sample_full(rng);
        const Score s = objective.evaluate(x);
        if (s > best_score) {
            best = std::move(x);
            best_score = s;
        }
    }
    return best;
}

std::vector<bool> equivalence_check_random_search(const LatentDistribution& dist, Objective& objective,
                                                  std::uint64_t budget, std::uint64_t seed, std::size_t replicas) {
    if (!objective.deterministic()) {
        throw ConfigError("random-search equivalence needs a deterministic objective");
    }
    std::vector<bool> matches;
    matches.reserve(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        const std::uint64_t run_seed = derive_seed(seed, 0, r);
        const EvolConfig config{dist.dimension(), budget, kInfiniteAlpha, run_seed, false};
        const RunTrace trace = evolve(objective, dist, config);
        const LatentVector oracle = best_of_random_search(dist, objective, budget + 1, run_seed);
        matches.push_back(trace.final_point == oracle);
    }
    return matches;
}

} // namespace latentsearch
