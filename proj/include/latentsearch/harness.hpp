#pragma once

#include "latentsearch/config.hpp"
#include "latentsearch/diversity.hpp"
#include "latentsearch/evolve.hpp"
#include "latentsearch/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace latentsearch {

inline constexpr std::string_view kVersion = "0.1.0";

struct CampaignCell {
    std::size_t dimension = 1;
    std::uint64_t budget = 1;
    double alpha = 0.0;
};

struct DiversitySettings {
    std::string metric = "euclidean-latent";
    std::uint64_t pairing_seed = 0;
};

/// A grid of (d, b, alpha) cells, each run `replicas` times.
///
/// Replica r of cell c runs with seed derive_seed(base_seed, c, r). Cells are
/// enumerated with dimension outermost and alpha innermost.
struct Campaign {
    std::string name = "campaign";
    ObjectiveSpec objective;
    DistributionSpec distribution;
    std::vector<std::size_t> dimensions;
    std::vector<std::uint64_t> budgets;
    std::vector<double> alphas;
    std::size_t replicas = 1;
    std::uint64_t base_seed = 0;
    bool reevaluate_incumbent = false;
    /// Random-pairing diversity of each cell's final points.
    std::optional<DiversitySettings> diversity;
    /// Adds mean wall-clock per run to the report. Timings make reports non-reproducible.
    bool record_timing = false;

    std::optional<std::string> report_out;
    std::optional<std::string> csv_out;
    std::optional<std::string> trace_out;

    std::vector<CampaignCell> cells() const;
    /// Throws ConfigError for an empty grid, zero replicas or an invalid cell.
    void validate() const;

    /// Strict parsing, same rules as RunConfig.
    ///
    ///   {"name":str, "objective":{...}, "distribution":{...},
    ///    "grid":{"dimension":[..], "budget":[..], "alpha":[.., "inf"]},
    ///    "replicas":int, "base_seed":int, "reevaluate_incumbent":bool,
    ///    "diversity":{"metric":str, "seed":int}, "record_timing":bool,
    ///    "report_out":str, "csv_out":str, "trace_out":str}
    static Campaign from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct RunOutcome {
    std::size_t cell = 0;
    std::size_t replica = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double initial_score = 0.0;
    double final_score = 0.0;
    std::size_t hamming_drift = 0;
    std::size_t mutated_union = 0;
    std::size_t accepted_steps = 0;
    std::uint64_t evaluations = 0;
    double wall_ms = 0.0;
    std::optional<LatentVector> final_point;
    std::optional<RunTrace> trace;
};

struct CellReport {
    CampaignCell cell;
    std::size_t replicas = 0;
    std::size_t completed = 0;
    std::size_t failed = 0;
    /// "ok", "partial" or "failed".
    std::string status;
    std::string first_error;
    MeanStderr initial_score;
    MeanStderr final_score;
    /// Fraction of completed runs whose final score strictly exceeds the initial one.
    double improvement_rate = 0.0;
    DriftSummary drift;
    double mean_accepted_steps = 0.0;
    std::uint64_t evaluations = 0;
    std::optional<DiversityReport> diversity;
    std::optional<double> mean_wall_ms;
};

struct CampaignReport {
    std::string name;
    std::string version;
    nlohmann::json config;
    std::vector<CellReport> cells;
    std::uint64_t total_evaluations = 0;
    std::size_t failed_runs = 0;
    /// Per-run outcomes ordered by (cell, replica). Not serialized.
    std::vector<RunOutcome> runs;
};

struct CampaignOptions {
    bool keep_traces = false;
    bool keep_final_points = false;
};

/// Runs every (cell, replica) on up to `parallelism` threads.
///
/// Results are gathered by (cell, replica) before any reduction, so the report
/// does not depend on the degree of parallelism. A failing run is recorded in
/// its cell and never aborts other runs. Synthetic objectives are built fresh
/// for every run; an external objective is connected once per worker and cell
/// and reconnected after a transport failure.
CampaignReport run_campaign(const Campaign& campaign, std::size_t parallelism, const CampaignOptions& options = {});

/// Best of `samples` independent full draws from `dist`, keeping the earliest
/// on ties. Draws come from RandomStream(seed), one full sample after another.
LatentVector best_of_random_search(const LatentDistribution& dist, Objective& objective, std::uint64_t samples,
                                   std::uint64_t seed);

/// For each replica r (seed derive_seed(seed, 0, r)), checks that evolve with
/// alpha = inf ends on exactly the point best_of_random_search picks from
/// budget + 1 samples. Requires a deterministic objective.
std::vector<bool> equivalence_check_random_search(const LatentDistribution& dist, Objective& objective,
                                                  std::uint64_t budget, std::uint64_t seed, std::size_t replicas);

} // namespace latentsearch
