#pragma once

#include "latentsearch/diversity.hpp"
#include "latentsearch/evolve.hpp"
#include "latentsearch/harness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace latentsearch {

// Trace JSON-lines: an optional header line {"type":"header",...} followed by
// one StepRecord per line:
//   {"iteration":1,"sampled_rate_r":0.0039,"mutated_indices":[17],
//    "candidate_score":-3.2,"incumbent_score":-3.5,"accepted":true}
// Campaign traces add "cell" and "replica" to every step line.

nlohmann::json step_to_json(const StepRecord& step);
StepRecord step_from_json(const nlohmann::json& j);

/// `header` is written first when it is not null; `tags` are merged into each step line.
void write_trace_jsonl(std::ostream& out, const RunTrace& trace, const nlohmann::json& header = nullptr,
                       const nlohmann::json& tags = nullptr);
/// Skips header lines. Throws ConfigError on malformed input.
std::vector<StepRecord> read_trace_jsonl(std::istream& in);

/// One-line run summary: initial_score, final_score, hamming_drift, evaluations,
/// accepted_steps, mutated_union, dimension, final_point and the echoed config.
nlohmann::json run_summary_json(const RunTrace& trace, const nlohmann::json& config);

nlohmann::json diversity_report_to_json(const DiversityReport& report);
DiversityReport diversity_report_from_json(const nlohmann::json& j);

nlohmann::json campaign_report_to_json(const CampaignReport& report);
/// Inverse of campaign_report_to_json (per-run outcomes are not part of the JSON).
CampaignReport campaign_report_from_json(const nlohmann::json& j);

/// One row per cell; reals printed with 17 significant digits.
void write_campaign_csv(std::ostream& out, const CampaignReport& report);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column; throws ConfigError if absent.
    std::size_t column(const std::string& name) const;
};

/// RFC 4180 subset: comma separated, double-quoted fields with "" escapes.
CsvTable read_csv(std::istream& in);

} // namespace latentsearch
