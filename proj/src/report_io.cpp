#include "latentsearch/report_io.hpp"

#include "latentsearch/errors.hpp"
#include "latentsearch/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace latentsearch {

using nlohmann::json;

json step_to_json(const StepRecord& step) {
    return {
        {"iteration", step.iteration},
        {"sampled_rate_r", step.sampled_rate},
        {"mutated_indices", step.mutated_indices},
        {"candidate_score", step.candidate_score.value},
        {"incumbent_score", step.incumbent_score.value},
        {"accepted", step.accepted},
    };
}

StepRecord step_from_json(const json& j) {
    try {
        StepRecord s;
        s.iteration = j.at("iteration").get<std::uint64_t>();
        s.sampled_rate = j.at("sampled_rate_r").get<double>();
        s.mutated_indices = j.at("mutated_indices").get<std::vector<std::size_t>>();
        s.candidate_score = Score{j.at("candidate_score").get<double>()};
        s.incumbent_score = Score{j.at("incumbent_score").get<double>()};
        s.accepted = j.at("accepted").get<bool>();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed step record: ") + e.what());
    }
}

void write_trace_jsonl(std::ostream& out, const RunTrace& trace, const json& header, const json& tags) {
    if (!header.is_null()) {
        json h = header;
        h["type"] = "header";
        out << h.dump() << '\n';
    }
    for (const auto& step : trace.steps) {
        json line = step_to_json(step);
        if (tags.is_object()) {
            line.update(tags);
        }
        out << line.dump() << '\n';
    }
}

std::vector<StepRecord> read_trace_jsonl(std::istream& in) {
    std::vector<StepRecord> steps;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ConfigError("trace line " + std::to_string(lineno) + " is not JSON: " + e.what());
        }
        if (j.contains("type") && j["type"] == "header") {
            continue;
        }
        steps.push_back(step_from_json(j));
    }
    return steps;
}

json run_summary_json(const RunTrace& trace, const json& config) {
    return {
        {"initial_score", trace.initial_score.value},
        {"final_score", trace.final_score.value},
        {"hamming_drift", trace.hamming_drift},
        {"evaluations", trace.evaluations},
        {"accepted_steps", trace.accepted_steps()},
        {"mutated_union", trace.mutated_union_size()},
        {"dimension", trace.final_point.size()},
        {"final_point", trace.final_point.to_vector()},
        {"config", config},
    };
}

json diversity_report_to_json(const DiversityReport& r) {
    return {
        {"metric", r.metric},
        {"n", r.sample_size},
        {"mean", r.mean},
        {"stderr", r.standard_error},
        {"pairing_seed", r.pairing_seed},
    };
}

DiversityReport diversity_report_from_json(const json& j) {
    try {
        return {j.at("metric").get<std::string>(), j.at("n").get<std::size_t>(), j.at("mean").get<double>(),
                j.at("stderr").get<double>(), j.at("pairing_seed").get<std::uint64_t>()};
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed diversity report: ") + e.what());
    }
}

namespace {

json mean_stderr_json(const MeanStderr& m) {
    return {{"mean", m.mean}, {"stderr", m.stderr_}, {"n", m.count}};
}

MeanStderr mean_stderr_from(const json& j) {
    return {j.at("mean").get<double>(), j.at("stderr").get<double>(), j.at("n").get<std::size_t>()};
}

json drift_json(const DriftSummary& d) {
    return {
        {"runs", d.runs},
        {"dimension", d.dimension},
        {"mean_drift", d.mean_drift},
        {"drift_half_width", d.drift_half_width},
        {"mean_mutated_union", d.mean_mutated_union},
        {"mutated_union_half_width", d.mutated_union_half_width},
        {"mean_ratio", d.mean_ratio},
        {"ratio_half_width", d.ratio_half_width},
    };
}

DriftSummary drift_from(const json& j) {
    DriftSummary d;
    d.runs = j.at("runs").get<std::size_t>();
    d.dimension = j.at("dimension").get<std::size_t>();
    d.mean_drift = j.at("mean_drift").get<double>();
    d.drift_half_width = j.at("drift_half_width").get<double>();
    d.mean_mutated_union = j.at("mean_mutated_union").get<double>();
    d.mutated_union_half_width = j.at("mutated_union_half_width").get<double>();
    d.mean_ratio = j.at("mean_ratio").get<double>();
    d.ratio_half_width = j.at("ratio_half_width").get<double>();
    return d;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string alpha_text(double alpha) {
    return std::isinf(alpha) ? "inf" : protocol::format_real(alpha);
}

} // namespace

json campaign_report_to_json(const CampaignReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        json cj = {
            {"dimension", c.cell.dimension},
            {"budget", c.cell.budget},
            {"alpha", alpha_to_json(c.cell.alpha)},
            {"replicas", c.replicas},
            {"completed", c.completed},
            {"failed", c.failed},
            {"status", c.status},
            {"initial_score", mean_stderr_json(c.initial_score)},
            {"final_score", mean_stderr_json(c.final_score)},
            {"improvement_rate", c.improvement_rate},
            {"drift", drift_json(c.drift)},
            {"mean_accepted_steps", c.mean_accepted_steps},
            {"evaluations", c.evaluations},
        };
        if (!c.first_error.empty()) {
            cj["first_error"] = c.first_error;
        }
        if (c.diversity) {
            cj["diversity"] = diversity_report_to_json(*c.diversity);
        }
        if (c.mean_wall_ms) {
            cj["mean_wall_ms"] = *c.mean_wall_ms;
        }
        cells.push_back(std::move(cj));
    }
    return {
        {"name", report.name},
        {"version", report.version},
        {"config", report.config},
        {"improvement_rate_note", "fraction of runs whose final score exceeds the initial score; an automatable "
                                  "proxy for human preference, not a preference measurement"},
        {"total_evaluations", report.total_evaluations},
        {"failed_runs", report.failed_runs},
        {"cells", std::move(cells)},
    };
}

CampaignReport campaign_report_from_json(const json& j) {
    try {
        CampaignReport r;
        r.name = j.at("name").get<std::string>();
        r.version = j.at("version").get<std::string>();
        r.config = j.at("config");
        r.total_evaluations = j.at("total_evaluations").get<std::uint64_t>();
        r.failed_runs = j.at("failed_runs").get<std::size_t>();
        for (const auto& cj : j.at("cells")) {
            CellReport c;
            c.cell.dimension = cj.at("dimension").get<std::size_t>();
            c.cell.budget = cj.at("budget").get<std::uint64_t>();
            c.cell.alpha = parse_alpha(cj.at("alpha"));
            c.replicas = cj.at("replicas").get<std::size_t>();
            c.completed = cj.at("completed").get<std::size_t>();
            c.failed = cj.at("failed").get<std::size_t>();
            c.status = cj.at("status").get<std::string>();
            c.initial_score = mean_stderr_from(cj.at("initial_score"));
            c.final_score = mean_stderr_from(cj.at("final_score"));
            c.improvement_rate = cj.at("improvement_rate").get<double>();
            c.drift = drift_from(cj.at("drift"));
            c.mean_accepted_steps = cj.at("mean_accepted_steps").get<double>();
            c.evaluations = cj.at("evaluations").get<std::uint64_t>();
            if (cj.contains("first_error")) {
                c.first_error = cj["first_error"].get<std::string>();
            }
            if (cj.contains("diversity")) {
                c.diversity = diversity_report_from_json(cj["diversity"]);
            }
            if (cj.contains("mean_wall_ms")) {
                c.mean_wall_ms = cj["mean_wall_ms"].get<double>();
            }
            r.cells.push_back(std::move(c));
        }
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed campaign report: ") + e.what());
    }
}

void write_campaign_csv(std::ostream& out, const CampaignReport& report) {
    const bool with_diversity = std::any_of(report.cells.begin(), report.cells.end(),
                                            [](const CellReport& c) { return c.diversity.has_value(); });
    const bool with_timing = std::any_of(report.cells.begin(), report.cells.end(),
                                         [](const CellReport& c) { return c.mean_wall_ms.has_value(); });
    out << "cell,dimension,budget,alpha,replicas,completed,failed,status,"
           "initial_score_mean,initial_score_stderr,final_score_mean,final_score_stderr,improvement_rate,"
           "drift_mean,drift_half_width,drift_ratio_mean,drift_ratio_half_width,mutated_union_mean,"
           "accepted_steps_mean,evaluations";
    if (with_diversity) {
        out << ",diversity_metric,diversity_mean,diversity_stderr";
    }
    if (with_timing) {
        out << ",wall_ms_mean";
    }
    out << '\n';
    const auto real = protocol::format_real;
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        const CellReport& c = report.cells[i];
        out << i << ',' << c.cell.dimension << ',' << c.cell.budget << ',' << alpha_text(c.cell.alpha) << ','
            << c.replicas << ',' << c.completed << ',' << c.failed << ',' << csv_field(c.status) << ','
            << real(c.initial_score.mean) << ',' << real(c.initial_score.stderr_) << ',' << real(c.final_score.mean)
            << ',' << real(c.final_score.stderr_) << ',' << real(c.improvement_rate) << ','
            << real(c.drift.mean_drift) << ',' << real(c.drift.drift_half_width) << ',' << real(c.drift.mean_ratio)
            << ',' << real(c.drift.ratio_half_width) << ',' << real(c.drift.mean_mutated_union) << ','
            << real(c.mean_accepted_steps) << ',' << c.evaluations;
        if (with_diversity) {
            if (c.diversity) {
                out << ',' << csv_field(c.diversity->metric) << ',' << real(c.diversity->mean) << ','
                    << real(c.diversity->standard_error);
            } else {
                out << ",,,";
            }
        }
        if (with_timing) {
            out << ',' << (c.mean_wall_ms ? real(*c.mean_wall_ms) : "");
        }
        out << '\n';
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ConfigError("CSV has no column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;
    char c = 0;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            any = false;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (quoted) {
        throw ConfigError("CSV ends inside a quoted field");
    }
    if (any) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) {
        throw ConfigError("CSV is empty");
    }
    CsvTable table;
    table.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != table.header.size()) {
            throw ConfigError("CSV row " + std::to_string(i) + " has " + std::to_string(records[i].size()) +
                              " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[i]));
    }
    return table;
}

} // namespace latentsearch
