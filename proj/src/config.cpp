#include "latentsearch/config.hpp"

#include "latentsearch/errors.hpp"
#include "latentsearch/external_objective.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace latentsearch {

using nlohmann::json;

namespace {

std::string describe(const json& j) {
    std::string s = j.dump();
    return s.size() > 80 ? s.substr(0, 77) + "..." : s;
}

double get_real(const json& j, std::string_view what) {
    if (!j.is_number()) {
        throw ConfigError(std::string(what) + " must be a number, got " + describe(j));
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be finite");
    }
    return v;
}

std::uint64_t get_uint(const json& j, std::string_view what) {
    if (j.is_number_unsigned()) {
        return j.get<std::uint64_t>();
    }
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    throw ConfigError(std::string(what) + " must be a non-negative integer, got " + describe(j));
}

std::string get_string(const json& j, std::string_view what) {
    if (!j.is_string()) {
        throw ConfigError(std::string(what) + " must be a string, got " + describe(j));
    }
    return j.get<std::string>();
}

bool get_bool(const json& j, std::string_view what) {
    if (!j.is_boolean()) {
        throw ConfigError(std::string(what) + " must be true or false, got " + describe(j));
    }
    return j.get<bool>();
}

std::vector<double> get_reals(const json& j, std::string_view what) {
    if (!j.is_array()) {
        throw ConfigError(std::string(what) + " must be an array of numbers");
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        out.push_back(get_real(v, what));
    }
    return out;
}

/// A scalar or a length-d array, expanded to length d.
std::vector<double> per_coordinate(const json& j, std::size_t d, std::string_view what) {
    if (j.is_number()) {
        return std::vector<double>(d, get_real(j, what));
    }
    std::vector<double> v = get_reals(j, what);
    if (v.size() != d) {
        throw DimensionMismatch(std::string(what), d, v.size());
    }
    return v;
}

const json& require(const json& j, const char* key, std::string_view context) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ConfigError(std::string(context) + " is missing \"" + key + "\"");
    }
    return *it;
}

/// Either an explicit point (`point_key`) or one drawn from the prior with `seed_key`; origin otherwise.
LatentVector anchor_point(const json& j, const char* point_key, const char* seed_key, std::size_t d,
                          const LatentDistribution& dist) {
    if (const auto it = j.find(point_key); it != j.end()) {
        return LatentVector(per_coordinate(*it, d, point_key));
    }
    if (const auto it = j.find(seed_key); it != j.end()) {
        RandomStream rng(get_uint(*it, seed_key));
        return dist.sample_full(rng);
    }
    return LatentVector(std::vector<double>(d, 0.0));
}

} // namespace

double parse_alpha(const std::string& text) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "inf" || lower == "+inf" || lower == "infinity" || lower == "∞") {
        return kInfiniteAlpha;
    }
    double value = 0.0;
    std::size_t used = 0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("alpha must be a non-negative number or \"inf\", got '" + text + "'");
    }
    if (used != text.size() || std::isnan(value) || value < 0.0) {
        throw ConfigError("alpha must be a non-negative number or \"inf\", got '" + text + "'");
    }
    return value;
}

double parse_alpha(const json& value) {
    if (value.is_string()) {
        return parse_alpha(value.get<std::string>());
    }
    if (!value.is_number()) {
        throw ConfigError("alpha must be a non-negative number or \"inf\", got " + describe(value));
    }
    const double a = value.get<double>();
    if (std::isnan(a) || a < 0.0) {
        throw ConfigError("alpha must be a non-negative number or \"inf\", got " + describe(value));
    }
    return a;
}

json alpha_to_json(double alpha) {
    if (std::isinf(alpha)) {
        return "inf";
    }
    return alpha;
}

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed,
                         std::string_view context) {
    if (!object.is_object()) {
        throw ConfigError(std::string(context) + " must be a JSON object");
    }
    for (const auto& [key, _] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key \"" + key + "\" in " + std::string(context));
        }
    }
}

// ---------------------------------------------------------------------------

DistributionSpec::DistributionSpec() : json_({{"kind", "standard-normal"}}) {}

DistributionSpec DistributionSpec::from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("distribution must be a JSON object");
    }
    const std::string kind = get_string(require(j, "kind", "distribution"), "distribution kind");
    if (kind == "standard-normal") {
        reject_unknown_keys(j, {"kind"}, "standard-normal distribution");
    } else if (kind == "uniform-box") {
        reject_unknown_keys(j, {"kind", "lo", "hi"}, "uniform-box distribution");
        require(j, "lo", "uniform-box distribution");
        require(j, "hi", "uniform-box distribution");
    } else if (kind == "discrete-set") {
        reject_unknown_keys(j, {"kind", "values"}, "discrete-set distribution");
        if (!require(j, "values", "discrete-set distribution").is_array()) {
            throw ConfigError("discrete-set \"values\" must be an array");
        }
    } else if (kind == "point-mass") {
        reject_unknown_keys(j, {"kind", "value"}, "point-mass distribution");
        require(j, "value", "point-mass distribution");
    } else {
        throw ConfigError("unknown distribution kind '" + kind + "'");
    }
    DistributionSpec spec;
    spec.json_ = j;
    // Instantiating once catches malformed parameters before any run starts.
    std::size_t probe_d = 1;
    for (const char* key : {"lo", "hi", "value"}) {
        if (j.contains(key) && j[key].is_array()) {
            probe_d = std::max(probe_d, j[key].size());
        }
    }
    if (j.contains("values") && !j["values"].empty() && j["values"].front().is_array()) {
        probe_d = j["values"].size();
    }
    spec.build(probe_d);
    return spec;
}

LatentDistribution DistributionSpec::build(std::size_t d) const {
    if (d == 0) {
        throw ConfigError("latent dimension must be at least 1");
    }
    const std::string kind = json_.at("kind").get<std::string>();
    if (kind == "standard-normal") {
        return LatentDistribution::standard_normal(d);
    }
    if (kind == "uniform-box") {
        return LatentDistribution::uniform_box(per_coordinate(json_["lo"], d, "uniform-box lo"),
                                               per_coordinate(json_["hi"], d, "uniform-box hi"));
    }
    if (kind == "discrete-set") {
        const json& values = json_["values"];
        if (!values.empty() && values.front().is_array()) {
            if (values.size() != d) {
                throw DimensionMismatch("discrete-set values", d, values.size());
            }
            std::vector<std::vector<double>> per;
            for (const auto& v : values) {
                per.push_back(get_reals(v, "discrete-set values"));
            }
            return LatentDistribution::discrete_set(std::move(per));
        }
        return LatentDistribution::discrete_set(d, get_reals(values, "discrete-set values"));
    }
    return LatentDistribution::point_mass(per_coordinate(json_["value"], d, "point-mass value"));
}

// ---------------------------------------------------------------------------

ObjectiveSpec::ObjectiveSpec() : kind_("sphere"), json_({{"kind", "sphere"}}) {}

ObjectiveSpec ObjectiveSpec::from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("objective must be a JSON object");
    }
    ObjectiveSpec spec;
    spec.kind_ = get_string(require(j, "kind", "objective"), "objective kind");
    spec.json_ = j;
    const std::string& k = spec.kind_;
    if (k == "sphere") {
        reject_unknown_keys(j, {"kind", "target", "target_seed"}, "sphere objective");
        if (j.contains("target") && j.contains("target_seed")) {
            throw ConfigError("sphere objective takes either \"target\" or \"target_seed\", not both");
        }
        if (j.contains("target_seed")) {
            get_uint(j["target_seed"], "target_seed");
        }
    } else if (k == "rastrigin") {
        reject_unknown_keys(j, {"kind", "amplitude", "center", "center_seed"}, "rastrigin objective");
        if (j.contains("amplitude")) {
            get_real(j["amplitude"], "rastrigin amplitude");
        }
        if (j.contains("center_seed")) {
            get_uint(j["center_seed"], "center_seed");
        }
    } else if (k == "staircase") {
        reject_unknown_keys(j, {"kind", "steps"}, "staircase objective");
        if (j.contains("steps") && get_uint(j["steps"], "staircase steps") < 1) {
            throw ConfigError("staircase steps must be at least 1");
        }
    } else if (k == "constant") {
        reject_unknown_keys(j, {"kind", "value"}, "constant objective");
        get_real(require(j, "value", "constant objective"), "constant value");
    } else if (k == "first-coordinate" || k == "always-accept") {
        reject_unknown_keys(j, {"kind"}, k + " objective");
    } else if (k == "external") {
        reject_unknown_keys(j, {"kind", "command", "handshake_timeout_ms", "response_timeout_ms"},
                            "external objective");
        if (get_string(require(j, "command", "external objective"), "external command").empty()) {
            throw ConfigError("external objective command is empty");
        }
        if (j.contains("handshake_timeout_ms")) {
            get_uint(j["handshake_timeout_ms"], "handshake_timeout_ms");
        }
        if (j.contains("response_timeout_ms")) {
            get_uint(j["response_timeout_ms"], "response_timeout_ms");
        }
    } else {
        throw ConfigError("unknown objective kind '" + k + "'");
    }
    return spec;
}

ObjectiveSpec ObjectiveSpec::from_flag(const std::string& text) {
    if (!text.empty() && text.front() == '{') {
        try {
            return from_json(json::parse(text));
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("--objective is not valid JSON: ") + e.what());
        }
    }
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    json j = {{"kind", kind}};
    if (kind == "external") {
        j["command"] = arg;
    } else if (!arg.empty()) {
        double v = 0.0;
        try {
            v = std::stod(arg);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse objective parameter '" + arg + "'");
        }
        if (kind == "constant") {
            j["value"] = v;
        } else if (kind == "staircase") {
            j["steps"] = static_cast<std::int64_t>(v);
        } else if (kind == "rastrigin") {
            j["amplitude"] = v;
        } else if (kind == "sphere") {
            j["target_seed"] = static_cast<std::int64_t>(v);
        } else {
            throw ConfigError("objective '" + kind + "' takes no parameter");
        }
    }
    return from_json(j);
}

bool ObjectiveSpec::external() const {
    return kind_ == "external";
}

std::unique_ptr<Objective> ObjectiveSpec::build(std::size_t d, const LatentDistribution& dist) const {
    const json& j = json_;
    if (kind_ == "sphere") {
        return std::make_unique<SphereObjective>(anchor_point(j, "target", "target_seed", d, dist));
    }
    if (kind_ == "rastrigin") {
        const double amplitude = j.contains("amplitude") ? j["amplitude"].get<double>() : 10.0;
        return std::make_unique<RastriginObjective>(anchor_point(j, "center", "center_seed", d, dist), amplitude);
    }
    if (kind_ == "staircase") {
        const int steps = j.contains("steps") ? static_cast<int>(j["steps"].get<std::int64_t>()) : 4;
        return std::make_unique<StaircaseObjective>(d, steps);
    }
    if (kind_ == "constant") {
        return std::make_unique<ConstantObjective>(d, j["value"].get<double>());
    }
    if (kind_ == "first-coordinate") {
        return std::make_unique<FirstCoordinateObjective>(d);
    }
    if (kind_ == "always-accept") {
        return std::make_unique<AlwaysAcceptObjective>(d);
    }
    ExternalCommand cmd;
    cmd.command = j["command"].get<std::string>();
    if (j.contains("handshake_timeout_ms")) {
        cmd.handshake_timeout = std::chrono::milliseconds(j["handshake_timeout_ms"].get<std::int64_t>());
    }
    if (j.contains("response_timeout_ms")) {
        cmd.response_timeout = std::chrono::milliseconds(j["response_timeout_ms"].get<std::int64_t>());
    }
    auto objective = ExternalObjective::connect(cmd);
    if (objective->dimension() != d) {
        throw DimensionMismatch("external objective handshake", d, objective->dimension());
    }
    return objective;
}

// ---------------------------------------------------------------------------

RunConfig RunConfig::from_json(const json& j) {
    reject_unknown_keys(j,
                        {"dimension", "distribution", "alpha", "budget", "seed", "objective", "start_point",
                         "trace_out", "report_out", "reevaluate_incumbent"},
                        "run config");
    RunConfig c;
    if (j.contains("dimension")) {
        c.dimension = get_uint(j["dimension"], "dimension");
    }
    if (j.contains("distribution")) {
        c.distribution = DistributionSpec::from_json(j["distribution"]);
    }
    if (j.contains("alpha")) {
        c.alpha = parse_alpha(j["alpha"]);
    }
    if (j.contains("budget")) {
        c.budget = get_uint(j["budget"], "budget");
    }
    if (j.contains("seed")) {
        c.seed = get_uint(j["seed"], "seed");
    }
    if (j.contains("objective")) {
        c.objective = ObjectiveSpec::from_json(j["objective"]);
    }
    if (j.contains("start_point")) {
        c.start_point = get_string(j["start_point"], "start_point");
    }
    if (j.contains("trace_out")) {
        c.trace_out = get_string(j["trace_out"], "trace_out");
    }
    if (j.contains("report_out")) {
        c.report_out = get_string(j["report_out"], "report_out");
    }
    if (j.contains("reevaluate_incumbent")) {
        c.reevaluate_incumbent = get_bool(j["reevaluate_incumbent"], "reevaluate_incumbent");
    }
    return c;
}

json RunConfig::to_json() const {
    json j = json::object();
    if (dimension) {
        j["dimension"] = *dimension;
    }
    j["distribution"] = distribution.to_json();
    if (alpha) {
        j["alpha"] = alpha_to_json(*alpha);
    }
    if (budget) {
        j["budget"] = *budget;
    }
    j["seed"] = seed;
    if (objective) {
        j["objective"] = objective->to_json();
    }
    if (start_point) {
        j["start_point"] = *start_point;
    }
    if (trace_out) {
        j["trace_out"] = *trace_out;
    }
    if (report_out) {
        j["report_out"] = *report_out;
    }
    j["reevaluate_incumbent"] = reevaluate_incumbent;
    return j;
}

EvolConfig RunConfig::evol_config() const {
    if (!dimension) {
        throw ConfigError("dimension is required (config \"dimension\" or --dim)");
    }
    if (!budget) {
        throw ConfigError("budget is required (config \"budget\" or --budget)");
    }
    if (!alpha) {
        throw ConfigError("alpha is required (config \"alpha\" or --alpha)");
    }
    if (!objective) {
        throw ConfigError("objective is required (config \"objective\" or --objective)");
    }
    EvolConfig ec;
    ec.dimension = *dimension;
    ec.budget = *budget;
    ec.alpha = *alpha;
    ec.seed = seed;
    ec.reevaluate_incumbent = reevaluate_incumbent;
    ec.validate();
    return ec;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

LatentVector point_from_json(const json& j) {
    std::vector<double> values = get_reals(j, "point");
    if (values.empty()) {
        throw ConfigError("point is an empty vector");
    }
    return LatentVector(std::move(values));
}

LatentVector parse_point(const std::string& text) {
    try {
        return point_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("point is not valid JSON: ") + e.what());
    }
}

LatentVector read_start_point(const std::string& path) {
    try {
        return point_from_json(read_json_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError("start point file '" + path + "': " + e.what());
    }
}

} // namespace latentsearch
