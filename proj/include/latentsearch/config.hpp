#pragma once

#include "latentsearch/distributions.hpp"
#include "latentsearch/evolve.hpp"
#include "latentsearch/objectives.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace latentsearch {

/// Accepts a non-negative number or the string "inf" (also "Infinity", "+inf").
double parse_alpha(const nlohmann::json& value);
double parse_alpha(const std::string& text);
/// Finite alphas as numbers, infinity as the string "inf".
nlohmann::json alpha_to_json(double alpha);

/// Throws ConfigError naming the first key of `object` not in `allowed`.
void reject_unknown_keys(const nlohmann::json& object, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

/// Dimension-free description of a prior; `build` instantiates it for a given d.
///
///   {"kind":"standard-normal"}
///   {"kind":"uniform-box","lo":<num|[num]>,"hi":<num|[num]>}
///   {"kind":"discrete-set","values":<[num]|[[num]]>}
///   {"kind":"point-mass","value":<num|[num]>}
///
/// Scalars and flat lists apply to every coordinate; per-coordinate arrays must have length d.
class DistributionSpec {
  public:
    DistributionSpec();
    static DistributionSpec from_json(const nlohmann::json& j);

    LatentDistribution build(std::size_t dimension) const;
    const nlohmann::json& to_json() const noexcept { return json_; }

  private:
    nlohmann::json json_;
};

/// Dimension-free description of an objective.
///
///   {"kind":"sphere", "target":[num] | "target_seed":uint}   (default target: origin)
///   {"kind":"rastrigin", "amplitude":num, "center":[num] | "center_seed":uint}
///   {"kind":"staircase", "steps":int}
///   {"kind":"constant", "value":num}
///   {"kind":"first-coordinate"}
///   {"kind":"always-accept"}
///   {"kind":"external", "command":str, "handshake_timeout_ms":int, "response_timeout_ms":int}
///
/// A "*_seed" field draws the point once from the run's prior with that seed,
/// so every replica of a campaign cell sees the same target.
class ObjectiveSpec {
  public:
    /// Sphere centred on the origin.
    ObjectiveSpec();
    static ObjectiveSpec from_json(const nlohmann::json& j);
    /// Short flag form: "sphere", "constant:5", "staircase:4", "rastrigin:10",
    /// "always-accept", "first-coordinate", "external:<command>", or a JSON object.
    static ObjectiveSpec from_flag(const std::string& text);

    std::unique_ptr<Objective> build(std::size_t dimension, const LatentDistribution& dist) const;
    bool external() const;
    const std::string& kind() const noexcept { return kind_; }
    const nlohmann::json& to_json() const noexcept { return json_; }

  private:
    std::string kind_;
    nlohmann::json json_;
};

/// Settings of a single `evolve` invocation, from a JSON file and/or flags.
struct RunConfig {
    std::optional<std::size_t> dimension;
    DistributionSpec distribution;
    std::optional<double> alpha;
    std::optional<std::uint64_t> budget;
    std::uint64_t seed = 0;
    std::optional<ObjectiveSpec> objective;
    std::optional<std::string> start_point;
    std::optional<std::string> trace_out;
    std::optional<std::string> report_out;
    bool reevaluate_incumbent = false;

    /// Strict: unknown keys and wrongly typed values throw ConfigError.
    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Checks that every required field is present and valid.
    EvolConfig evol_config() const;
};

/// Reads a whole file; throws ConfigError if it cannot be opened.
std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

/// A nonempty JSON array of finite numbers; throws ConfigError otherwise.
LatentVector point_from_json(const nlohmann::json& j);
LatentVector parse_point(const std::string& text);

/// A start point file holds one JSON array of numbers.
LatentVector read_start_point(const std::string& path);

} // namespace latentsearch
