#pragma once

#include "latentsearch/distributions.hpp"
#include "latentsearch/latent.hpp"
#include "latentsearch/objectives.hpp"
#include "latentsearch/random.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace latentsearch {

inline constexpr double kInfiniteAlpha = std::numeric_limits<double>::infinity();

/// Parameters of one (1+1)-ES run with mixed mutation rates.
struct EvolConfig {
    std::size_t dimension = 1;
    std::uint64_t budget = 1;
    /// Mutation strength in [0, inf]; kInfiniteAlpha turns every proposal into a full resample.
    double alpha = 0.0;
    std::uint64_t seed = 0;
    /// Evaluate the incumbent again on every iteration instead of caching its score.
    /// Meant for stochastic objectives; doubles the evaluation count.
    bool reevaluate_incumbent = false;

    /// Throws ConfigError unless dimension >= 1, budget >= 1 and alpha >= 0.
    void validate() const;
};

struct StepRecord {
    std::uint64_t iteration = 0; // 1-based
    double sampled_rate = 0.0;
    std::vector<std::size_t> mutated_indices; // ascending
    Score candidate_score;
    /// Incumbent score the candidate was compared against.
    Score incumbent_score;
    bool accepted = false;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RunTrace {
    LatentVector start_point;
    LatentVector final_point;
    std::vector<StepRecord> steps;
    Score initial_score;
    Score final_score;
    std::size_t hamming_drift = 0;
    std::uint64_t evaluations = 0;

    std::size_t accepted_steps() const;
    /// Size of the union of mutated indices over accepted steps; an upper bound on hamming_drift.
    std::size_t mutated_union_size() const;

    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// max(lo, min(hi, x)). Throws ConfigError if lo > hi.
double clip(double lo, double hi, double x);

/// r = clip(1/d, 1, alpha * u) with u uniform on [0, 1).
///
/// alpha = inf returns exactly 1 without drawing u; every finite alpha
/// consumes one uniform draw, including alpha = 0.
double sample_mutation_rate(double alpha, std::size_t dimension, RandomStream& rng);

struct Mutation {
    LatentVector point;
    std::vector<std::size_t> indices;
};

/// Each coordinate is selected independently with probability `rate` and
/// replaced by a fresh draw of its marginal. Coordinates are visited in order;
/// for each one the selection draw (skipped when rate >= 1) precedes the
/// marginal draw. Selected indices are reported even if the new value happens
/// to equal the old one. Throws DimensionMismatch if z and dist disagree.
Mutation mutate(const LatentVector& z, double rate, const LatentDistribution& dist, RandomStream& rng);

/// Number of coordinates where the two vectors differ (exact comparison).
std::size_t hamming_drift(const LatentVector& a, const LatentVector& b);

/// Runs the (1+1)-ES for exactly config.budget proposals.
///
/// Without `start`, z0 is a full sample of `dist` drawn from the run's stream
/// before the first iteration. A candidate replaces the incumbent only if its
/// score is strictly greater. With the default cached incumbent the objective
/// is called budget + 1 times. Objective failures propagate as
/// EvaluationError/TransportError annotated with the iteration.
RunTrace evolve(Objective& objective, const LatentDistribution& dist, const EvolConfig& config,
                const std::optional<LatentVector>& start = std::nullopt);

} // namespace latentsearch
