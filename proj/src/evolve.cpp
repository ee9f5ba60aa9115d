#include "latentsearch/evolve.hpp"

#include "latentsearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace latentsearch {

void EvolConfig::validate() const {
    if (dimension < 1) {
        throw ConfigError("dimension must be at least 1");
    }
    if (budget < 1) {
        throw ConfigError("budget must be at least 1");
    }
    if (std::isnan(alpha) || alpha < 0.0) {
        throw ConfigError("alpha must be in [0, inf]");
    }
}

std::size_t RunTrace::accepted_steps() const {
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [](const StepRecord& s) { return s.accepted; }));
}

std::size_t RunTrace::mutated_union_size() const {
    std::vector<bool> seen(start_point.size(), false);
    std::size_t count = 0;
    for (const auto& step : steps) {
        if (!step.accepted) {
            continue;
        }
        for (std::size_t i : step.mutated_indices) {
            if (!seen[i]) {
                seen[i] = true;
                ++count;
            }
        }
    }
    return count;
}

double clip(double lo, double hi, double x) {
    if (lo > hi) {
        throw ConfigError("clip bounds out of order: " + std::to_string(lo) + " > " + std::to_string(hi));
    }
    return std::max(lo, std::min(hi, x));
}

double sample_mutation_rate(double alpha, std::size_t dimension, RandomStream& rng) {
    if (std::isinf(alpha)) {
        return 1.0;
    }
    const double u = rng.uniform();
    return clip(1.0 / static_cast<double>(dimension), 1.0, alpha * u);
}

Mutation mutate(const LatentVector& z, double rate, const LatentDistribution& dist, RandomStream& rng) {
    if (z.size() != dist.dimension()) {
        throw DimensionMismatch("mutate", dist.dimension(), z.size());
    }
    Mutation out{z, {}};
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (rng.bernoulli(rate)) {
            out.point.set_unchecked(j, dist.draw_marginal(j, rng));
            out.indices.push_back(j);
        }
    }
    return out;
}

std::size_t hamming_drift(const LatentVector& a, const LatentVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("hamming_drift", a.size(), b.size());
    }
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        n += a[i] != b[i] ? 1 : 0;
    }
    return n;
}

namespace {

Score evaluate_at(Objective& objective, const LatentVector& z, std::uint64_t iteration) {
    try {
        return objective.evaluate(z);
    } catch (const EvaluationError& e) {
        throw EvaluationError("iteration " + std::to_string(iteration) + ": " + e.what(),
                              static_cast<std::int64_t>(iteration));
    } catch (const TransportError& e) {
        throw TransportError("iteration " + std::to_string(iteration) + ": " + e.what());
    }
}

void check_trace(const RunTrace& trace, const EvolConfig& config) {
    const double min_rate = 1.0 / static_cast<double>(config.dimension);
    Score previous = trace.initial_score;
    for (const auto& step : trace.steps) {
        if (!(step.sampled_rate >= min_rate && step.sampled_rate <= 1.0)) {
            throw InvariantViolation("mutation rate outside [1/d, 1] at iteration " + std::to_string(step.iteration));
        }
        if (step.accepted != (step.candidate_score > step.incumbent_score)) {
            throw InvariantViolation("acceptance decision inconsistent at iteration " + std::to_string(step.iteration));
        }
        if (!config.reevaluate_incumbent && step.incumbent_score < previous) {
            throw InvariantViolation("incumbent score decreased at iteration " + std::to_string(step.iteration));
        }
        previous = step.accepted ? step.candidate_score : step.incumbent_score;
    }
    if (!config.reevaluate_incumbent && trace.final_score < trace.initial_score) {
        throw InvariantViolation("final score below initial score");
    }
}

} // namespace

RunTrace evolve(Objective& objective, const LatentDistribution& dist, const EvolConfig& config,
                const std::optional<LatentVector>& start) {
    config.validate();
    if (objective.dimension() != config.dimension) {
        throw DimensionMismatch("objective", config.dimension, objective.dimension());
    }
    if (dist.dimension() != config.dimension) {
        throw DimensionMismatch("distribution", config.dimension, dist.dimension());
    }
    if (start && start->size() != config.dimension) {
        throw DimensionMismatch("start point", config.dimension, start->size());
    }

    RandomStream rng(config.seed);
    RunTrace trace;
    trace.start_point = start ? *start : dist.sample_full(rng);
    trace.steps.reserve(config.budget);

    LatentVector incumbent = trace.start_point;
    Score incumbent_score = evaluate_at(objective, incumbent, 0);
    trace.initial_score = incumbent_score;
    std::uint64_t evaluations = 1;

    for (std::uint64_t i = 1; i <= config.budget; ++i) {
        const double rate = sample_mutation_rate(config.alpha, config.dimension, rng);
        Mutation proposal = mutate(incumbent, rate, dist, rng);
        const Score candidate = evaluate_at(objective, proposal.point, i);
        ++evaluations;
        if (config.reevaluate_incumbent) {
            incumbent_score = evaluate_at(objective, incumbent, i);
            ++evaluations;
        }

        StepRecord record;
        record.iteration = i;
        record.sampled_rate = rate;
        record.mutated_indices = std::move(proposal.indices);
        record.candidate_score = candidate;
        record.incumbent_score = incumbent_score;
        record.accepted = candidate > incumbent_score;
        if (record.accepted) {
            incumbent = std::move(proposal.point);
            incumbent_score = candidate;
        }
        trace.steps.push_back(std::move(record));
    }

    trace.final_point = std::move(incumbent);
    trace.final_score = incumbent_score;
    trace.hamming_drift = hamming_drift(trace.final_point, trace.start_point);
    trace.evaluations = evaluations;
    check_trace(trace, config);
    return trace;
}

} // namespace latentsearch
