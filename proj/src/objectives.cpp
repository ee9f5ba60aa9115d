#include "latentsearch/objectives.hpp"

#include "latentsearch/errors.hpp"

#include <cmath>
#include <numbers>

namespace latentsearch {

Score Objective::evaluate(const LatentVector& z) {
    if (z.size() != dimension()) {
        throw DimensionMismatch("objective input", dimension(), z.size());
    }
    const double value = score(z.values());
    if (!std::isfinite(value)) {
        throw EvaluationError("objective '" + name() + "' returned a non-finite score");
    }
    return Score{value};
}

SphereObjective::SphereObjective(LatentVector target) : target_(std::move(target)) {
    if (target_.empty()) {
        throw ConfigError("sphere target must have at least one coordinate");
    }
}

double SphereObjective::score(std::span<const double> z) {
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double diff = z[i] - target_[i];
        sum += diff * diff;
    }
    return -sum;
}

StaircaseObjective::StaircaseObjective(std::size_t dimension, int steps) : dimension_(dimension), steps_(steps) {
    if (dimension == 0) {
        throw ConfigError("objective dimension must be at least 1");
    }
    if (steps < 1) {
        throw ConfigError("staircase steps must be at least 1");
    }
}

double StaircaseObjective::score(std::span<const double> z) {
    double sum = 0.0;
    for (double v : z) {
        sum += std::floor(steps_ * v) / steps_;
    }
    return sum;
}

RastriginObjective::RastriginObjective(LatentVector center, double amplitude)
    : center_(std::move(center)), amplitude_(amplitude) {
    if (center_.empty()) {
        throw ConfigError("rastrigin center must have at least one coordinate");
    }
    if (!std::isfinite(amplitude) || amplitude < 0.0) {
        throw ConfigError("rastrigin amplitude must be finite and non-negative");
    }
}

double RastriginObjective::score(std::span<const double> z) {
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double x = z[i] - center_[i];
        sum += x * x + amplitude_ * (1.0 - std::cos(2.0 * std::numbers::pi * x));
    }
    return -sum;
}

ConstantObjective::ConstantObjective(std::size_t dimension, double value) : dimension_(dimension), value_(value) {
    if (dimension == 0) {
        throw ConfigError("objective dimension must be at least 1");
    }
    if (!std::isfinite(value)) {
        throw ConfigError("constant objective value must be finite");
    }
}

FirstCoordinateObjective::FirstCoordinateObjective(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) {
        throw ConfigError("objective dimension must be at least 1");
    }
}

AlwaysAcceptObjective::AlwaysAcceptObjective(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) {
        throw ConfigError("objective dimension must be at least 1");
    }
}

FunctionObjective::FunctionObjective(std::size_t dimension, Function fn, std::string name, bool deterministic)
    : dimension_(dimension), fn_(std::move(fn)), name_(std::move(name)), deterministic_(deterministic) {
    if (dimension == 0) {
        throw ConfigError("objective dimension must be at least 1");
    }
}

double CountingObjective::score(std::span<const double> z) {
    ++calls_;
    return inner_.evaluate(LatentVector(std::vector<double>(z.begin(), z.end()))).value;
}

} // namespace latentsearch
