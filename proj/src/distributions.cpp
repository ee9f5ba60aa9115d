#include "latentsearch/distributions.hpp"

#include "latentsearch/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace latentsearch {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dimension(std::size_t d) {
    if (d == 0) {
        throw ConfigError("latent dimension must be at least 1");
    }
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(what) + " must be finite");
    }
}

} // namespace

LatentDistribution::LatentDistribution(std::size_t dimension, Params params)
    : dimension_(dimension), params_(std::move(params)) {}

LatentDistribution LatentDistribution::standard_normal(std::size_t dimension) {
    require_dimension(dimension);
    return {dimension, Normal{}};
}

LatentDistribution LatentDistribution::uniform_box(std::vector<double> lo, std::vector<double> hi) {
    require_dimension(lo.size());
    if (lo.size() != hi.size()) {
        throw DimensionMismatch("uniform-box bounds", lo.size(), hi.size());
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
        require_finite(lo[i], "uniform-box lower bound");
        require_finite(hi[i], "uniform-box upper bound");
        if (!(lo[i] < hi[i])) {
            throw ConfigError("uniform-box requires lo < hi at coordinate " + std::to_string(i));
        }
    }
    const std::size_t d = lo.size();
    return {d, Box{std::move(lo), std::move(hi)}};
}

LatentDistribution LatentDistribution::uniform_box(std::size_t dimension, double lo, double hi) {
    return uniform_box(std::vector<double>(dimension, lo), std::vector<double>(dimension, hi));
}

LatentDistribution LatentDistribution::discrete_set(std::vector<std::vector<double>> values) {
    require_dimension(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].empty()) {
            throw ConfigError("discrete-set values for coordinate " + std::to_string(i) + " are empty");
        }
        for (double v : values[i]) {
            require_finite(v, "discrete-set value");
        }
    }
    const std::size_t d = values.size();
    return {d, Discrete{std::move(values)}};
}

LatentDistribution LatentDistribution::discrete_set(std::size_t dimension, std::vector<double> values) {
    require_dimension(dimension);
    return discrete_set(std::vector<std::vector<double>>(dimension, values));
}

LatentDistribution LatentDistribution::point_mass(std::vector<double> value) {
    require_dimension(value.size());
    for (double v : value) {
        require_finite(v, "point-mass value");
    }
    const std::size_t d = value.size();
    return {d, Point{std::move(value)}};
}

LatentDistribution::Kind LatentDistribution::kind() const noexcept {
    return std::visit(overloaded{
                          [](const Normal&) { return Kind::StandardNormal; },
                          [](const Box&) { return Kind::UniformBox; },
                          [](const Discrete&) { return Kind::DiscreteSet; },
                          [](const Point&) { return Kind::PointMass; },
                      },
                      params_);
}

double LatentDistribution::draw_marginal(std::size_t i, RandomStream& rng) const {
    return std::visit(overloaded{
                          [&](const Normal&) { return rng.standard_normal(); },
                          [&](const Box& b) { return rng.uniform(b.lo[i], b.hi[i]); },
                          [&](const Discrete& s) {
                              const auto& v = s.values[i];
                              return v.size() == 1 ? v.front() : v[rng.index(v.size())];
                          },
                          [&](const Point& p) { return p.value[i]; },
                      },
                      params_);
}

double LatentDistribution::sample_marginal(std::size_t i, RandomStream& rng) const {
    if (i >= dimension_) {
        throw ConfigError("marginal index " + std::to_string(i) + " out of range for dimension " +
                          std::to_string(dimension_));
    }
    return draw_marginal(i, rng);
}

LatentVector LatentDistribution::sample_full(RandomStream& rng) const {
    std::vector<double> z(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) {
        z[i] = draw_marginal(i, rng);
    }
    return LatentVector(std::move(z));
}

std::string_view to_string(LatentDistribution::Kind kind) {
    switch (kind) {
    case LatentDistribution::Kind::StandardNormal:
        return "standard-normal";
    case LatentDistribution::Kind::UniformBox:
        return "uniform-box";
    case LatentDistribution::Kind::DiscreteSet:
        return "discrete-set";
    case LatentDistribution::Kind::PointMass:
        return "point-mass";
    }
    return "unknown";
}

} // namespace latentsearch
