#pragma once

#include "latentsearch/latent.hpp"
#include "latentsearch/random.hpp"

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace latentsearch {

/// Coordinate-independent prior P on R^d.
///
/// Every kind is a product of per-coordinate marginals. `sample_full` draws
/// coordinates 0..d-1 in order through the same routine as `sample_marginal`,
/// so a full sample consumes exactly the random numbers of d marginal draws.
/// Immutable after construction and safe to share between threads.
class LatentDistribution {
  public:
    enum class Kind { StandardNormal, UniformBox, DiscreteSet, PointMass };

    static LatentDistribution standard_normal(std::size_t dimension);
    /// Requires lo[i] < hi[i] for every i.
    static LatentDistribution uniform_box(std::vector<double> lo, std::vector<double> hi);
    static LatentDistribution uniform_box(std::size_t dimension, double lo, double hi);
    /// Coordinate i is drawn uniformly from values[i]; every list must be nonempty.
    static LatentDistribution discrete_set(std::vector<std::vector<double>> values);
    static LatentDistribution discrete_set(std::size_t dimension, std::vector<double> values);
    static LatentDistribution point_mass(std::vector<double> value);

    std::size_t dimension() const noexcept { return dimension_; }
    Kind kind() const noexcept;

    LatentVector sample_full(RandomStream& rng) const;

    /// One draw from marginal i. Throws ConfigError if i >= dimension().
    double sample_marginal(std::size_t i, RandomStream& rng) const;

    /// Same as sample_marginal without the range check.
    double draw_marginal(std::size_t i, RandomStream& rng) const;

    struct Normal {};
    struct Box {
        std::vector<double> lo;
        std::vector<double> hi;
    };
    struct Discrete {
        std::vector<std::vector<double>> values;
    };
    struct Point {
        std::vector<double> value;
    };
    using Params = std::variant<Normal, Box, Discrete, Point>;

    const Params& params() const noexcept { return params_; }

  private:
    LatentDistribution(std::size_t dimension, Params params);

    std::size_t dimension_;
    Params params_;
};

std::string_view to_string(LatentDistribution::Kind kind);

} // namespace latentsearch
