#pragma once

#include "latentsearch/evolve.hpp"
#include "latentsearch/latent.hpp"
#include "latentsearch/protocol.hpp"
#include "latentsearch/stats.hpp"
#include "latentsearch/transport.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

namespace latentsearch {

/// Distance between two latent vectors (or the artifacts they generate).
/// Implementations must be non-negative, symmetric and zero on identical inputs.
class DistanceMetric {
  public:
    virtual ~DistanceMetric() = default;
    virtual std::string name() const = 0;
    virtual double distance(std::span<const double> a, std::span<const double> b) = 0;
};

class EuclideanDistance final : public DistanceMetric {
  public:
    std::string name() const override { return "euclidean-latent"; }
    double distance(std::span<const double> a, std::span<const double> b) override;
};

/// Fraction of coordinates that differ.
class NormalizedHammingDistance final : public DistanceMetric {
  public:
    std::string name() const override { return "normalized-hamming-latent"; }
    double distance(std::span<const double> a, std::span<const double> b) override;
};

/// Perceptual distance computed by an external process speaking the
/// "evolgan-dist/1" variant of the line-JSON protocol (see protocol.hpp).
class ExternalDistance final : public DistanceMetric {
  public:
    ExternalDistance(std::unique_ptr<LineTransport> transport, std::chrono::milliseconds handshake_timeout);
    ~ExternalDistance() override;

    static std::unique_ptr<ExternalDistance> connect(const std::string& command,
                                                     std::chrono::milliseconds handshake_timeout);

    std::string name() const override;
    double distance(std::span<const double> a, std::span<const double> b) override;
    std::size_t dimension() const noexcept { return handshake_.dimension; }

  private:
    std::unique_ptr<LineTransport> transport_;
    protocol::Handshake handshake_;
    std::uint64_t next_id_ = 1;
};

/// "euclidean" / "euclidean-latent" or "hamming" / "normalized-hamming-latent";
/// "external:<command>" connects to a distance server. Throws ConfigError otherwise.
std::unique_ptr<DistanceMetric> make_metric(const std::string& spec);

struct DiversityReport {
    std::string metric;
    std::size_t sample_size = 0;
    double mean = 0.0;
    /// Sample standard deviation of the paired distances / sqrt(sample_size).
    double standard_error = 0.0;
    std::uint64_t pairing_seed = 0;

    friend bool operator==(const DiversityReport&, const DiversityReport&) = default;
};

/// Pairs every point with a partner drawn uniformly from the other n-1 points
/// (with replacement across points) and summarizes the paired distances.
/// Requires at least two points of equal length.
DiversityReport random_pairing_diversity(std::span<const LatentVector> points, DistanceMetric& metric,
                                         std::uint64_t pairing_seed);

/// Per-run drift figures; a RunTrace reduces to one of these.
struct DriftSample {
    std::size_t dimension = 0;
    std::size_t hamming_drift = 0;
    std::size_t mutated_union = 0;
};

DriftSample drift_sample(const RunTrace& trace);

/// Means over runs with 3-standard-error half-widths.
struct DriftSummary {
    std::size_t runs = 0;
    std::size_t dimension = 0;
    double mean_drift = 0.0;
    double drift_half_width = 0.0;
    double mean_mutated_union = 0.0;
    double mutated_union_half_width = 0.0;
    double mean_ratio = 0.0;
    double ratio_half_width = 0.0;
};

/// Throws ConfigError for an empty input or mixed dimensions.
DriftSummary drift_statistics(std::span<const DriftSample> samples);
DriftSummary drift_statistics(std::span<const RunTrace> traces);

/// Upper bound on the expected hamming drift after `budget` steps:
/// min(max(alpha, 1/d) * budget * d, d).
double drift_bound(double alpha, std::size_t dimension, std::uint64_t budget);

} // namespace latentsearch
