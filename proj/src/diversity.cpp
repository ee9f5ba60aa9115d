#include "latentsearch/diversity.hpp"

#include "latentsearch/errors.hpp"
#include "latentsearch/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace latentsearch {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("distance arguments", a.size(), b.size());
    }
}

} // namespace

double EuclideanDistance::distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double NormalizedHammingDistance::distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b);
    if (a.empty()) {
        return 0.0;
    }
    std::size_t differ = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        differ += a[i] != b[i] ? 1 : 0;
    }
    return static_cast<double>(differ) / static_cast<double>(a.size());
}

ExternalDistance::ExternalDistance(std::unique_ptr<LineTransport> transport,
                                   std::chrono::milliseconds handshake_timeout)
    : transport_(std::move(transport)) {
    const auto line = transport_->read_line(handshake_timeout);
    if (!line) {
        throw TransportError(transport_->describe() + " exited before sending a handshake");
    }
    handshake_ = protocol::parse_handshake(*line, protocol::kDistanceProtocol);
}

ExternalDistance::~ExternalDistance() {
    try {
        transport_->write_line(protocol::encode_shutdown());
    } catch (...) {
    }
}

std::unique_ptr<ExternalDistance> ExternalDistance::connect(const std::string& command,
                                                           std::chrono::milliseconds handshake_timeout) {
    if (command.empty()) {
        throw ConfigError("external distance command is empty");
    }
    return std::make_unique<ExternalDistance>(std::make_unique<Subprocess>(command), handshake_timeout);
}

std::string ExternalDistance::name() const {
    if (const auto it = handshake_.meta.find("metric"); it != handshake_.meta.end() && it->is_string()) {
        return "external-perceptual:" + it->get<std::string>();
    }
    return "external-perceptual";
}

double ExternalDistance::distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a, b);
    if (a.size() != handshake_.dimension) {
        throw DimensionMismatch("external distance input", handshake_.dimension, a.size());
    }
    const std::uint64_t id = next_id_++;
    transport_->write_line(protocol::encode_distance_request(id, a, b));
    const auto line = transport_->read_line(std::chrono::milliseconds(0));
    if (!line) {
        throw TransportError(transport_->describe() + " exited while request " + std::to_string(id) +
                             " was pending");
    }
    const auto reply = protocol::parse_reply(*line, "distance");
    if (reply.id != id) {
        throw TransportError("id mismatch: sent request " + std::to_string(id) + ", reply carries id " +
                             std::to_string(reply.id));
    }
    if (reply.error) {
        throw EvaluationError("external distance reported an error: " + *reply.error);
    }
    if (!std::isfinite(*reply.value) || *reply.value < 0.0) {
        throw EvaluationError("external distance returned an invalid value " + protocol::format_real(*reply.value));
    }
    return *reply.value;
}

std::unique_ptr<DistanceMetric> make_metric(const std::string& spec) {
    if (spec == "euclidean" || spec == "euclidean-latent") {
        return std::make_unique<EuclideanDistance>();
    }
    if (spec == "hamming" || spec == "normalized-hamming" || spec == "normalized-hamming-latent") {
        return std::make_unique<NormalizedHammingDistance>();
    }
    constexpr std::string_view prefix = "external:";
    if (spec.starts_with(prefix)) {
        return ExternalDistance::connect(spec.substr(prefix.size()), std::chrono::milliseconds(10000));
    }
    throw ConfigError("unknown distance metric '" + spec + "'");
}

DiversityReport random_pairing_diversity(std::span<const LatentVector> points, DistanceMetric& metric,
                                         std::uint64_t pairing_seed) {
    const std::size_t n = points.size();
    if (n < 2) {
        throw ConfigError("random-pairing diversity needs at least 2 points, got " + std::to_string(n));
    }
    for (const auto& p : points) {
        if (p.size() != points.front().size()) {
            throw DimensionMismatch("diversity points", points.front().size(), p.size());
        }
    }

    RandomStream rng(pairing_seed);
    std::vector<double> distances(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Uniform over the other n-1 indices.
        std::size_t partner = rng.index(n - 1);
        if (partner >= i) {
            ++partner;
        }
        distances[i] = metric.distance(points[i].values(), points[partner].values());
    }
    const MeanStderr s = mean_stderr(distances);
    return {metric.name(), n, s.mean, s.stderr_, pairing_seed};
}

DriftSample drift_sample(const RunTrace& trace) {
    return {trace.start_point.size(), trace.hamming_drift, trace.mutated_union_size()};
}

DriftSummary drift_statistics(std::span<const DriftSample> samples) {
    if (samples.empty()) {
        throw ConfigError("drift statistics need at least one run");
    }
    const std::size_t d = samples.front().dimension;
    std::vector<double> drift;
    std::vector<double> unions;
    std::vector<double> ratio;
    drift.reserve(samples.size());
    unions.reserve(samples.size());
    ratio.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.dimension != d) {
            throw DimensionMismatch("drift statistics", d, s.dimension);
        }
        drift.push_back(static_cast<double>(s.hamming_drift));
        unions.push_back(static_cast<double>(s.mutated_union));
        ratio.push_back(static_cast<double>(s.hamming_drift) / static_cast<double>(d));
    }
    const MeanStderr md = mean_stderr(drift);
    const MeanStderr mu = mean_stderr(unions);
    const MeanStderr mr = mean_stderr(ratio);

    DriftSummary out;
    out.runs = samples.size();
    out.dimension = d;
    out.mean_drift = md.mean;
    out.drift_half_width = md.half_width();
    out.mean_mutated_union = mu.mean;
    out.mutated_union_half_width = mu.half_width();
    out.mean_ratio = mr.mean;
    out.ratio_half_width = mr.half_width();
    return out;
}

DriftSummary drift_statistics(std::span<const RunTrace> traces) {
    std::vector<DriftSample> samples;
    samples.reserve(traces.size());
    for (const auto& t : traces) {
        samples.push_back(drift_sample(t));
    }
    return drift_statistics(samples);
}

double drift_bound(double alpha, std::size_t dimension, std::uint64_t budget) {
    const double d = static_cast<double>(dimension);
    const double rate_cap = std::max(alpha, 1.0 / d);
    if (std::isinf(rate_cap)) {
        return d;
    }
    return std::min(rate_cap * static_cast<double>(budget) * d, d);
}

} // namespace latentsearch
