#pragma once

#include <cstddef>
#include <span>

namespace latentsearch {

/// Sample mean with its standard error (sample standard deviation / sqrt(n)).
/// The standard error is 0 for fewer than two samples.
struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;

    double half_width(double z = 3.0) const { return z * stderr_; }
};

MeanStderr mean_stderr(std::span<const double> samples);

} // namespace latentsearch
