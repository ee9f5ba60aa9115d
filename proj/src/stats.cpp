#include "latentsearch/stats.hpp"

#include <cmath>

namespace latentsearch {

MeanStderr mean_stderr(std::span<const double> samples) {
    MeanStderr out;
    out.count = samples.size();
    if (samples.empty()) {
        return out;
    }
    // Two-pass; summation order is the span order so results are reproducible.
    double sum = 0.0;
    for (double x : samples) {
        sum += x;
    }
    out.mean = sum / static_cast<double>(samples.size());
    if (samples.size() < 2) {
        return out;
    }
    double ss = 0.0;
    for (double x : samples) {
        const double dev = x - out.mean;
        ss += dev * dev;
    }
    const double n = static_cast<double>(samples.size());
    out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

} // namespace latentsearch
