#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace latentsearch {

/// A point z of the d-dimensional latent space. Coordinates are always finite.
class LatentVector {
  public:
    LatentVector() = default;

    /// Throws ConfigError if any coordinate is NaN or infinite.
    explicit LatentVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator[](std::size_t i) const { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    const std::vector<double>& to_vector() const noexcept { return values_; }

    /// Replaces coordinate i. The caller guarantees `value` is finite.
    void set_unchecked(std::size_t i, double value) { values_[i] = value; }

    friend bool operator==(const LatentVector&, const LatentVector&) = default;

  private:
    std::vector<double> values_;
};

/// Output of an objective. Ordered by value; construction via `checked` rejects non-finite values.
struct Score {
    double value = 0.0;

    /// Throws EvaluationError for NaN or infinite values.
    static Score checked(double value);

    friend auto operator<=>(const Score&, const Score&) = default;
};

} // namespace latentsearch
