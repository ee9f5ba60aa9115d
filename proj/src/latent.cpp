#include "latentsearch/latent.hpp"

#include "latentsearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace latentsearch {

LatentVector::LatentVector(std::vector<double> values) : values_(std::move(values)) {
    const auto bad = std::find_if(values_.begin(), values_.end(), [](double v) { return !std::isfinite(v); });
    if (bad != values_.end()) {
        throw ConfigError("latent coordinate " + std::to_string(bad - values_.begin()) + " is not finite");
    }
}

Score Score::checked(double value) {
    if (!std::isfinite(value)) {
        throw EvaluationError("objective returned a non-finite score");
    }
    return Score{value};
}

} // namespace latentsearch
