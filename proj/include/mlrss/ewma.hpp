#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "mlrss/errors.hpp"

namespace mlrss {

/// Exponentially weighted moving average of positive standardized residuals,
/// the reference detector the scan statistic is compared against.
class EwmaDetector {
 public:
  explicit EwmaDetector(double phi = 0.25) : phi_(phi) {
    if (!(phi > 0.0 && phi <= 1.0)) {
      throw DataError("EwmaDetector: phi must be in (0, 1], got " +
                      std::to_string(phi));
    }
  }

  double phi() const { return phi_; }
  double score() const { return score_; }

  /// Feeds one day and returns the updated score.
  double step(long long count, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw NonpositiveLambda("EwmaDetector: baseline mean must be positive");
    }
    const double residual =
        std::max(static_cast<double>(count) - lambda, 0.0) / std::sqrt(lambda);
    score_ = (1.0 - phi_) * score_ + phi_ * residual;
    return score_;
  }

 private:
  double phi_;
  double score_ = 0.0;
};

}  // namespace mlrss
