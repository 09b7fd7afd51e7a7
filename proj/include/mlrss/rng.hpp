#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "mlrss/errors.hpp"

namespace mlrss {

/// Seeded random source with fully specified output. mt19937_64 has a
/// portable bit stream, but the standard library's distributions do not, so
/// the uniform and Poisson transforms are pinned here to keep simulations
/// byte-reproducible across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  long long poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
      throw NumericalError("Rng::poisson: mean must be finite and >= 0, got " +
                           std::to_string(mean));
    }
    if (mean == 0.0) return 0;
    return mean < 30.0 ? poisson_inversion(mean) : poisson_ptrd(mean);
  }

 private:
  // Sequential search on the CDF; one uniform per draw.
  long long poisson_inversion(double mean) {
    const double u = uniform();
    // Summation stalls just below 1 in floating point, so an unreachable u
    // needs an explicit stop.
    const long long cap = static_cast<long long>(12.0 * mean) + 50;
    double p = std::exp(-mean);
    double cdf = p;
    long long k = 0;
    while (u > cdf && k < cap) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // Hoermann's transformed rejection with decomposition (PTRD). Two uniforms
  // per attempt, acceptance well above 90% for the means used here.
  long long poisson_ptrd(double mean) {
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mean);

    for (;;) {
      const double u = uniform() - 0.5;
      double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const double lhs =
          std::log(v * inv_alpha / (a / (us * us) + b));
      const double rhs = kf * log_mu - mean - std::lgamma(kf + 1.0);
      if (lhs <= rhs) return static_cast<long long>(kf);
    }
  }

  std::mt19937_64 engine_;
};

}  // namespace mlrss
