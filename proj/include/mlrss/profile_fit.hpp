#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mlrss/errors.hpp"
#include "mlrss/nelder_mead.hpp"
#include "mlrss/profiles.hpp"

namespace mlrss {

/// Poisson log-likelihood of a signature's counts under baseline + profile
/// excess, including the log(o!) constant.
inline double signature_log_likelihood(const OutbreakSignature& sig,
                                       const ProfileShape& shape) {
  double ll = 0.0;
  for (std::size_t i = 0; i < sig.counts.size(); ++i) {
    const int day = sig.first_day + static_cast<int>(i);
    const double mean = sig.baseline[i] + delta(shape, day, sig.start);
    const double o = static_cast<double>(sig.counts[i]);
    ll += o * std::log(mean) - mean - std::lgamma(o + 1.0);
  }
  return ll;
}

struct ProfileFitOptions {
  bool literal_bimodal = false;   // two-center single-exponential variant
  int max_evaluations_per_start = 2000;
  double diameter_tol = 1e-6;
};

struct FittedProfile {
  ProfileShape shape;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

namespace detail {

inline ProfileShape shape_from_params(ProfileFamily family,
                                      const std::vector<double>& z,
                                      bool literal_bimodal) {
  // c and sigma live in log space so positivity needs no constraint handling.
  const double c = std::exp(z[0]);
  if (family == ProfileFamily::BimodalGaussian) {
    return ProfileShape::bimodal(c, z[1], z[2], std::exp(z[3]),
                                 literal_bimodal);
  }
  const double sigma = std::exp(z[2]);
  return family == ProfileFamily::LogNormalKernel
             ? ProfileShape::lognormal(c, z[1], sigma)
             : ProfileShape::gaussian(c, z[1], sigma);
}

}  // namespace detail

/// Maximum-likelihood profile parameters for one signature, by Nelder-Mead
/// from a coarse grid of starts (3 severity scales x 3 peak positions x 3
/// widths, both peak positions for the bimodal family). The best point gets
/// one restart to tighten a possibly collapsed simplex.
inline FittedProfile fit_theta(const OutbreakSignature& sig,
                               ProfileFamily family,
                               const ProfileFitOptions& opt = {}) {
  sig.validate();
  const int w = static_cast<int>(sig.counts.size());
  const int n_params = family == ProfileFamily::BimodalGaussian ? 4 : 3;
  if (w < n_params + 1) {
    throw DataError("fit_theta: window of " + std::to_string(w) +
                    " days cannot identify " + std::to_string(n_params) +
                    " parameters");
  }
  const int last_day = sig.first_day + w - 1;
  if (last_day < sig.start) {
    throw DataError("fit_theta: window ends before the outbreak start");
  }

  double peak_excess = 0.0;
  for (std::size_t i = 0; i < sig.counts.size(); ++i) {
    const int day = sig.first_day + static_cast<int>(i);
    if (day < sig.start) continue;
    peak_excess = std::max(
        peak_excess, static_cast<double>(sig.counts[i]) - sig.baseline[i]);
  }
  peak_excess = std::max(peak_excess, 0.5);

  const double u_lo = std::max(1.0, static_cast<double>(sig.first_day - sig.start + 1));
  const double u_hi = static_cast<double>(last_day - sig.start + 1);
  const double u_span = std::max(u_hi - u_lo, 1.0);

  const double c_grid[3] = {0.25 * peak_excess, peak_excess, 4.0 * peak_excess};
  const double u_grid[3] = {u_lo + 0.25 * u_span, u_lo + 0.5 * u_span,
                            u_lo + 0.75 * u_span};
  const double wd = static_cast<double>(w);
  const double sigma_grid[3] = {1.0, wd / 4.0, wd * wd / 4.0};

  auto objective = [&](const std::vector<double>& z) {
    return -signature_log_likelihood(
        sig, detail::shape_from_params(family, z, opt.literal_bimodal));
  };

  NelderMeadOptions nm;
  nm.max_evaluations = opt.max_evaluations_per_start;
  nm.diameter_tol = opt.diameter_tol;

  FittedProfile best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  std::vector<double> best_z;

  auto consider = [&](const std::vector<double>& start) {
    const NelderMeadResult r = nelder_mead(objective, start, nm);
    best.evaluations += r.evaluations;
    if (-r.value > best.log_likelihood) {
      best.log_likelihood = -r.value;
      best_z = r.x;
    }
  };

  for (double c0 : c_grid) {
    for (double s0 : sigma_grid) {
      if (family == ProfileFamily::BimodalGaussian) {
        for (double m1 : u_grid) {
          for (double m2 : u_grid) {
            consider({std::log(c0), m1, m2, std::log(s0)});
          }
        }
      } else {
        for (double m : u_grid) {
          const double mu0 =
              family == ProfileFamily::LogNormalKernel ? std::log(m) : m;
          consider({std::log(c0), mu0, std::log(s0)});
        }
      }
    }
  }

  if (best_z.empty()) {
    throw FitFailed("fit_theta: no start produced a finite likelihood");
  }
  consider(best_z);  // polish

  best.shape = detail::shape_from_params(family, best_z, opt.literal_bimodal);
  if (!std::isfinite(best.shape.c) || !std::isfinite(best.shape.sigma) ||
      !std::isfinite(best.shape.mu1) || !std::isfinite(best.shape.mu2) ||
      !std::isfinite(best.log_likelihood)) {
    throw FitFailed("fit_theta: optimizer left the finite domain");
  }
  return best;
}

struct BankBuildResult {
  ProfileBank bank;
  int failed = 0;  // signatures dropped because their fit failed
};

/// Per-signature MLEs in input order; failed fits are dropped and counted.
inline BankBuildResult build_bank(const std::vector<OutbreakSignature>& signatures,
                                  ProfileFamily family,
                                  const ProfileFitOptions& opt = {}) {
  if (signatures.empty()) throw DataError("build_bank: no signatures");
  std::vector<ProfileShape> shapes;
  shapes.reserve(signatures.size());
  int failed = 0;
  for (const OutbreakSignature& sig : signatures) {
    try {
      shapes.push_back(fit_theta(sig, family, opt).shape);
    } catch (const Error&) {
      // A malformed or uninformative signature costs one bank entry, not
      // the whole bank.
      ++failed;
    }
  }
  if (shapes.empty()) {
    throw EmptyBank("build_bank: every profile fit failed (" +
                    std::to_string(failed) + " signatures)");
  }
  return BankBuildResult{ProfileBank(std::move(shapes)), failed};
}

}  // namespace mlrss
