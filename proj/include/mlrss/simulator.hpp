#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mlrss/baseline.hpp"
#include "mlrss/calendar.hpp"
#include "mlrss/design.hpp"
#include "mlrss/errors.hpp"
#include "mlrss/profiles.hpp"
#include "mlrss/rng.hpp"
#include "mlrss/series.hpp"

namespace mlrss {

/// A day belongs to an outbreak's effective window while its excess exceeds
/// this fraction of the outbreak's peak excess.
inline constexpr double kEffectiveFraction = 0.05;

struct SimOutbreak {
  int t_o = 1;
  ProfileShape shape;
};

struct SimConfig {
  std::vector<double> beta_true;
  DesignSpec spec = DesignSpec::contest();
  Date epoch = default_epoch();
  Date start = default_epoch();
  int horizon_days = 365;
  std::vector<SimOutbreak> outbreaks;
  std::uint64_t seed = 1;

  void validate() const {
    spec.validate();
    if (horizon_days < 1) throw DataError("SimConfig: horizon must be >= 1");
    if (beta_true.size() != static_cast<std::size_t>(spec.column_count())) {
      throw DataError("SimConfig: beta_true has " +
                      std::to_string(beta_true.size()) + " entries, design has " +
                      std::to_string(spec.column_count()) + " columns");
    }
    for (const SimOutbreak& ob : outbreaks) {
      if (ob.t_o < 1 || ob.t_o > horizon_days) {
        throw DataError("SimConfig: outbreak start " + std::to_string(ob.t_o) +
                        " outside 1.." + std::to_string(horizon_days));
      }
    }
  }
};

struct TruthOutbreak {
  int index = 0;  // position in SimConfig::outbreaks
  ProfileShape shape;
  int t_o = 1;
  int effective_start = 1;
  int effective_end = 1;
  int peak_day = 1;
  double peak = 0.0;        // largest daily excess inside the horizon
  bool truncated = false;   // effective window runs past the horizon
};

struct SimTruth {
  std::vector<double> lambda;  // true baseline mean per day, 0-indexed
  std::vector<double> delta;   // summed excess per day, 0-indexed
  std::vector<TruthOutbreak> outbreaks;
};

struct SimResult {
  CountSeries series;
  SimTruth truth;
};

/// Draws one series of daily counts from Poisson(lambda_t + delta_t) with
/// the baseline mean from beta_true and the excess summed over outbreaks.
inline SimResult simulate(const SimConfig& config) {
  config.validate();
  const std::vector<CalendarDay> days = calendar_days(
      config.start, config.horizon_days, config.epoch, config.spec.period_days);

  SimTruth truth;
  truth.lambda.resize(static_cast<std::size_t>(config.horizon_days));
  truth.delta.assign(static_cast<std::size_t>(config.horizon_days), 0.0);
  for (std::size_t i = 0; i < days.size(); ++i) {
    const std::vector<double> row = build_design_row(days[i], config.spec);
    truth.lambda[i] = BaselineModel::lambda_from_row(row, config.beta_true);
    if (!std::isfinite(truth.lambda[i]) || !(truth.lambda[i] > 0.0)) {
      throw OverflowError("simulate: true baseline mean is not positive and finite");
    }
  }

  for (std::size_t k = 0; k < config.outbreaks.size(); ++k) {
    const SimOutbreak& ob = config.outbreaks[k];
    TruthOutbreak rec;
    rec.index = static_cast<int>(k);
    rec.shape = ob.shape;
    rec.t_o = ob.t_o;
    std::vector<double> excess(static_cast<std::size_t>(config.horizon_days), 0.0);
    for (int t = ob.t_o; t <= config.horizon_days; ++t) {
      const double d = delta(ob.shape, t, ob.t_o);
      excess[static_cast<std::size_t>(t - 1)] = d;
      truth.delta[static_cast<std::size_t>(t - 1)] += d;
      if (d > rec.peak) {
        rec.peak = d;
        rec.peak_day = t;
      }
    }
    const double threshold = kEffectiveFraction * rec.peak;
    int first = 0;
    int last = 0;
    for (int t = ob.t_o; t <= config.horizon_days; ++t) {
      if (excess[static_cast<std::size_t>(t - 1)] > threshold) {
        if (first == 0) first = t;
        last = t;
      }
    }
    // A peak of zero cannot happen for t_o within the horizon, but keep the
    // record well formed regardless.
    rec.effective_start = first == 0 ? ob.t_o : first;
    rec.effective_end = last == 0 ? ob.t_o : last;
    rec.truncated =
        rec.effective_end == config.horizon_days &&
        delta(ob.shape, config.horizon_days + 1, ob.t_o) > threshold;
    truth.outbreaks.push_back(rec);
  }

  Rng rng(config.seed);
  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(config.horizon_days));
  for (int t = 1; t <= config.horizon_days; ++t) {
    const std::size_t i = static_cast<std::size_t>(t - 1);
    counts.push_back(rng.poisson(truth.lambda[i] + truth.delta[i]));
  }
  return SimResult{CountSeries(config.start, std::move(counts)), std::move(truth)};
}

/// Cuts the labeled window (plus margin, clipped to the horizon) out of a
/// simulated series, with the true baseline attached.
inline OutbreakSignature extract_signature(const SimResult& sim,
                                           std::size_t outbreak_index,
                                           int margin = 2) {
  if (outbreak_index >= sim.truth.outbreaks.size()) {
    throw IndexOutOfRange("extract_signature: no outbreak " +
                          std::to_string(outbreak_index));
  }
  const TruthOutbreak& ob = sim.truth.outbreaks[outbreak_index];
  const int horizon = static_cast<int>(sim.series.size());
  const int lo = std::max(1, ob.effective_start - margin);
  const int hi = std::min(horizon, ob.effective_end + margin);
  OutbreakSignature sig;
  sig.start = ob.t_o;
  sig.first_day = lo;
  sig.truncated = ob.truncated;
  for (int t = lo; t <= hi; ++t) {
    sig.counts.push_back(sim.series.at(t));
    sig.baseline.push_back(sim.truth.lambda[static_cast<std::size_t>(t - 1)]);
  }
  return sig;
}

/// Baseline coefficients with geometrically decaying seasonal amplitudes,
/// usable with any design: intercept log(50), weekday lift 0.2, harmonic
/// pair j at 0.3 and 0.15 times 2^-j, interaction pair j at 0.05 and -0.03
/// times 2^-j.
inline std::vector<double> default_true_beta(const DesignSpec& spec) {
  std::vector<double> beta;
  beta.reserve(static_cast<std::size_t>(spec.column_count()));
  if (spec.include_intercept) beta.push_back(std::log(50.0));
  beta.push_back(0.2);
  for (std::size_t j = 0; j < spec.harmonic_frequencies.size(); ++j) {
    const double scale = std::pow(0.5, static_cast<double>(j));
    beta.push_back(0.3 * scale);
    beta.push_back(0.15 * scale);
  }
  for (std::size_t j = 0; j < spec.interaction_frequencies.size(); ++j) {
    const double scale = std::pow(0.5, static_cast<double>(j));
    beta.push_back(0.05 * scale);
    beta.push_back(-0.03 * scale);
  }
  return beta;
}

/// n variants of a center shape with every scale parameter multiplied by an
/// independent uniform factor in [1 - jitter, 1 + jitter], starting at
/// first_start and spaced a fixed number of days apart. Day-offset means are
/// jittered directly; the log-scale mean of the lognormal kernel is jittered
/// through its mode so the factor acts on days there too.
inline std::vector<SimOutbreak> make_jittered_outbreaks(
    const ProfileShape& center, int n, int first_start, int spacing, Rng& rng,
    double jitter = 0.25) {
  if (n < 1) throw DataError("make_jittered_outbreaks: n must be >= 1");
  if (!(jitter >= 0.0 && jitter < 1.0)) {
    throw DataError("make_jittered_outbreaks: jitter must be in [0, 1)");
  }
  auto factor = [&]() { return 1.0 + jitter * (2.0 * rng.uniform() - 1.0); };
  std::vector<SimOutbreak> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double c = center.c * factor();
    const double sigma = center.sigma * factor();
    ProfileShape shape;
    switch (center.family) {
      case ProfileFamily::LogNormalKernel:
        shape = ProfileShape::lognormal(
            c, std::log(std::exp(center.mu1) * factor()), sigma);
        break;
      case ProfileFamily::GaussianKernel:
        shape = ProfileShape::gaussian(c, center.mu1 * factor(), sigma);
        break;
      case ProfileFamily::BimodalGaussian:
        shape = ProfileShape::bimodal(c, center.mu1 * factor(),
                                      center.mu2 * factor(), sigma,
                                      center.literal_bimodal);
        break;
    }
    out.push_back(SimOutbreak{first_start + k * spacing, shape});
  }
  return out;
}

}  // namespace mlrss
