#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mlrss/baseline.hpp"
#include "mlrss/calendar.hpp"
#include "mlrss/errors.hpp"
#include "mlrss/profiles.hpp"

namespace mlrss {

/// Log likelihood ratio of outbreak-vs-baseline for one window, with the
/// excess means given explicitly. Each day contributes
/// -delta + o * log1p(delta / lambda).
inline double log_lr(std::span<const std::int64_t> counts,
                     std::span<const double> lambdas,
                     std::span<const double> deltas) {
  if (counts.size() != lambdas.size() || counts.size() != deltas.size()) {
    throw RangeMismatch("log_lr: counts, lambdas, deltas lengths differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(lambdas[i] > 0.0)) {
      throw NonpositiveLambda("log_lr: baseline mean must be positive");
    }
    sum += -deltas[i] +
           static_cast<double>(counts[i]) * std::log1p(deltas[i] / lambdas[i]);
  }
  return sum;
}

/// Same ratio with the excess taken from a profile shape. counts[i] is the
/// observation on day first_day + i; days before t_o contribute nothing.
inline double log_lr(std::span<const std::int64_t> counts,
                     std::span<const double> lambdas, const ProfileShape& shape,
                     int t_o, int first_day) {
  if (counts.size() != lambdas.size()) {
    throw RangeMismatch("log_lr: counts and lambdas lengths differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(lambdas[i] > 0.0)) {
      throw NonpositiveLambda("log_lr: baseline mean must be positive");
    }
    const double d = delta(shape, first_day + static_cast<int>(i), t_o);
    sum += -d + static_cast<double>(counts[i]) * std::log1p(d / lambdas[i]);
  }
  return sum;
}

/// Replaces the window's most extreme observation with the model mean when
/// its standardized residual under baseline + excess tops gamma. One pass by
/// default; repeat mode keeps going until the window is clean. Returns the
/// number of values replaced.
inline int remediate_inplace(std::span<std::int64_t> counts,
                             std::span<const double> lambdas,
                             const ProfileShape& shape, int t_o, int first_day,
                             double gamma, bool repeat = false) {
  if (counts.size() != lambdas.size()) {
    throw RangeMismatch("remediate: counts and lambdas lengths differ");
  }
  if (counts.empty()) return 0;
  int modified = 0;
  // Each replacement drives that day's residual under gamma, so at most one
  // pass per window day can replace anything.
  const int max_passes = static_cast<int>(counts.size());
  for (int pass = 0; pass <= max_passes; ++pass) {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double mean =
          lambdas[i] + delta(shape, first_day + static_cast<int>(i), t_o);
      const double r =
          (static_cast<double>(counts[i]) - mean) / std::sqrt(mean);
      if (r > worst) {  // strict: ties resolve to the earliest day
        worst = r;
        worst_i = i;
      }
    }
    if (!(worst > gamma)) break;
    const double mean =
        lambdas[worst_i] +
        delta(shape, first_day + static_cast<int>(worst_i), t_o);
    counts[worst_i] = std::llround(mean);
    ++modified;
    if (!repeat) break;
  }
  return modified;
}

struct RemediateResult {
  std::vector<std::int64_t> counts;
  bool modified = false;
  int replaced = 0;
};

inline RemediateResult remediate(std::vector<std::int64_t> counts,
                                 std::span<const double> lambdas,
                                 const ProfileShape& shape, int t_o,
                                 int first_day, double gamma,
                                 bool repeat = false) {
  RemediateResult out{std::move(counts), false, 0};
  out.replaced =
      remediate_inplace(out.counts, lambdas, shape, t_o, first_day, gamma, repeat);
  out.modified = out.replaced > 0;
  return out;
}

struct MlrOptions {
  bool remediation = true;
  double gamma = 23.0;
  bool repeat_remediation = false;
};

/// Log of the bank-averaged likelihood ratio for a window starting at t_o,
/// via log-sum-exp. Remediation works on a scratch copy per shape, since the
/// excess means differ; the caller's counts are never touched.
inline double log_mlr(std::span<const std::int64_t> counts,
                      std::span<const double> lambdas, const ProfileBank& bank,
                      int t_o, const MlrOptions& opt = {},
                      int* remediated = nullptr) {
  if (bank.size() < 1) throw EmptyBank("log_mlr: empty profile bank");
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(bank.size()));
  std::vector<std::int64_t> scratch;
  int modified_total = 0;
  for (int j = 0; j < bank.size(); ++j) {
    const ProfileShape& shape = bank.shape(j);
    if (opt.remediation) {
      scratch.assign(counts.begin(), counts.end());
      modified_total += remediate_inplace(scratch, lambdas, shape, t_o, t_o,
                                          opt.gamma, opt.repeat_remediation);
      terms.push_back(log_lr(scratch, lambdas, shape, t_o, t_o));
    } else {
      terms.push_back(log_lr(counts, lambdas, shape, t_o, t_o));
    }
  }
  if (remediated != nullptr) *remediated = modified_total;
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) {
    throw OverflowError("log_mlr: likelihood ratio left the finite domain");
  }
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - m);
  return m + std::log(acc) - std::log(static_cast<double>(bank.size()));
}

/// Least-squares slope weights for m equally spaced points: centered index
/// over its squared norm, so sum(w * y) is the fitted slope of y.
inline std::vector<double> slope_weights(int m) {
  if (m < 2) throw DataError("slope_weights: need at least two points");
  const double mean = (static_cast<double>(m) + 1.0) / 2.0;
  const double n = static_cast<double>(m);
  const double denom = (n * n * n - n) / 12.0;  // sum of squared deviations
  std::vector<double> w(static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i) {
    w[static_cast<std::size_t>(i - 1)] = (static_cast<double>(i) - mean) / denom;
  }
  return w;
}

/// Alarm score: fitted slope of the scan statistic over the trailing
/// slope_window + 1 days, or 0 until that many values exist. The statistic
/// is tracked in log space, so each value is exponentiated first, capped at
/// exp(r_cap_log) to keep the score finite; score_on_log skips the
/// exponentiation.
inline double algorithm_score(std::span<const double> log_r_history,
                              int slope_window, double r_cap_log = 700.0,
                              bool score_on_log = false,
                              bool* saturated = nullptr) {
  if (slope_window < 1) {
    throw DataError("algorithm_score: slope window must be >= 1");
  }
  if (saturated != nullptr) *saturated = false;
  const std::size_t m = static_cast<std::size_t>(slope_window) + 1;
  if (log_r_history.size() < m) return 0.0;
  const std::vector<double> w = slope_weights(static_cast<int>(m));
  const std::size_t off = log_r_history.size() - m;
  // The weights sum to zero, so the slope is unchanged by shifting every
  // value by a constant. Anchoring at the window's first value makes a flat
  // stretch score exactly zero; without it, a plateau of magnitude exp(v)
  // leaves rounding residue of order exp(v)*1e-16, which can dwarf any
  // calibrated threshold.
  double anchor = 0.0;
  double score = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double v = log_r_history[off + i];
    if (!score_on_log) {
      if (v > r_cap_log) {
        v = r_cap_log;
        if (saturated != nullptr) *saturated = true;
      }
      v = std::exp(v);
    }
    if (i == 0) anchor = v;
    score += w[i] * (v - anchor);
  }
  return score;
}

struct DetectorConfig {
  BaselineModel baseline;
  ProfileBank bank;
  int slope_window = 10;   // days in the score regression, minus one
  int min_window = 10;     // scan window reaches back at least this far
  double gamma = 23.0;
  bool remediation_enabled = true;
  bool repeat_remediation = false;
  double r_cap_log = 700.0;
  bool score_on_log_r = false;

  void validate() const {
    if (bank.size() < 1) throw EmptyBank("DetectorConfig: empty profile bank");
    if (slope_window < 1) throw DataError("DetectorConfig: slope_window must be >= 1");
    if (min_window < 1) throw DataError("DetectorConfig: min_window must be >= 1");
    if (!(gamma > 0.0)) throw DataError("DetectorConfig: gamma must be positive");
    if (!(r_cap_log > 0.0)) throw DataError("DetectorConfig: r_cap_log must be positive");
    if (baseline.beta.size() != static_cast<std::size_t>(baseline.spec.column_count())) {
      throw DataError("DetectorConfig: baseline coefficients do not match its design");
    }
  }
};

/// One day's scan output.
struct ScanResult {
  int day = 0;
  double log_r = 0.0;              // max over candidate starts, log domain
  int t_star = 1;                  // earliest maximizing start
  double score = 0.0;              // slope-based alarm score
  std::map<int, double> per_start; // log mixture ratio per candidate start
  int remediated = 0;              // values replaced across starts and shapes
  bool saturated = false;          // statistic hit the exp cap in the score
};

/// Sequential scan over candidate outbreak starts. Each day extends the
/// window back to the earlier of yesterday's best start and min_window days,
/// never past day 1, and scores the slope of the resulting statistic.
///
/// During a sustained outbreak the best start stays put, so the candidate
/// windows grow with t and recomputing every ratio from scratch is quadratic
/// per day. Each (start, shape) pair therefore keeps running state: the raw
/// day-term sum plus a correction for the current worst-residual day, which
/// is exactly what one remediation pass would replace. The raw sum
/// accumulates in day order, so days without a replacement reproduce the
/// from-scratch ratio bit for bit. Repeat-mode remediation can replace
/// several days and falls back to full recomputation.
class Detector {
 public:
  explicit Detector(DetectorConfig config) : config_(std::move(config)) {
    config_.validate();
  }

  const DetectorConfig& config() const { return config_; }
  int day() const { return t_; }
  int t_star() const { return t_star_; }
  const std::vector<double>& log_r_history() const { return log_r_; }
  const std::vector<double>& score_history() const { return scores_; }
  const std::vector<double>& lambda_history() const { return lambdas_; }
  const std::vector<std::int64_t>& count_history() const { return counts_; }

  /// Feeds one day. Days must arrive consecutively starting at t = 1.
  ScanResult step(std::int64_t count, const CalendarDay& cal) {
    if (cal.t != t_ + 1) {
      throw OutOfOrderDay("Detector: expected day " + std::to_string(t_ + 1) +
                          ", got " + std::to_string(cal.t));
    }
    if (count < 0) throw DataError("Detector: negative count");
    const double lambda = config_.baseline.lambda_at(cal);
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw NonpositiveLambda("Detector: baseline mean must be positive on day " +
                              std::to_string(cal.t));
    }
    t_ = cal.t;
    counts_.push_back(count);
    lambdas_.push_back(lambda);

    ScanResult result;
    result.day = t_;
    const int lo = std::max(1, std::min(t_star_, t_ - config_.min_window));
    const int hi = t_ - 1;
    if (hi >= lo) {
      if (config_.remediation_enabled && config_.repeat_remediation) {
        scan_fresh(lo, hi, result);
      } else {
        scan_incremental(lo, result);
      }
    } else {
      // Day 1 has no candidate start yet; the ratio is trivially 1.
      result.log_r = 0.0;
      result.t_star = t_star_;
    }
    t_star_ = result.t_star;
    log_r_.push_back(result.log_r);
    result.score =
        algorithm_score(log_r_, config_.slope_window, config_.r_cap_log,
                        config_.score_on_log_r, &result.saturated);
    scores_.push_back(result.score);
    return result;
  }

 private:
  struct ShapeState {
    double l_raw = 0.0;  // per-day terms summed in day order
    double worst_r = -std::numeric_limits<double>::infinity();
    double correction = 0.0;  // swaps the worst day's term for its replacement
  };

  struct StartState {
    int t_o = 1;
    std::vector<ShapeState> shapes;
  };

  void accumulate_day(StartState& st, int d) {
    const std::size_t i = static_cast<std::size_t>(d - 1);
    const double o = static_cast<double>(counts_[i]);
    const double lam = lambdas_[i];
    for (int j = 0; j < config_.bank.size(); ++j) {
      const double dlt = delta(config_.bank.shape(j), d, st.t_o);
      ShapeState& sh = st.shapes[static_cast<std::size_t>(j)];
      const double term = -dlt + o * std::log1p(dlt / lam);
      sh.l_raw += term;
      const double mean = lam + dlt;
      const double r = (o - mean) / std::sqrt(mean);
      if (r > sh.worst_r) {  // strict: ties resolve to the earliest day
        sh.worst_r = r;
        const double repl = static_cast<double>(std::llround(mean));
        sh.correction = (-dlt + repl * std::log1p(dlt / lam)) - term;
      }
    }
  }

  void scan_incremental(int lo, ScanResult& result) {
    const int n = config_.bank.size();
    for (StartState& st : states_) accumulate_day(st, t_);
    StartState opened;
    opened.t_o = t_ - 1;
    opened.shapes.assign(static_cast<std::size_t>(n), ShapeState{});
    accumulate_day(opened, t_ - 1);
    accumulate_day(opened, t_);
    states_.push_back(std::move(opened));
    // The reach-back bound never decreases, so starts leave the window at
    // the front and never come back.
    while (!states_.empty() && states_.front().t_o < lo) states_.pop_front();

    const double log_n = std::log(static_cast<double>(n));
    double best = -std::numeric_limits<double>::infinity();
    int best_start = t_star_;
    l_buf_.resize(static_cast<std::size_t>(n));
    for (const StartState& st : states_) {
      double m = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        const ShapeState& sh = st.shapes[static_cast<std::size_t>(j)];
        const bool fix = config_.remediation_enabled && sh.worst_r > config_.gamma;
        const double l = fix ? sh.l_raw + sh.correction : sh.l_raw;
        if (fix) ++result.remediated;
        l_buf_[static_cast<std::size_t>(j)] = l;
        if (l > m) m = l;
      }
      if (!std::isfinite(m)) {
        throw OverflowError("scan: likelihood ratio left the finite domain");
      }
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += std::exp(l_buf_[static_cast<std::size_t>(j)] - m);
      const double s = m + std::log(acc) - log_n;
      result.per_start.emplace(st.t_o, s);
      if (s > best) {  // strict: ties resolve to the earliest start
        best = s;
        best_start = st.t_o;
      }
    }
    result.log_r = best;
    result.t_star = best_start;
  }

  void scan_fresh(int lo, int hi, ScanResult& result) {
    const MlrOptions opt{config_.remediation_enabled, config_.gamma,
                         config_.repeat_remediation};
    double best = -std::numeric_limits<double>::infinity();
    int best_start = t_star_;
    for (int t_o = lo; t_o <= hi; ++t_o) {
      const std::size_t offset = static_cast<std::size_t>(t_o - 1);
      const std::size_t len = static_cast<std::size_t>(t_ - t_o + 1);
      int modified = 0;
      const double s = log_mlr(
          std::span<const std::int64_t>(counts_).subspan(offset, len),
          std::span<const double>(lambdas_).subspan(offset, len),
          config_.bank, t_o, opt, &modified);
      result.per_start.emplace(t_o, s);
      result.remediated += modified;
      if (s > best) {  // strict: ties resolve to the earliest start
        best = s;
        best_start = t_o;
      }
    }
    result.log_r = best;
    result.t_star = best_start;
  }

  DetectorConfig config_;
  int t_ = 0;
  int t_star_ = 1;
  std::vector<std::int64_t> counts_;
  std::vector<double> lambdas_;
  std::vector<double> log_r_;
  std::vector<double> scores_;
  std::deque<StartState> states_;
  std::vector<double> l_buf_;
};

}  // namespace mlrss
