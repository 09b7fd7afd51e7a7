#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlrss/baseline.hpp"
#include "mlrss/config.hpp"
#include "mlrss/detector.hpp"
#include "mlrss/errors.hpp"
#include "mlrss/evaluation.hpp"
#include "mlrss/ewma.hpp"
#include "mlrss/io.hpp"
#include "mlrss/profile_fit.hpp"
#include "mlrss/simulator.hpp"

namespace mlrss {

// ---- simulation ------------------------------------------------------------

/// Outbreak onsets for an n-outbreak study: the first starts on day 60 and
/// the rest follow at equal spacing, leaving 30 days of tail room.
inline std::pair<int, int> outbreak_layout(int days, int n) {
  const int spacing = n > 0 ? (days - 60 - 30) / n : 0;
  if (n > 0 && spacing < 1) {
    throw DataError("simulate: " + std::to_string(days) +
                    " days is too short for " + std::to_string(n) + " outbreaks");
  }
  return {60, spacing};
}

struct SimPaths {
  std::string counts;
  std::string truth;      // empty: not written
  std::string outbreaks;  // empty: not written
};

/// Draws one series of `days` daily counts with n jittered copies of the
/// configured center shape, and writes counts plus optional truth files.
/// Jitter draws use their own stream so the count noise depends only on the
/// seed, not on how many outbreaks are planted.
inline SimResult run_simulate(const Config& cfg, std::uint64_t seed, int days,
                              int n_outbreaks, const SimPaths& paths,
                              std::ostream& log) {
  SimConfig sim;
  sim.beta_true = default_true_beta(cfg.design);
  sim.spec = cfg.design;
  sim.epoch = cfg.epoch;
  sim.start = cfg.start;
  sim.horizon_days = days;
  sim.seed = seed;
  if (n_outbreaks > 0) {
    const auto [first_start, spacing] = outbreak_layout(days, n_outbreaks);
    Rng jitter_rng(seed + 500009);
    sim.outbreaks = make_jittered_outbreaks(cfg.center_shape, n_outbreaks,
                                            first_start, spacing, jitter_rng,
                                            cfg.jitter);
  }
  SimResult result = simulate(sim);
  if (!paths.counts.empty()) write_counts_csv(paths.counts, result.series);
  if (!paths.truth.empty()) write_truth_csv(paths.truth, sim.start, result.truth);
  if (!paths.outbreaks.empty()) {
    write_outbreaks_csv(paths.outbreaks, result.truth.outbreaks);
  }
  log << "simulated " << days << " days, " << n_outbreaks << " outbreaks, seed "
      << seed << "\n";
  return result;
}

// ---- baseline fitting ------------------------------------------------------

inline BaselineFit run_fit_baseline(const CountSeries& series, const Config& cfg,
                                    std::ostream& log) {
  BaselineFit fit = fit_baseline(series, cfg.design, cfg.epoch);
  log << "baseline fit: " << series.size() << " days, deviance "
      << format_double(fit.model.fit_deviance) << ", " << fit.iterations
      << " iterations, " << (fit.model.converged ? "converged" : "NOT converged")
      << "\n";
  return fit;
}

// ---- profile fitting -------------------------------------------------------

/// Cuts signatures out of a series along labeled outbreak windows, using the
/// fitted model for the baseline column.
inline std::vector<OutbreakSignature> signatures_from_records(
    const CountSeries& series, const BaselineModel& model,
    const std::vector<TruthOutbreak>& records, int margin = 2) {
  const std::vector<CalendarDay> days =
      series.days(model.epoch, model.spec.period_days);
  std::vector<OutbreakSignature> sigs;
  sigs.reserve(records.size());
  for (const TruthOutbreak& ob : records) {
    const int lo = std::max(1, ob.effective_start - margin);
    const int hi = std::min(static_cast<int>(series.size()), ob.effective_end + margin);
    if (hi < lo) {
      throw DataError("signature window for outbreak " + std::to_string(ob.index) +
                      " lies outside the series");
    }
    OutbreakSignature sig;
    sig.start = ob.t_o;
    sig.first_day = lo;
    sig.truncated = ob.truncated;
    for (int t = lo; t <= hi; ++t) {
      sig.counts.push_back(series.at(t));
      sig.baseline.push_back(model.lambda_at(days[static_cast<std::size_t>(t - 1)]));
    }
    sigs.push_back(std::move(sig));
  }
  return sigs;
}

inline BankBuildResult run_fit_profiles(
    const std::vector<OutbreakSignature>& signatures, ProfileFamily family,
    const Config& cfg, std::ostream& log) {
  ProfileFitOptions opt;
  opt.literal_bimodal = cfg.literal_bimodal;
  BankBuildResult result = build_bank(signatures, family, opt);
  log << "profile bank: " << result.bank.size() << " shapes ("
      << family_name(family) << ")";
  if (result.failed > 0) log << ", " << result.failed << " fits failed";
  log << "\n";
  return result;
}

// ---- detection -------------------------------------------------------------

/// Runs one detector over a series and collects per-day rows. source must be
/// "mlrss" (bank required) or "ewma".
inline ScoresFile run_detect(const CountSeries& series, const BaselineModel& model,
                             const ProfileBank* bank, const Config& cfg,
                             const std::string& source, std::ostream& log) {
  const std::vector<CalendarDay> days =
      series.days(model.epoch, model.spec.period_days);
  ScoresFile out;
  out.source = source;
  out.rows.reserve(static_cast<std::size_t>(series.size()));
  if (source == "mlrss") {
    if (bank == nullptr) throw DataError("detect: mlrss needs a profile bank");
    DetectorConfig dc{model, *bank,       cfg.slope_window,
                      cfg.min_window,     cfg.gamma,
                      cfg.remediation,    cfg.repeat_remediation,
                      cfg.r_cap_log,      cfg.score_on_log_r};
    Detector detector(dc);
    for (int t = 1; t <= series.size(); ++t) {
      const ScanResult r =
          detector.step(series.at(t), days[static_cast<std::size_t>(t - 1)]);
      ScoreRow row;
      row.date = series.date_at(t);
      row.log_r = r.log_r;
      row.t_star = r.t_star;
      row.score = r.score;
      row.remediated = r.remediated;
      out.rows.push_back(row);
    }
  } else if (source == "ewma") {
    EwmaDetector detector(cfg.phi);
    for (int t = 1; t <= series.size(); ++t) {
      ScoreRow row;
      row.date = series.date_at(t);
      row.score = detector.step(
          series.at(t), model.lambda_at(days[static_cast<std::size_t>(t - 1)]));
      out.rows.push_back(row);
    }
  } else {
    throw DataError("detect: unknown source '" + source + "'");
  }
  log << source << ": scored " << out.rows.size() << " days\n";
  return out;
}

inline std::vector<double> scores_of(const ScoresFile& file) {
  std::vector<double> s;
  s.reserve(file.rows.size());
  for (const ScoreRow& row : file.rows) s.push_back(row.score);
  return s;
}

// ---- evaluation ------------------------------------------------------------

/// "a,b,c" as explicit thresholds, or "lo:hi:n" for n evenly spaced ones.
inline std::vector<double> parse_threshold_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      throw DataError("threshold grid: expected lo:hi:n, got '" + text + "'");
    }
    const double lo = parse_double(text.substr(0, c1), "threshold grid");
    const double hi = parse_double(text.substr(c1 + 1, c2 - c1 - 1), "threshold grid");
    const long long n = parse_long(text.substr(c2 + 1), "threshold grid");
    if (n < 2 || hi <= lo) {
      throw DataError("threshold grid: need hi > lo and n >= 2");
    }
    for (long long i = 0; i < n; ++i) {
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1));
    }
    return grid;
  }
  for (const std::string& piece : detail::split_csv(text)) {
    grid.push_back(parse_double(piece, "threshold grid"));
  }
  if (grid.empty()) throw DataError("threshold grid: empty");
  return grid;
}

/// 25 thresholds evenly spaced over the observed score range.
inline std::vector<double> default_threshold_grid(std::span<const double> scores) {
  if (scores.empty()) throw DataError("threshold grid: no scores");
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> grid;
  for (int i = 0; i < 25; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 24.0);
  }
  return grid;
}

inline SimTruth truth_from_files(const TruthSeries& ts,
                                 const std::vector<TruthOutbreak>& outbreaks) {
  SimTruth truth;
  truth.lambda = ts.lambda;
  truth.delta = ts.delta;
  truth.outbreaks = outbreaks;
  return truth;
}

inline void append_run_summary(std::ostream& os, const std::string& source,
                               const RunEval& run) {
  os << "== " << source << " ==\n";
  os << "threshold " << format_double(run.threshold) << "\n";
  os << "outbreaks " << run.outbreaks.size() << "\n";
  os << "detected " << run.detected << " of " << run.outbreaks.size()
     << " (by peak " << run.detected_by_peak << ")\n";
  os << "mean delay over detections "
     << (run.detected > 0 ? format_double(run.mean_finite_delay) : "n/a") << "\n";
  os << "penalized mean delay "
     << (run.outbreaks.empty() ? "n/a" : format_double(run.penalized_mean_delay))
     << "\n";
  os << "false alarm days " << run.false_alarm_days << " of "
     << run.eligible_days << " eligible ("
     << (run.eligible_days > 0 ? format_double(run.fa_per_100_days) : "n/a")
     << " per 100 days)\n";
}

inline void append_grid_table(std::ostream& os, const std::vector<RunEval>& grid) {
  os << "threshold,fa_rate,penalized_mean_delay,mean_finite_delay,detected,missed\n";
  for (const RunEval& p : grid) {
    os << format_double(p.threshold) << ',' << format_double(p.fa_per_100_days)
       << ',' << format_double(p.penalized_mean_delay) << ','
       << format_double(p.mean_finite_delay) << ',' << p.detected << ','
       << p.missed << "\n";
  }
}

// ---- demo ------------------------------------------------------------------

/// Null-calibrated alarm budget for the demo and the detection study: at
/// most this many alarm days over an outbreak-free detection stretch.
inline constexpr int kNullAlarmBudget = 7;

/// End-to-end run on synthetic data: simulate training, bank, evaluation,
/// and outbreak-free stretches; fit the baseline and the bank; score both
/// detectors; calibrate thresholds on the null stretch; evaluate and write
/// every artifact under out_dir. Everything derives from cfg.seed, so two
/// runs with one seed write identical bytes.
inline void run_demo(const Config& cfg, const std::string& out_dir,
                     std::ostream& log) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto at = [&](const std::string& name) { return out_dir + "/" + name; };

  log << "demo: preset " << cfg.preset << ", seed " << cfg.seed << "\n";

  const std::uint64_t train_seed = cfg.seed * 1000 + 1;
  const std::uint64_t bank_seed = cfg.seed * 1000 + 2;
  const std::uint64_t eval_seed = cfg.seed * 1000 + 3;
  const std::uint64_t null_seed = cfg.seed * 1000 + 4;

  const SimResult train = run_simulate(
      cfg, train_seed, cfg.train_days, 0, SimPaths{at("train.csv"), "", ""}, log);
  const BaselineFit fit = run_fit_baseline(train.series, cfg, log);
  write_baseline_model(at("model.txt"), fit.model);

  // Bank training outbreaks sit 80 days apart so their windows never touch.
  const int bank_days = 60 + 80 * cfg.bank_size + 40;
  SimConfig bank_sim;
  bank_sim.beta_true = default_true_beta(cfg.design);
  bank_sim.spec = cfg.design;
  bank_sim.epoch = cfg.epoch;
  bank_sim.start = cfg.start;
  bank_sim.horizon_days = bank_days;
  bank_sim.seed = bank_seed;
  {
    Rng jitter_rng(bank_seed + 500009);
    bank_sim.outbreaks = make_jittered_outbreaks(cfg.center_shape, cfg.bank_size,
                                                 60, 80, jitter_rng, cfg.jitter);
  }
  const SimResult bank_data = simulate(bank_sim);
  write_counts_csv(at("bank_train.csv"), bank_data.series);
  write_outbreaks_csv(at("bank_train_outbreaks.csv"), bank_data.truth.outbreaks);
  log << "simulated " << bank_days << " days, " << cfg.bank_size
      << " outbreaks, seed " << bank_seed << "\n";

  const std::vector<OutbreakSignature> sigs = signatures_from_records(
      bank_data.series, fit.model, bank_data.truth.outbreaks);
  const BankBuildResult bank =
      run_fit_profiles(sigs, cfg.center_shape.family, cfg, log);
  write_bank(at("bank.txt"), bank.bank);

  const SimResult eval_data = run_simulate(
      cfg, eval_seed, cfg.horizon_days, cfg.eval_outbreaks,
      SimPaths{at("eval.csv"), at("eval_truth.csv"), at("eval_outbreaks.csv")},
      log);
  const SimResult null_data = run_simulate(
      cfg, null_seed, cfg.horizon_days, 0, SimPaths{at("null.csv"), "", ""}, log);

  detail::FileWriter report(at("report.txt"));
  report.stream() << "detection study: preset " << cfg.preset << ", seed "
                  << cfg.seed << "\n\n";

  for (const std::string source : {std::string("mlrss"), std::string("ewma")}) {
    const ProfileBank* bank_ptr = source == "mlrss" ? &bank.bank : nullptr;
    const ScoresFile eval_scores =
        run_detect(eval_data.series, fit.model, bank_ptr, cfg, source, log);
    write_scores_csv(at("scores_" + source + ".csv"), eval_scores);
    const ScoresFile null_scores =
        run_detect(null_data.series, fit.model, bank_ptr, cfg, source, log);

    const double threshold =
        calibrate_threshold(scores_of(null_scores), kNullAlarmBudget);
    const std::vector<double> scores = scores_of(eval_scores);
    const RunEval run = evaluate(scores, eval_data.truth, threshold);
    const std::vector<RunEval> grid =
        amoc_points(scores, eval_data.truth, default_threshold_grid(scores));
    write_amoc_csv(at("amoc_" + source + ".csv"), grid);

    append_run_summary(report.stream(), source, run);
    report.stream() << "\n";
    append_grid_table(report.stream(), grid);
    report.stream() << "\n";
    log << source << ": threshold " << format_double(threshold) << ", detected "
        << run.detected << "/" << run.outbreaks.size() << ", false alarms "
        << run.false_alarm_days << "\n";
  }
  report.close();
  log << "artifacts in " << out_dir << "\n";
}

}  // namespace mlrss
