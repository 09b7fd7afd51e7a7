#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlrss/calendar.hpp"
#include "mlrss/date.hpp"
#include "mlrss/design.hpp"
#include "mlrss/errors.hpp"
#include "mlrss/series.hpp"

namespace mlrss {

/// Fitted Poisson log-linear baseline: lambda_t = exp(x_t . beta).
struct BaselineModel {
  DesignSpec spec;
  Date epoch = default_epoch();
  std::vector<double> beta;
  double fit_deviance = 0.0;
  bool converged = false;

  double lambda_at(const CalendarDay& day) const {
    return lambda_from_row(build_design_row(day, spec), beta);
  }

  // Plain sequential dot product. predict_lambda and the IRLS loop both go
  // through here so fitted means and predictions agree bit for bit.
  static double lambda_from_row(std::span<const double> row,
                                std::span<const double> coef) {
    double eta = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) eta += row[j] * coef[j];
    return std::exp(eta);
  }
};

struct IrlsOptions {
  double tolerance = 1e-8;  // relative deviance change
  int max_iterations = 100;
};

struct IrlsResult {
  std::vector<double> beta;
  double deviance = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> deviance_history;  // initial value, then one per iterate
};

namespace detail {

// Poisson deviance 2*sum[o*log(o/mu) - (o - mu)], with the o = 0 term read
// as 2*mu.
inline double poisson_deviance(const Eigen::VectorXd& o,
                               const Eigen::VectorXd& mu) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < o.size(); ++i) {
    if (!(mu[i] > 0) || !std::isfinite(mu[i])) {
      return std::numeric_limits<double>::infinity();
    }
    dev += (o[i] > 0) ? 2.0 * (o[i] * std::log(o[i] / mu[i]) - (o[i] - mu[i]))
                      : 2.0 * mu[i];
  }
  return dev;
}

}  // namespace detail

/// Poisson IRLS on an explicit design. Weighted least squares is solved by
/// column-pivoted QR; rank deficiency raises SingularDesign. Steps that would
/// increase the deviance are halved until they do not, so the recorded
/// deviance history is non-increasing.
inline IrlsResult fit_poisson_irls(const std::vector<std::vector<double>>& rows,
                                   const std::vector<std::int64_t>& counts,
                                   int intercept_column = -1,
                                   const IrlsOptions& opt = {}) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (n == 0 || rows.front().empty()) throw DataError("irls: empty design");
  const Eigen::Index p = static_cast<Eigen::Index>(rows.front().size());
  if (static_cast<Eigen::Index>(counts.size()) != n) {
    throw DataError("irls: counts and design have different lengths");
  }

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd o(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    o[i] = static_cast<double>(counts[static_cast<std::size_t>(i)]);
    total += o[i];
  }
  if (total <= 0) {
    throw DegenerateResponse("irls: all counts are zero, MLE does not exist");
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (intercept_column >= 0 && intercept_column < p) {
    beta[intercept_column] = std::log(total / static_cast<double>(n) + 0.5);
  }

  IrlsResult res;
  Eigen::VectorXd eta = X * beta;
  Eigen::VectorXd mu = eta.array().exp();
  double dev = detail::poisson_deviance(o, mu);
  res.deviance_history.push_back(dev);

  for (int iter = 1; iter <= opt.max_iterations; ++iter) {
    // Working response and weights for the log link.
    Eigen::VectorXd w = mu;
    Eigen::VectorXd z = eta + (o - mu).cwiseQuotient(mu);
    Eigen::VectorXd sw = w.cwiseSqrt();

    Eigen::MatrixXd A = sw.asDiagonal() * X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < p) {
      throw SingularDesign("irls: weighted design is rank deficient (rank " +
                           std::to_string(qr.rank()) + " of " +
                           std::to_string(p) + ")");
    }
    Eigen::VectorXd target = qr.solve(sw.cwiseProduct(z));

    // Halve toward the WLS solution until the deviance stops increasing.
    Eigen::VectorXd beta_new;
    double dev_new = 0.0;
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < 40; ++h) {
      beta_new = beta + step * (target - beta);
      eta = X * beta_new;
      mu = eta.array().exp();
      dev_new = detail::poisson_deviance(o, mu);
      if (dev_new <= dev + 1e-10) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent direction left; treat as stalled

    const double rel_change = std::abs(dev - dev_new) / (std::abs(dev_new) + 0.1);
    beta = beta_new;
    dev = dev_new;
    res.deviance_history.push_back(dev);
    res.iterations = iter;
    if (rel_change < opt.tolerance) {
      res.converged = true;
      break;
    }
  }

  res.beta.assign(beta.data(), beta.data() + p);
  res.deviance = dev;
  return res;
}

inline std::vector<double> predict_lambda(const BaselineModel& model,
                                          std::span<const CalendarDay> days) {
  std::vector<double> lambda;
  lambda.reserve(days.size());
  for (const CalendarDay& day : days) {
    const double v = model.lambda_at(day);
    if (!std::isfinite(v) || v <= 0) {
      throw OverflowError("predicted mean is not finite on day t=" +
                          std::to_string(day.t));
    }
    lambda.push_back(v);
  }
  return lambda;
}

struct BaselineFit {
  BaselineModel model;
  int iterations = 0;
  std::vector<double> deviance_history;
  std::vector<double> fitted;  // predict_lambda on the training days
};

/// Fits the baseline on a count series. Requires at least two observations
/// per design column. The returned model's deviance and fitted means are
/// both computed through the prediction path.
inline BaselineFit fit_baseline(const CountSeries& series,
                                const DesignSpec& spec,
                                Date epoch = default_epoch(),
                                const IrlsOptions& opt = {}) {
  spec.validate();
  const int p = spec.column_count();
  if (series.size() < 2 * p) {
    throw DataError("fit_baseline: need at least " + std::to_string(2 * p) +
                    " days for " + std::to_string(p) + " design columns, got " +
                    std::to_string(series.size()));
  }

  const auto days = series.days(epoch, spec.period_days);
  std::vector<std::vector<double>> rows;
  rows.reserve(days.size());
  for (const CalendarDay& day : days) rows.push_back(build_design_row(day, spec));

  const int intercept_column = spec.include_intercept ? 0 : -1;
  IrlsResult irls = fit_poisson_irls(rows, series.counts(), intercept_column, opt);

  BaselineFit fit;
  fit.model.spec = spec;
  fit.model.epoch = epoch;
  fit.model.beta = std::move(irls.beta);
  fit.model.converged = irls.converged;
  fit.iterations = irls.iterations;
  fit.deviance_history = std::move(irls.deviance_history);

  fit.fitted = predict_lambda(fit.model, days);
  Eigen::VectorXd o(series.size()), mu(series.size());
  for (int i = 0; i < series.size(); ++i) {
    o[i] = static_cast<double>(series.counts()[static_cast<std::size_t>(i)]);
    mu[i] = fit.fitted[static_cast<std::size_t>(i)];
  }
  fit.model.fit_deviance = detail::poisson_deviance(o, mu);
  return fit;
}

}  // namespace mlrss
