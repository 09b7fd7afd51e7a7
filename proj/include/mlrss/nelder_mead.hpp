#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace mlrss {

struct NelderMeadOptions {
  double diameter_tol = 1e-6;  // relative infinity-norm simplex diameter
  int max_evaluations = 2000;
  double initial_step = 0.25;  // per-coordinate, scaled by max(|x0_i|, 1)
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimizer (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). Non-finite objective values are treated as +inf, so the
/// search backs away from invalid regions on its own.
template <typename F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0,
                             const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  NelderMeadResult res;

  auto safe_f = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += opt.initial_step * std::max(std::abs(x0[i]), 1.0);
  }
  for (std::size_t i = 0; i <= n; ++i) fv[i] = safe_f(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  while (res.evaluations < opt.max_evaluations) {
    sort_order();
    const auto& best = simplex[order[0]];
    const auto& worst = simplex[order[n]];

    double diameter = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(best[j]));
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        diameter = std::max(diameter, std::abs(simplex[order[i]][j] - best[j]));
      }
    }
    if (diameter / scale < opt.diameter_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[i]][j];
    }
    for (double& v : centroid) v /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) {
        x[j] = centroid[j] + coef * (centroid[j] - worst[j]);
      }
      return x;
    };

    std::vector<double> reflected = blend(1.0);
    const double fr = safe_f(reflected);

    if (fr < fv[order[0]]) {
      std::vector<double> expanded = blend(2.0);
      const double fe = safe_f(expanded);
      if (fe < fr) {
        simplex[order[n]] = std::move(expanded);
        fv[order[n]] = fe;
      } else {
        simplex[order[n]] = std::move(reflected);
        fv[order[n]] = fr;
      }
      continue;
    }
    if (fr < fv[order[n - 1]]) {
      simplex[order[n]] = std::move(reflected);
      fv[order[n]] = fr;
      continue;
    }

    const bool outside = fr < fv[order[n]];
    std::vector<double> contracted = blend(outside ? 0.5 : -0.5);
    const double fc = safe_f(contracted);
    if ((outside && fc <= fr) || (!outside && fc < fv[order[n]])) {
      simplex[order[n]] = std::move(contracted);
      fv[order[n]] = fc;
      continue;
    }

    // Shrink toward the best vertex.
    for (std::size_t i = 1; i <= n; ++i) {
      auto& x = simplex[order[i]];
      for (std::size_t j = 0; j < n; ++j) {
        x[j] = simplex[order[0]][j] + 0.5 * (x[j] - simplex[order[0]][j]);
      }
      fv[order[i]] = safe_f(x);
    }
  }

  sort_order();
  res.x = simplex[order[0]];
  res.value = fv[order[0]];
  return res;
}

}  // namespace mlrss
