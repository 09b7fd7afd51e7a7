#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include <mlrss/nelder_mead.hpp>

using namespace mlrss;

TEST_CASE("a one dimensional quadratic is minimized", "[nelder_mead]") {
  const NelderMeadResult r = nelder_mead(
      [](const std::vector<double>& x) { return (x[0] - 3.0) * (x[0] - 3.0); },
      {10.0});
  CHECK(r.converged);
  CHECK(r.x[0] == Catch::Approx(3.0).margin(1e-4));
  CHECK(r.value < 1e-8);
}

TEST_CASE("anisotropic quadratics pull every coordinate home", "[nelder_mead]") {
  auto f = [](const std::vector<double>& x) {
    return 100.0 * (x[0] - 1.0) * (x[0] - 1.0) +
           0.5 * (x[1] + 4.0) * (x[1] + 4.0) +
           7.0 * (x[2] - 0.25) * (x[2] - 0.25);
  };
  const NelderMeadResult r = nelder_mead(f, {5.0, 5.0, 5.0});
  CHECK(r.converged);
  CHECK(r.x[0] == Catch::Approx(1.0).margin(1e-3));
  CHECK(r.x[1] == Catch::Approx(-4.0).margin(1e-3));
  CHECK(r.x[2] == Catch::Approx(0.25).margin(1e-3));
}

TEST_CASE("the banana valley is followed to its floor", "[nelder_mead]") {
  auto rosenbrock = [](const std::vector<double>& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 2000;
  const NelderMeadResult r = nelder_mead(rosenbrock, {-1.2, 1.0}, opt);
  CHECK(r.value < 1e-5);
  CHECK(r.x[0] == Catch::Approx(1.0).margin(0.01));
  CHECK(r.x[1] == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("non-finite regions repel the simplex", "[nelder_mead]") {
  auto f = [](const std::vector<double>& x) {
    if (x[0] < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (x[0] - 2.0) * (x[0] - 2.0);
  };
  const NelderMeadResult r = nelder_mead(f, {5.0});
  CHECK(r.converged);
  CHECK(r.x[0] == Catch::Approx(2.0).margin(1e-4));
}

TEST_CASE("the evaluation budget is honored", "[nelder_mead]") {
  auto f = [](const std::vector<double>& x) {
    return x[0] * x[0] + x[1] * x[1];
  };
  NelderMeadOptions opt;
  opt.max_evaluations = 10;
  const NelderMeadResult r = nelder_mead(f, {100.0, 100.0}, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 14);  // one final in-flight step may run past 10
}
