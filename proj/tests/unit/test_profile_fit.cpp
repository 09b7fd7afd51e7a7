#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include <mlrss/errors.hpp>
#include <mlrss/profile_fit.hpp>
#include <mlrss/profiles.hpp>

using namespace mlrss;

namespace {

// Rounded counts from a flat baseline plus one outbreak, no sampling noise.
OutbreakSignature make_signature(const ProfileShape& shape, double lambda,
                                 int first_day, int start, int width) {
  OutbreakSignature sig;
  sig.first_day = first_day;
  sig.start = start;
  for (int i = 0; i < width; ++i) {
    const double mean = lambda + delta(shape, first_day + i, start);
    sig.counts.push_back(std::llround(mean));
    sig.baseline.push_back(lambda);
  }
  return sig;
}

double curve_rmse(const ProfileShape& a, const ProfileShape& b, int width) {
  double ss = 0.0;
  for (int u = 1; u <= width; ++u) {
    const double d = delta_at(a, u) - delta_at(b, u);
    ss += d * d;
  }
  return std::sqrt(ss / width);
}

}  // namespace

TEST_CASE("noiseless gaussian signature is recovered", "[profile_fit]") {
  const ProfileShape truth = ProfileShape::gaussian(40.0, 7.0, 8.0);
  const OutbreakSignature sig = make_signature(truth, 20.0, 5, 5, 14);
  const FittedProfile fit = fit_theta(sig, ProfileFamily::GaussianKernel);
  CHECK(curve_rmse(fit.shape, truth, 14) < 0.05 * truth.c);
  CHECK(fit.log_likelihood >=
        signature_log_likelihood(sig, truth) - 1e-6);
}

TEST_CASE("noiseless lognormal signature is recovered", "[profile_fit]") {
  const ProfileShape truth = ProfileShape::lognormal(30.0, std::log(7.0), 0.5);
  const OutbreakSignature sig = make_signature(truth, 20.0, 40, 40, 26);
  const FittedProfile fit = fit_theta(sig, ProfileFamily::LogNormalKernel);
  CHECK(curve_rmse(fit.shape, truth, 26) < 0.05 * truth.c);
  CHECK(fit.log_likelihood >=
        signature_log_likelihood(sig, truth) - 1e-6);
}

TEST_CASE("bimodal fit dominates the generating parameters", "[profile_fit]") {
  const ProfileShape truth = ProfileShape::bimodal(30.0, 6.0, 13.0, 10.0);
  const OutbreakSignature sig = make_signature(truth, 20.0, 1, 1, 20);
  const FittedProfile fit = fit_theta(sig, ProfileFamily::BimodalGaussian);
  CHECK(fit.shape.family == ProfileFamily::BimodalGaussian);
  CHECK(fit.log_likelihood >=
        signature_log_likelihood(sig, truth) - 1e-6);
  CHECK(fit.shape.mu1 <= fit.shape.mu2);
}

TEST_CASE("excess-free window fits down to the baseline likelihood",
          "[profile_fit]") {
  OutbreakSignature sig;
  sig.first_day = 1;
  sig.start = 1;
  for (int i = 0; i < 12; ++i) {
    sig.counts.push_back(20);
    sig.baseline.push_back(20.0);
  }
  double base_ll = 0.0;
  for (std::int64_t o : sig.counts) {
    const double od = static_cast<double>(o);
    base_ll += od * std::log(20.0) - 20.0 - std::lgamma(od + 1.0);
  }
  const FittedProfile fit = fit_theta(sig, ProfileFamily::GaussianKernel);
  // Any positive excess hurts when counts sit exactly on the baseline, so the
  // optimum is the c -> 0 boundary.
  CHECK(fit.log_likelihood <= base_ll + 1e-12);
  CHECK(fit.log_likelihood >= base_ll - 0.05);
}

TEST_CASE("fit depends only on window-relative day offsets", "[profile_fit]") {
  const ProfileShape truth = ProfileShape::gaussian(25.0, 6.0, 5.0);
  const OutbreakSignature near = make_signature(truth, 15.0, 3, 3, 12);
  OutbreakSignature far = near;
  far.first_day += 4000;
  far.start += 4000;
  const FittedProfile a = fit_theta(near, ProfileFamily::GaussianKernel);
  const FittedProfile b = fit_theta(far, ProfileFamily::GaussianKernel);
  CHECK(a.shape.c == b.shape.c);
  CHECK(a.shape.mu1 == b.shape.mu1);
  CHECK(a.shape.sigma == b.shape.sigma);
  CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("window preconditions are enforced", "[profile_fit]") {
  const ProfileShape truth = ProfileShape::gaussian(25.0, 6.0, 5.0);
  CHECK_THROWS_AS(fit_theta(make_signature(truth, 15.0, 1, 1, 3),
                            ProfileFamily::GaussianKernel),
                  DataError);
  // Window [1, 12] ends before the labeled start day.
  CHECK_THROWS_AS(fit_theta(make_signature(truth, 15.0, 1, 30, 12),
                            ProfileFamily::GaussianKernel),
                  DataError);
  OutbreakSignature bad = make_signature(truth, 15.0, 1, 1, 12);
  bad.baseline[4] = 0.0;
  CHECK_THROWS_AS(fit_theta(bad, ProfileFamily::GaussianKernel), DataError);
}

TEST_CASE("bank building drops only the failing signatures", "[profile_fit]") {
  const ProfileShape truth = ProfileShape::gaussian(30.0, 5.0, 6.0);
  std::vector<OutbreakSignature> sigs;
  for (int k = 0; k < 8; ++k) {
    sigs.push_back(make_signature(truth, 18.0, 1 + 20 * k, 1 + 20 * k, 12));
  }
  sigs.push_back(make_signature(truth, 18.0, 1, 1, 3));  // too short to fit
  const BankBuildResult r = build_bank(sigs, ProfileFamily::GaussianKernel);
  CHECK(r.bank.size() == 8);
  CHECK(r.failed == 1);

  std::vector<OutbreakSignature> all_bad(3, make_signature(truth, 18.0, 1, 1, 3));
  CHECK_THROWS_AS(build_bank(all_bad, ProfileFamily::GaussianKernel), EmptyBank);
  CHECK_THROWS_AS(build_bank({}, ProfileFamily::GaussianKernel), DataError);
}
