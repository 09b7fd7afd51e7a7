#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlrss/errors.hpp"

namespace mlrss {

enum class ProfileFamily {
  LogNormalKernel,   // c * exp(-(log u - mu)^2 / sigma)
  GaussianKernel,    // c * exp(-(u - mu)^2 / sigma)
  BimodalGaussian,   // c * [exp(-(u - mu1)^2/sigma) + exp(-(u - mu2)^2/sigma)]
};

inline std::string family_name(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::LogNormalKernel: return "lognormal";
    case ProfileFamily::GaussianKernel: return "gaussian";
    case ProfileFamily::BimodalGaussian: return "bimodal";
  }
  return "?";
}

inline ProfileFamily family_from_name(const std::string& name) {
  if (name == "lognormal") return ProfileFamily::LogNormalKernel;
  if (name == "gaussian") return ProfileFamily::GaussianKernel;
  if (name == "bimodal") return ProfileFamily::BimodalGaussian;
  throw DataError("unknown profile family '" + name + "'");
}

/// Parametric excess-mean curve. `u` below is days into the outbreak,
/// u = t - t_o + 1 >= 1. For the unimodal families mu2 mirrors mu1 and is
/// ignored. `literal_bimodal` selects the single-exponential two-center
/// variant c*exp(-[(u-mu1)^2+(u-mu2)^2]/sigma) instead of the default
/// two-component sum.
struct ProfileShape {
  ProfileFamily family = ProfileFamily::GaussianKernel;
  double c = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;
  double sigma = 1.0;
  bool literal_bimodal = false;

  static ProfileShape lognormal(double c, double mu, double sigma) {
    return validated({ProfileFamily::LogNormalKernel, c, mu, mu, sigma, false});
  }

  static ProfileShape gaussian(double c, double mu, double sigma) {
    return validated({ProfileFamily::GaussianKernel, c, mu, mu, sigma, false});
  }

  static ProfileShape bimodal(double c, double mu1, double mu2, double sigma,
                              bool literal_form = false) {
    if (mu1 > mu2) std::swap(mu1, mu2);
    return validated(
        {ProfileFamily::BimodalGaussian, c, mu1, mu2, sigma, literal_form});
  }

  int parameter_count() const {
    return family == ProfileFamily::BimodalGaussian ? 4 : 3;
  }

 private:
  static ProfileShape validated(ProfileShape s) {
    if (!(s.c > 0)) throw DataError("profile: c must be > 0");
    if (!(s.sigma > 0)) throw DataError("profile: sigma must be > 0");
    return s;
  }
};

/// Excess mean at `u` days into the outbreak (continuous in u >= 1).
inline double delta_at(const ProfileShape& s, double u) {
  switch (s.family) {
    case ProfileFamily::LogNormalKernel: {
      const double d = std::log(u) - s.mu1;
      return s.c * std::exp(-d * d / s.sigma);
    }
    case ProfileFamily::GaussianKernel: {
      const double d = u - s.mu1;
      return s.c * std::exp(-d * d / s.sigma);
    }
    case ProfileFamily::BimodalGaussian: {
      const double d1 = u - s.mu1;
      const double d2 = u - s.mu2;
      if (s.literal_bimodal) {
        return s.c * std::exp(-(d1 * d1 + d2 * d2) / s.sigma);
      }
      return s.c * (std::exp(-d1 * d1 / s.sigma) + std::exp(-d2 * d2 / s.sigma));
    }
  }
  return 0.0;
}

/// Excess mean on day `t` for an outbreak starting at `t_o`; zero before the
/// start by definition.
inline double delta(const ProfileShape& s, int t, int t_o) {
  if (t < t_o) return 0.0;
  return delta_at(s, static_cast<double>(t - t_o + 1));
}

/// Observed counts and baseline means over one labeled outbreak window.
/// `first_day` anchors counts[0] on the series day axis; `start` is t_o.
struct OutbreakSignature {
  std::vector<std::int64_t> counts;
  std::vector<double> baseline;
  int start = 1;      // t_o
  int first_day = 1;  // series day of counts[0]
  bool truncated = false;

  void validate() const {
    if (counts.size() != baseline.size()) {
      throw DataError("signature: counts and baseline lengths differ");
    }
    for (double b : baseline) {
      if (!(b > 0)) throw DataError("signature: baseline must be positive");
    }
  }
};

/// Discrete-uniform set of fitted shapes, all from one family. Mixing weight
/// is 1/size() each.
class ProfileBank {
 public:
  ProfileBank() = default;

  explicit ProfileBank(std::vector<ProfileShape> shapes)
      : shapes_(std::move(shapes)) {
    if (shapes_.empty()) throw EmptyBank("profile bank has no shapes");
    for (const ProfileShape& s : shapes_) {
      if (s.family != shapes_.front().family) {
        throw DataError("profile bank mixes families");
      }
    }
  }

  ProfileFamily family() const { return shapes_.front().family; }
  int size() const { return static_cast<int>(shapes_.size()); }
  const std::vector<ProfileShape>& shapes() const { return shapes_; }
  const ProfileShape& shape(int j) const {
    return shapes_[static_cast<std::size_t>(j)];
  }

 private:
  std::vector<ProfileShape> shapes_;
};

}  // namespace mlrss
