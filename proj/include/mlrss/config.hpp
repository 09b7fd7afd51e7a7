#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlrss/date.hpp"
#include "mlrss/design.hpp"
#include "mlrss/errors.hpp"
#include "mlrss/profiles.hpp"

namespace mlrss {

/// Everything the command-line pipelines need to know, with defaults chosen
/// so a bare run produces a sensible emergency-department-style study.
struct Config {
  std::uint64_t seed = 1;
  std::string preset = "ED";

  // data generation
  Date epoch = default_epoch();
  Date start = default_epoch();
  int train_days = 1095;    // baseline fitting stretch
  int horizon_days = 730;   // detection stretch
  DesignSpec design = DesignSpec::contest();
  int bank_size = 30;       // training outbreaks, one bank entry each
  int eval_outbreaks = 6;   // labeled outbreaks in the detection stretch
  double jitter = 0.25;
  ProfileShape center_shape = ProfileShape::lognormal(30.0, std::log(7.0), 0.5);

  // detector
  std::string detector = "ewma";  // "mlrss", "ewma", or "both"
  int slope_window = 7;
  int min_window = 10;
  double gamma = 23.0;
  bool remediation = true;
  bool repeat_remediation = false;
  double r_cap_log = 700.0;
  bool score_on_log_r = false;
  bool literal_bimodal = false;
  double phi = 0.25;

  // evaluation
  double threshold = 0.0;
  std::vector<double> threshold_grid;

  void validate() const {
    design.validate();
    if (train_days < 1) throw DataError("config: train_days must be >= 1");
    if (horizon_days < 1) throw DataError("config: horizon_days must be >= 1");
    if (bank_size < 1) throw DataError("config: bank_size must be >= 1");
    if (eval_outbreaks < 0) throw DataError("config: eval_outbreaks must be >= 0");
    if (slope_window < 1) throw DataError("config: slope_window must be >= 1");
    if (min_window < 1) throw DataError("config: min_window must be >= 1");
    if (!(gamma > 0)) throw DataError("config: gamma must be positive");
    if (!(phi > 0 && phi <= 1)) throw DataError("config: phi must be in (0, 1]");
    if (detector != "mlrss" && detector != "ewma" && detector != "both") {
      throw DataError("config: detector must be mlrss, ewma, or both");
    }
  }
};

/// Named defaults matching the three surveillance settings the method was
/// tuned for: emergency department visits (sharp lognormal bursts, short
/// score window), over-the-counter sales (broad symmetric bumps), and
/// thermometer sales (two-wave outbreaks).
inline void apply_preset(Config& config, const std::string& name) {
  if (name == "ED") {
    config.preset = name;
    config.slope_window = 7;
    config.detector = "ewma";
    config.center_shape = ProfileShape::lognormal(30.0, std::log(7.0), 0.5);
  } else if (name == "OTC") {
    config.preset = name;
    config.slope_window = 12;
    config.detector = "mlrss";
    config.center_shape = ProfileShape::gaussian(40.0, 8.0, 18.0);
  } else if (name == "TH") {
    config.preset = name;
    config.slope_window = 10;
    config.detector = "mlrss";
    config.center_shape = ProfileShape::bimodal(30.0, 6.0, 13.0, 10.0);
  } else {
    throw DataError("unknown preset '" + name + "' (have ED, OTC, TH)");
  }
}

namespace detail {

inline ProfileShape shape_from_json(const nlohmann::json& j) {
  const ProfileFamily family = family_from_name(j.at("family").get<std::string>());
  const double c = j.at("c").get<double>();
  const double sigma = j.at("sigma").get<double>();
  switch (family) {
    case ProfileFamily::LogNormalKernel:
      return ProfileShape::lognormal(c, j.at("mu").get<double>(), sigma);
    case ProfileFamily::GaussianKernel:
      return ProfileShape::gaussian(c, j.at("mu").get<double>(), sigma);
    case ProfileFamily::BimodalGaussian:
    default:
      return ProfileShape::bimodal(c, j.at("mu1").get<double>(),
                                   j.at("mu2").get<double>(), sigma,
                                   j.value("literal", false));
  }
}

}  // namespace detail

/// Reads a JSON config. A "preset" key applies first so explicit keys win.
inline Config config_from_json(const nlohmann::json& j) {
  Config c;
  try {
    if (j.contains("preset")) apply_preset(c, j.at("preset").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("epoch")) c.epoch = Date::from_iso(j.at("epoch").get<std::string>());
    if (j.contains("start")) c.start = Date::from_iso(j.at("start").get<std::string>());
    if (j.contains("train_days")) c.train_days = j.at("train_days").get<int>();
    if (j.contains("horizon_days")) c.horizon_days = j.at("horizon_days").get<int>();
    if (j.contains("bank_size")) c.bank_size = j.at("bank_size").get<int>();
    if (j.contains("eval_outbreaks")) c.eval_outbreaks = j.at("eval_outbreaks").get<int>();
    if (j.contains("jitter")) c.jitter = j.at("jitter").get<double>();
    if (j.contains("outbreak")) c.center_shape = detail::shape_from_json(j.at("outbreak"));
    if (j.contains("detector")) c.detector = j.at("detector").get<std::string>();
    if (j.contains("slope_window")) c.slope_window = j.at("slope_window").get<int>();
    if (j.contains("min_window")) c.min_window = j.at("min_window").get<int>();
    if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
    if (j.contains("remediation")) c.remediation = j.at("remediation").get<bool>();
    if (j.contains("repeat_remediation")) {
      c.repeat_remediation = j.at("repeat_remediation").get<bool>();
    }
    if (j.contains("r_cap_log")) c.r_cap_log = j.at("r_cap_log").get<double>();
    if (j.contains("score_on_log_r")) c.score_on_log_r = j.at("score_on_log_r").get<bool>();
    if (j.contains("literal_bimodal")) c.literal_bimodal = j.at("literal_bimodal").get<bool>();
    if (j.contains("phi")) c.phi = j.at("phi").get<double>();
    if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
    if (j.contains("threshold_grid")) {
      c.threshold_grid = j.at("threshold_grid").get<std::vector<double>>();
    }
    if (j.contains("design")) {
      const nlohmann::json& d = j.at("design");
      if (d.contains("harmonics")) {
        c.design.harmonic_frequencies = d.at("harmonics").get<std::vector<int>>();
      }
      if (d.contains("interactions")) {
        c.design.interaction_frequencies = d.at("interactions").get<std::vector<int>>();
      }
      if (d.contains("intercept")) c.design.include_intercept = d.at("intercept").get<bool>();
      if (d.contains("period")) c.design.period_days = d.at("period").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace mlrss
