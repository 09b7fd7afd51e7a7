#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mlrss/baseline.hpp"
#include "mlrss/date.hpp"
#include "mlrss/errors.hpp"
#include "mlrss/evaluation.hpp"
#include "mlrss/profiles.hpp"
#include "mlrss/series.hpp"
#include "mlrss/simulator.hpp"

namespace mlrss {

/// Shortest decimal form that parses back to the same double. Keeps output
/// files byte-stable across platforms, which printf-style formatting is not.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const std::from_chars_result r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw DataError(context + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

inline long long parse_long(std::string_view s, const std::string& context) {
  long long v = 0;
  const std::from_chars_result r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw DataError(context + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

inline std::vector<std::string> split_space(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) fields.push_back(tok);
  return fields;
}

// Binary mode so every platform emits plain LF.
class FileWriter {
 public:
  explicit FileWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot write " + path);
  }
  ~FileWriter() { close(); }
  FileWriter(const FileWriter&) = delete;
  FileWriter& operator=(const FileWriter&) = delete;

  std::ostream& stream() { return out_; }

  void close() {
    if (out_.is_open()) {
      out_.close();
      if (out_.fail()) throw DataError("write failed for " + path_);
    }
  }

 private:
  std::string path_;
  std::ofstream out_;
};

inline void require_fields(const std::vector<std::string>& fields,
                           std::size_t n, const std::string& path,
                           std::size_t line_no) {
  if (fields.size() != n) {
    throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(n) + " fields, got " +
                    std::to_string(fields.size()));
  }
}

}  // namespace detail

// ---- daily counts ----------------------------------------------------------

inline void write_counts_csv(const std::string& path, const CountSeries& series) {
  detail::FileWriter w(path);
  w.stream() << "date,count\n";
  for (int t = 1; t <= series.size(); ++t) {
    w.stream() << series.date_at(t).iso() << ',' << series.at(t) << '\n';
  }
  w.close();
}

inline CountSeries read_counts_csv(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != "date,count") {
    throw DataError(path + ": expected header 'date,count'");
  }
  if (lines.size() < 2) throw DataError(path + ": no data rows");
  Date start = Date::from_serial(0);
  std::vector<std::int64_t> counts;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = detail::split_csv(lines[i]);
    detail::require_fields(f, 2, path, i + 1);
    const Date d = Date::from_iso(f[0]);
    if (i == 1) {
      start = d;
    } else if (d.serial() != start.serial() + static_cast<int>(i) - 1) {
      throw OutOfOrderDay(path + ":" + std::to_string(i + 1) +
                          ": dates must advance one day per row");
    }
    counts.push_back(parse_long(f[1], path));
  }
  return CountSeries(start, std::move(counts));
}

// ---- per-day truth ---------------------------------------------------------

struct TruthSeries {
  Date start = default_epoch();
  std::vector<double> lambda;
  std::vector<double> delta;
};

inline void write_truth_csv(const std::string& path, const Date& start,
                            const SimTruth& truth) {
  detail::FileWriter w(path);
  w.stream() << "date,lambda,delta\n";
  for (std::size_t i = 0; i < truth.lambda.size(); ++i) {
    w.stream() << start.plus_days(static_cast<int>(i)).iso() << ','
               << format_double(truth.lambda[i]) << ','
               << format_double(truth.delta[i]) << '\n';
  }
  w.close();
}

inline TruthSeries read_truth_csv(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != "date,lambda,delta") {
    throw DataError(path + ": expected header 'date,lambda,delta'");
  }
  TruthSeries out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = detail::split_csv(lines[i]);
    detail::require_fields(f, 3, path, i + 1);
    const Date d = Date::from_iso(f[0]);
    if (i == 1) {
      out.start = d;
    } else if (d.serial() != out.start.serial() + static_cast<int>(i) - 1) {
      throw OutOfOrderDay(path + ":" + std::to_string(i + 1) +
                          ": dates must advance one day per row");
    }
    out.lambda.push_back(parse_double(f[1], path));
    out.delta.push_back(parse_double(f[2], path));
  }
  if (out.lambda.empty()) throw DataError(path + ": no data rows");
  return out;
}

// ---- outbreak records ------------------------------------------------------

inline const char* kOutbreaksHeader =
    "index,family,t_o,effective_start,effective_end,peak_day,peak,truncated,"
    "c,mu1,mu2,sigma,literal";

inline void write_outbreaks_csv(const std::string& path,
                                const std::vector<TruthOutbreak>& outbreaks) {
  detail::FileWriter w(path);
  w.stream() << kOutbreaksHeader << '\n';
  for (const TruthOutbreak& ob : outbreaks) {
    w.stream() << ob.index << ',' << family_name(ob.shape.family) << ','
               << ob.t_o << ',' << ob.effective_start << ','
               << ob.effective_end << ',' << ob.peak_day << ','
               << format_double(ob.peak) << ',' << (ob.truncated ? 1 : 0)
               << ',' << format_double(ob.shape.c) << ','
               << format_double(ob.shape.mu1) << ','
               << format_double(ob.shape.mu2) << ','
               << format_double(ob.shape.sigma) << ','
               << (ob.shape.literal_bimodal ? 1 : 0) << '\n';
  }
  w.close();
}

inline std::vector<TruthOutbreak> read_outbreaks_csv(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != kOutbreaksHeader) {
    throw DataError(path + ": unexpected outbreak file header");
  }
  std::vector<TruthOutbreak> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = detail::split_csv(lines[i]);
    detail::require_fields(f, 13, path, i + 1);
    TruthOutbreak ob;
    ob.index = static_cast<int>(parse_long(f[0], path));
    const ProfileFamily family = family_from_name(f[1]);
    ob.t_o = static_cast<int>(parse_long(f[2], path));
    ob.effective_start = static_cast<int>(parse_long(f[3], path));
    ob.effective_end = static_cast<int>(parse_long(f[4], path));
    ob.peak_day = static_cast<int>(parse_long(f[5], path));
    ob.peak = parse_double(f[6], path);
    ob.truncated = parse_long(f[7], path) != 0;
    const double c = parse_double(f[8], path);
    const double mu1 = parse_double(f[9], path);
    const double mu2 = parse_double(f[10], path);
    const double sigma = parse_double(f[11], path);
    const bool literal = parse_long(f[12], path) != 0;
    switch (family) {
      case ProfileFamily::LogNormalKernel:
        ob.shape = ProfileShape::lognormal(c, mu1, sigma);
        break;
      case ProfileFamily::GaussianKernel:
        ob.shape = ProfileShape::gaussian(c, mu1, sigma);
        break;
      case ProfileFamily::BimodalGaussian:
        ob.shape = ProfileShape::bimodal(c, mu1, mu2, sigma, literal);
        break;
    }
    out.push_back(ob);
  }
  return out;
}

// ---- detector scores -------------------------------------------------------

struct ScoreRow {
  Date date = default_epoch();
  double log_r = std::numeric_limits<double>::quiet_NaN();
  int t_star = 0;
  double score = 0.0;
  int remediated = 0;
};

struct ScoresFile {
  std::string source;  // "mlrss" or "ewma"
  std::vector<ScoreRow> rows;
};

inline void write_scores_csv(const std::string& path, const ScoresFile& file) {
  detail::FileWriter w(path);
  w.stream() << "date,source,log_r,t_star,score,remediated\n";
  const bool full = file.source == "mlrss";
  for (const ScoreRow& row : file.rows) {
    w.stream() << row.date.iso() << ',' << file.source << ',';
    if (full) {
      w.stream() << format_double(row.log_r) << ',' << row.t_star << ','
                 << format_double(row.score) << ',' << row.remediated;
    } else {
      w.stream() << ",," << format_double(row.score) << ',';
    }
    w.stream() << '\n';
  }
  w.close();
}

inline ScoresFile read_scores_csv(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != "date,source,log_r,t_star,score,remediated") {
    throw DataError(path + ": unexpected scores file header");
  }
  if (lines.size() < 2) throw DataError(path + ": no data rows");
  ScoresFile out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = detail::split_csv(lines[i]);
    detail::require_fields(f, 6, path, i + 1);
    ScoreRow row;
    row.date = Date::from_iso(f[0]);
    if (i == 1) {
      out.source = f[1];
    } else if (f[1] != out.source) {
      throw DataError(path + ":" + std::to_string(i + 1) + ": mixed sources");
    }
    if (i >= 2 &&
        row.date.serial() != out.rows.front().date.serial() + static_cast<int>(i) - 1) {
      throw OutOfOrderDay(path + ":" + std::to_string(i + 1) +
                          ": dates must advance one day per row");
    }
    if (!f[2].empty()) row.log_r = parse_double(f[2], path);
    if (!f[3].empty()) row.t_star = static_cast<int>(parse_long(f[3], path));
    row.score = parse_double(f[4], path);
    if (!f[5].empty()) row.remediated = static_cast<int>(parse_long(f[5], path));
    out.rows.push_back(row);
  }
  return out;
}

// ---- fitted baseline model -------------------------------------------------

inline void write_baseline_model(const std::string& path,
                                 const BaselineModel& model) {
  detail::FileWriter w(path);
  std::ostream& os = w.stream();
  os << "mlrss-baseline v1\n";
  os << "period " << format_double(model.spec.period_days) << '\n';
  os << "epoch " << model.epoch.iso() << '\n';
  os << "intercept " << (model.spec.include_intercept ? 1 : 0) << '\n';
  os << "harmonics";
  for (int k : model.spec.harmonic_frequencies) os << ' ' << k;
  os << '\n';
  os << "interactions";
  for (int k : model.spec.interaction_frequencies) os << ' ' << k;
  os << '\n';
  os << "converged " << (model.converged ? 1 : 0) << '\n';
  os << "deviance " << format_double(model.fit_deviance) << '\n';
  const std::vector<std::string> names = model.spec.column_names();
  for (std::size_t i = 0; i < model.beta.size(); ++i) {
    os << "coef " << names[i] << ' ' << format_double(model.beta[i]) << '\n';
  }
  w.close();
}

inline BaselineModel read_baseline_model(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != "mlrss-baseline v1") {
    throw DataError(path + ": not a baseline model file");
  }
  BaselineModel model;
  model.spec.harmonic_frequencies.clear();
  model.spec.interaction_frequencies.clear();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = detail::split_space(lines[i]);
    if (f.empty()) continue;
    const std::string& key = f[0];
    if (key == "period" && f.size() == 2) {
      model.spec.period_days = parse_double(f[1], path);
    } else if (key == "epoch" && f.size() == 2) {
      model.epoch = Date::from_iso(f[1]);
    } else if (key == "intercept" && f.size() == 2) {
      model.spec.include_intercept = parse_long(f[1], path) != 0;
    } else if (key == "harmonics") {
      for (std::size_t j = 1; j < f.size(); ++j) {
        model.spec.harmonic_frequencies.push_back(
            static_cast<int>(parse_long(f[j], path)));
      }
    } else if (key == "interactions") {
      for (std::size_t j = 1; j < f.size(); ++j) {
        model.spec.interaction_frequencies.push_back(
            static_cast<int>(parse_long(f[j], path)));
      }
    } else if (key == "converged" && f.size() == 2) {
      model.converged = parse_long(f[1], path) != 0;
    } else if (key == "deviance" && f.size() == 2) {
      model.fit_deviance = parse_double(f[1], path);
    } else if (key == "coef" && f.size() == 3) {
      model.beta.push_back(parse_double(f[2], path));
    } else {
      throw DataError(path + ":" + std::to_string(i + 1) +
                      ": unrecognized line '" + lines[i] + "'");
    }
  }
  model.spec.validate();
  if (model.beta.size() != static_cast<std::size_t>(model.spec.column_count())) {
    throw DataError(path + ": coefficient count does not match the design");
  }
  return model;
}

// ---- fitted profile bank ---------------------------------------------------

inline void write_bank(const std::string& path, const ProfileBank& bank) {
  detail::FileWriter w(path);
  std::ostream& os = w.stream();
  os << "mlrss-bank v1\n";
  os << "family " << family_name(bank.family()) << '\n';
  os << "n " << bank.size() << '\n';
  for (const ProfileShape& s : bank.shapes()) {
    os << "theta " << format_double(s.c) << ' ' << format_double(s.mu1) << ' '
       << format_double(s.mu2) << ' ' << format_double(s.sigma) << ' '
       << (s.literal_bimodal ? 1 : 0) << '\n';
  }
  w.close();
}

inline ProfileBank read_bank(const std::string& path) {
  const std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty() || lines[0] != "mlrss-bank v1") {
    throw DataError(path + ": not a profile bank file");
  }
  ProfileFamily family = ProfileFamily::LogNormalKernel;
  bool have_family = false;
  std::size_t declared_n = 0;
  std::vector<ProfileShape> shapes;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> f = detail::split_space(lines[i]);
    if (f.empty()) continue;
    if (f[0] == "family" && f.size() == 2) {
      family = family_from_name(f[1]);
      have_family = true;
    } else if (f[0] == "n" && f.size() == 2) {
      declared_n = static_cast<std::size_t>(parse_long(f[1], path));
    } else if (f[0] == "theta" && f.size() == 6) {
      if (!have_family) throw DataError(path + ": theta before family");
      const double c = parse_double(f[1], path);
      const double mu1 = parse_double(f[2], path);
      const double mu2 = parse_double(f[3], path);
      const double sigma = parse_double(f[4], path);
      const bool literal = parse_long(f[5], path) != 0;
      switch (family) {
        case ProfileFamily::LogNormalKernel:
          shapes.push_back(ProfileShape::lognormal(c, mu1, sigma));
          break;
        case ProfileFamily::GaussianKernel:
          shapes.push_back(ProfileShape::gaussian(c, mu1, sigma));
          break;
        case ProfileFamily::BimodalGaussian:
          shapes.push_back(ProfileShape::bimodal(c, mu1, mu2, sigma, literal));
          break;
      }
    } else {
      throw DataError(path + ":" + std::to_string(i + 1) +
                      ": unrecognized line '" + lines[i] + "'");
    }
  }
  if (shapes.size() != declared_n) {
    throw DataError(path + ": declared " + std::to_string(declared_n) +
                    " shapes, found " + std::to_string(shapes.size()));
  }
  return ProfileBank(std::move(shapes));
}

// ---- operating characteristic ----------------------------------------------

/// Plot-ready two-column curve, sorted by false-alarm rate. The delay column
/// charges misses their full effective duration, which keeps the curve
/// weakly decreasing.
inline void write_amoc_csv(const std::string& path,
                           const std::vector<RunEval>& points) {
  std::vector<RunEval> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RunEval& a, const RunEval& b) {
                     if (std::isnan(a.fa_per_100_days)) return false;
                     if (std::isnan(b.fa_per_100_days)) return true;
                     return a.fa_per_100_days < b.fa_per_100_days;
                   });
  detail::FileWriter w(path);
  w.stream() << "fa_rate,mean_delay\n";
  for (const RunEval& p : sorted) {
    w.stream() << format_double(p.fa_per_100_days) << ','
               << format_double(p.penalized_mean_delay) << '\n';
  }
  w.close();
}

}  // namespace mlrss
