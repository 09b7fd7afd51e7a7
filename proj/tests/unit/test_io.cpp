#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <mlrss/errors.hpp>
#include <mlrss/io.hpp>

using namespace mlrss;

namespace {

std::string scratch_path(const std::string& name) {
  static const std::filesystem::path dir = [] {
    std::filesystem::path p =
        std::filesystem::temp_directory_path() / "mlrss_io_tests";
    std::filesystem::create_directories(p);
    return p;
  }();
  return (dir / name).string();
}

void write_raw(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

}  // namespace

TEST_CASE("doubles survive a text round trip unchanged", "[io]") {
  const double values[] = {0.0,
                           -0.0,
                           0.1,
                           1.0 / 3.0,
                           1e-300,
                           6.02214076e23,
                           -123456.789,
                           std::numeric_limits<double>::denorm_min(),
                           std::numeric_limits<double>::max()};
  for (double v : values) {
    const double back = parse_double(format_double(v), "test");
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isnan(parse_double("nan", "test")));
  CHECK(std::isinf(parse_double("-inf", "test")));
}

TEST_CASE("number parsing rejects malformed text", "[io]") {
  CHECK_THROWS_AS(parse_double("abc", "test"), DataError);
  CHECK_THROWS_AS(parse_double("1.5x", "test"), DataError);
  CHECK_THROWS_AS(parse_double("", "test"), DataError);
  CHECK_THROWS_AS(parse_long("1.5", "test"), DataError);
  CHECK_THROWS_AS(parse_long("ten", "test"), DataError);
}

TEST_CASE("count files round trip", "[io]") {
  const std::string path = scratch_path("counts.csv");
  const CountSeries series(Date::from_ymd(2014, 3, 1), {5, 0, 12, 7});
  write_counts_csv(path, series);
  const CountSeries back = read_counts_csv(path);
  CHECK(back.counts() == series.counts());
  CHECK(back.date_at(1).iso() == "2014-03-01");
  CHECK(back.date_at(4).iso() == "2014-03-04");
}

TEST_CASE("count files must advance one day per row", "[io]") {
  const std::string path = scratch_path("counts_gap.csv");
  write_raw(path,
            "date,count\n2014-03-01,5\n2014-03-02,6\n2014-03-04,7\n");
  CHECK_THROWS_AS(read_counts_csv(path), OutOfOrderDay);

  const std::string bad_header = scratch_path("counts_header.csv");
  write_raw(bad_header, "day,count\n2014-03-01,5\n");
  CHECK_THROWS_AS(read_counts_csv(bad_header), DataError);

  const std::string empty = scratch_path("counts_empty.csv");
  write_raw(empty, "date,count\n");
  CHECK_THROWS_AS(read_counts_csv(empty), DataError);
}

TEST_CASE("count files tolerate CRLF and trailing blank lines", "[io]") {
  const std::string path = scratch_path("counts_crlf.csv");
  write_raw(path, "date,count\r\n2014-03-01,5\r\n2014-03-02,6\r\n\r\n");
  const CountSeries back = read_counts_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back.at(2) == 6);
}

TEST_CASE("truth files round trip with full precision", "[io]") {
  const std::string path = scratch_path("truth.csv");
  SimTruth truth;
  truth.lambda = {20.125, 1.0 / 3.0, 55.5};
  truth.delta = {0.0, 2.7182818284590452, 1e-12};
  write_truth_csv(path, Date::from_ymd(2015, 6, 1), truth);
  const TruthSeries back = read_truth_csv(path);
  CHECK(back.start.iso() == "2015-06-01");
  CHECK(back.lambda == truth.lambda);
  CHECK(back.delta == truth.delta);
}

TEST_CASE("outbreak records round trip across families", "[io]") {
  const std::string path = scratch_path("outbreaks.csv");
  std::vector<TruthOutbreak> obs(3);
  obs[0].index = 0;
  obs[0].shape = ProfileShape::lognormal(30.5, std::log(7.0), 0.5);
  obs[0].t_o = 60;
  obs[0].effective_start = 62;
  obs[0].effective_end = 81;
  obs[0].peak_day = 66;
  obs[0].peak = 30.25;
  obs[1].index = 1;
  obs[1].shape = ProfileShape::gaussian(40.0, 8.0, 18.0);
  obs[1].t_o = 140;
  obs[1].truncated = true;
  obs[2].index = 2;
  obs[2].shape = ProfileShape::bimodal(30.0, 6.0, 13.0, 10.0, true);
  obs[2].t_o = 220;
  write_outbreaks_csv(path, obs);
  const std::vector<TruthOutbreak> back = read_outbreaks_csv(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].index == obs[i].index);
    CHECK(back[i].shape.family == obs[i].shape.family);
    CHECK(back[i].shape.c == obs[i].shape.c);
    CHECK(back[i].shape.mu1 == obs[i].shape.mu1);
    CHECK(back[i].shape.mu2 == obs[i].shape.mu2);
    CHECK(back[i].shape.sigma == obs[i].shape.sigma);
    CHECK(back[i].shape.literal_bimodal == obs[i].shape.literal_bimodal);
    CHECK(back[i].t_o == obs[i].t_o);
    CHECK(back[i].effective_start == obs[i].effective_start);
    CHECK(back[i].effective_end == obs[i].effective_end);
    CHECK(back[i].peak_day == obs[i].peak_day);
    CHECK(back[i].peak == obs[i].peak);
    CHECK(back[i].truncated == obs[i].truncated);
  }
}

TEST_CASE("scan score files round trip", "[io]") {
  const std::string path = scratch_path("scores_mlrss.csv");
  ScoresFile file;
  file.source = "mlrss";
  for (int i = 0; i < 5; ++i) {
    ScoreRow row;
    row.date = Date::from_ymd(2016, 1, 1).plus_days(i);
    row.log_r = 0.5 * i;
    row.t_star = 1 + i / 2;
    row.score = -0.125 + 0.25 * i;
    row.remediated = i == 3 ? 2 : 0;
    file.rows.push_back(row);
  }
  write_scores_csv(path, file);
  const ScoresFile back = read_scores_csv(path);
  CHECK(back.source == "mlrss");
  REQUIRE(back.rows.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(back.rows[i].date.serial() == file.rows[i].date.serial());
    CHECK(back.rows[i].log_r == file.rows[i].log_r);
    CHECK(back.rows[i].t_star == file.rows[i].t_star);
    CHECK(back.rows[i].score == file.rows[i].score);
    CHECK(back.rows[i].remediated == file.rows[i].remediated);
  }
}

TEST_CASE("reference detector rows leave scan-only columns blank", "[io]") {
  const std::string path = scratch_path("scores_ewma.csv");
  ScoresFile file;
  file.source = "ewma";
  ScoreRow row;
  row.date = Date::from_ymd(2016, 1, 1);
  row.score = 1.25;
  row.log_r = 99.0;     // must not be written for this source
  row.t_star = 42;
  row.remediated = 7;
  file.rows.push_back(row);
  write_scores_csv(path, file);

  const std::vector<std::string> lines = detail::read_lines(path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "2016-01-01,ewma,,,1.25,");

  const ScoresFile back = read_scores_csv(path);
  CHECK(back.source == "ewma");
  CHECK(std::isnan(back.rows[0].log_r));
  CHECK(back.rows[0].t_star == 0);
  CHECK(back.rows[0].score == 1.25);
  CHECK(back.rows[0].remediated == 0);
}

TEST_CASE("score files reject mixed sources and date gaps", "[io]") {
  const std::string mixed = scratch_path("scores_mixed.csv");
  write_raw(mixed,
            "date,source,log_r,t_star,score,remediated\n"
            "2016-01-01,mlrss,0,1,0,0\n"
            "2016-01-02,ewma,,,0,\n");
  CHECK_THROWS_AS(read_scores_csv(mixed), DataError);

  const std::string gap = scratch_path("scores_gap.csv");
  write_raw(gap,
            "date,source,log_r,t_star,score,remediated\n"
            "2016-01-01,mlrss,0,1,0,0\n"
            "2016-01-03,mlrss,0,1,0,0\n");
  CHECK_THROWS_AS(read_scores_csv(gap), OutOfOrderDay);
}

TEST_CASE("baseline model files round trip", "[io]") {
  const std::string path = scratch_path("model.txt");
  BaselineModel model;
  model.spec = DesignSpec::contest();
  model.epoch = Date::from_ymd(2014, 1, 6);
  model.converged = true;
  model.fit_deviance = 1234.5678901234;
  model.beta.assign(16, 0.0);
  for (int i = 0; i < 16; ++i) model.beta[static_cast<std::size_t>(i)] = 0.01 * i - 0.05;
  model.beta[0] = std::log(50.0);
  write_baseline_model(path, model);
  const BaselineModel back = read_baseline_model(path);
  CHECK(back.spec.harmonic_frequencies == model.spec.harmonic_frequencies);
  CHECK(back.spec.interaction_frequencies == model.spec.interaction_frequencies);
  CHECK(back.spec.include_intercept == model.spec.include_intercept);
  CHECK(back.spec.period_days == model.spec.period_days);
  CHECK(back.epoch.serial() == model.epoch.serial());
  CHECK(back.converged == model.converged);
  CHECK(back.fit_deviance == model.fit_deviance);
  CHECK(back.beta == model.beta);
}

TEST_CASE("baseline model files are validated on read", "[io]") {
  const std::string wrong_count = scratch_path("model_short.txt");
  write_raw(wrong_count,
            "mlrss-baseline v1\nperiod 365.25\nepoch 2014-01-06\nintercept 1\n"
            "harmonics 1\ninteractions\nconverged 1\ndeviance 0\n"
            "coef intercept 3.9\n");
  CHECK_THROWS_AS(read_baseline_model(wrong_count), DataError);

  const std::string junk = scratch_path("model_junk.txt");
  write_raw(junk, "mlrss-baseline v1\nwibble 3\n");
  CHECK_THROWS_AS(read_baseline_model(junk), DataError);

  const std::string not_model = scratch_path("model_header.txt");
  write_raw(not_model, "something else\n");
  CHECK_THROWS_AS(read_baseline_model(not_model), DataError);
}

TEST_CASE("profile bank files round trip", "[io]") {
  const std::string path = scratch_path("bank.txt");
  const ProfileBank bank({ProfileShape::gaussian(40.0, 8.0, 18.0),
                          ProfileShape::gaussian(31.25, 7.5, 22.0),
                          ProfileShape::gaussian(52.0, 9.0, 14.5)});
  write_bank(path, bank);
  const ProfileBank back = read_bank(path);
  REQUIRE(back.size() == 3);
  CHECK(back.family() == ProfileFamily::GaussianKernel);
  for (int j = 0; j < 3; ++j) {
    CHECK(back.shape(j).c == bank.shape(j).c);
    CHECK(back.shape(j).mu1 == bank.shape(j).mu1);
    CHECK(back.shape(j).sigma == bank.shape(j).sigma);
  }
}

TEST_CASE("profile bank files are validated on read", "[io]") {
  const std::string count_off = scratch_path("bank_count.txt");
  write_raw(count_off,
            "mlrss-bank v1\nfamily gaussian\nn 2\ntheta 1 1 1 1 0\n");
  CHECK_THROWS_AS(read_bank(count_off), DataError);

  const std::string no_family = scratch_path("bank_nofamily.txt");
  write_raw(no_family, "mlrss-bank v1\nn 1\ntheta 1 1 1 1 0\n");
  CHECK_THROWS_AS(read_bank(no_family), DataError);
}

TEST_CASE("operating characteristic files are sorted by alarm rate", "[io]") {
  const std::string path = scratch_path("amoc.csv");
  std::vector<RunEval> points(4);
  points[0].fa_per_100_days = 5.0;
  points[0].penalized_mean_delay = 1.0;
  points[1].fa_per_100_days = std::numeric_limits<double>::quiet_NaN();
  points[1].penalized_mean_delay = 9.0;
  points[2].fa_per_100_days = 1.0;
  points[2].penalized_mean_delay = 4.0;
  points[3].fa_per_100_days = 3.0;
  points[3].penalized_mean_delay = 2.0;
  write_amoc_csv(path, points);
  const std::vector<std::string> lines = detail::read_lines(path);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "fa_rate,mean_delay");
  CHECK(lines[1] == "1,4");
  CHECK(lines[2] == "3,2");
  CHECK(lines[3] == "5,1");
  CHECK(lines[4] == "nan,9");
}
