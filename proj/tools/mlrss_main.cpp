// Command-line front end: simulate, fit, detect, and evaluate from files.

#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mlrss/mlrss.hpp>

namespace {

// Command misuse that CLI11's parser cannot catch on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "JSON config file");
  sub->add_option("--preset", o.preset, "named defaults: ED, OTC, or TH");
  sub->add_option("--seed", o.seed, "random seed");
}

mlrss::Config make_config(CLI::App* sub, const CommonOpts& o) {
  mlrss::Config cfg = o.config_path.empty() ? mlrss::Config{}
                                            : mlrss::load_config(o.config_path);
  if (!o.preset.empty()) mlrss::apply_preset(cfg, o.preset);
  if (sub->count("--seed") > 0) cfg.seed = o.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixture likelihood ratio scan for daily count surveillance"};
  app.set_version_flag("--version", "mlrss 0.1.0");
  app.require_subcommand(1);

  // fit-baseline
  auto* fit_baseline_cmd =
      app.add_subcommand("fit-baseline", "fit the seasonal Poisson baseline");
  CommonOpts fb_common;
  std::string fb_input, fb_output;
  add_common(fit_baseline_cmd, fb_common);
  fit_baseline_cmd->add_option("--input", fb_input, "counts CSV")->required();
  fit_baseline_cmd->add_option("--output", fb_output, "model file to write")
      ->required();

  // fit-profiles
  auto* fit_profiles_cmd = app.add_subcommand(
      "fit-profiles", "fit outbreak profiles over labeled windows");
  CommonOpts fp_common;
  std::string fp_input, fp_model, fp_outbreaks, fp_output, fp_family;
  add_common(fit_profiles_cmd, fp_common);
  fit_profiles_cmd->add_option("--input", fp_input, "counts CSV")->required();
  fit_profiles_cmd->add_option("--model", fp_model, "baseline model file")
      ->required();
  fit_profiles_cmd
      ->add_option("--outbreaks", fp_outbreaks, "labeled outbreak windows CSV")
      ->required();
  fit_profiles_cmd->add_option("--output", fp_output, "bank file to write")
      ->required();
  fit_profiles_cmd->add_option(
      "--family", fp_family, "lognormal, gaussian, or bimodal (default: preset)");

  // simulate
  auto* simulate_cmd =
      app.add_subcommand("simulate", "draw a synthetic daily count series");
  CommonOpts sim_common;
  std::string sim_output, sim_truth, sim_outbreaks;
  int sim_days = 0, sim_count = -1;
  add_common(simulate_cmd, sim_common);
  simulate_cmd->add_option("--output", sim_output, "counts CSV to write")
      ->required();
  simulate_cmd->add_option("--truth", sim_truth, "per-day truth CSV to write");
  simulate_cmd->add_option("--outbreaks", sim_outbreaks,
                           "outbreak records CSV to write");
  simulate_cmd->add_option("--days", sim_days, "series length (default: config)");
  simulate_cmd->add_option("--outbreak-count", sim_count,
                           "planted outbreaks (default: config)");

  // detect
  auto* detect_cmd =
      app.add_subcommand("detect", "score a series day by day");
  CommonOpts det_common;
  std::string det_input, det_model, det_bank, det_output;
  std::string det_source;
  add_common(detect_cmd, det_common);
  detect_cmd->add_option("--input", det_input, "counts CSV")->required();
  detect_cmd->add_option("--model", det_model, "baseline model file")->required();
  detect_cmd->add_option("--bank", det_bank, "profile bank file");
  detect_cmd->add_option("--output", det_output, "scores CSV to write")
      ->required();
  detect_cmd->add_option("--detector", det_source,
                         "mlrss or ewma (default: preset's method)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "score alarms against simulation truth");
  CommonOpts ev_common;
  std::string ev_scores, ev_truth, ev_outbreaks, ev_grid, ev_amoc, ev_report;
  double ev_threshold = 0.0;
  add_common(evaluate_cmd, ev_common);
  evaluate_cmd->add_option("--scores", ev_scores, "scores CSV")->required();
  evaluate_cmd->add_option("--truth", ev_truth, "per-day truth CSV")->required();
  evaluate_cmd->add_option("--outbreaks", ev_outbreaks, "outbreak records CSV")
      ->required();
  evaluate_cmd->add_option("--threshold", ev_threshold, "alarm threshold");
  evaluate_cmd->add_option("--threshold-grid", ev_grid,
                           "a,b,c or lo:hi:n (default: score range)");
  evaluate_cmd->add_option("--amoc", ev_amoc, "operating curve CSV to write");
  evaluate_cmd->add_option("--report", ev_report, "report file to write");

  // demo
  auto* demo_cmd = app.add_subcommand(
      "demo", "full synthetic study: simulate, fit, detect, evaluate");
  CommonOpts demo_common;
  std::string demo_dir = "mlrss_demo";
  add_common(demo_cmd, demo_common);
  demo_cmd->add_option("--output-dir", demo_dir, "artifact directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit_baseline_cmd->parsed()) {
      const mlrss::Config cfg = make_config(fit_baseline_cmd, fb_common);
      const mlrss::CountSeries series = mlrss::read_counts_csv(fb_input);
      const mlrss::BaselineFit fit =
          mlrss::run_fit_baseline(series, cfg, std::cout);
      mlrss::write_baseline_model(fb_output, fit.model);
      std::cout << "wrote " << fb_output << "\n";
    } else if (fit_profiles_cmd->parsed()) {
      const mlrss::Config cfg = make_config(fit_profiles_cmd, fp_common);
      const mlrss::CountSeries series = mlrss::read_counts_csv(fp_input);
      const mlrss::BaselineModel model = mlrss::read_baseline_model(fp_model);
      const std::vector<mlrss::TruthOutbreak> records =
          mlrss::read_outbreaks_csv(fp_outbreaks);
      const mlrss::ProfileFamily family =
          fp_family.empty() ? cfg.center_shape.family
                            : mlrss::family_from_name(fp_family);
      const std::vector<mlrss::OutbreakSignature> sigs =
          mlrss::signatures_from_records(series, model, records);
      const mlrss::BankBuildResult bank =
          mlrss::run_fit_profiles(sigs, family, cfg, std::cout);
      mlrss::write_bank(fp_output, bank.bank);
      std::cout << "wrote " << fp_output << "\n";
    } else if (simulate_cmd->parsed()) {
      const mlrss::Config cfg = make_config(simulate_cmd, sim_common);
      const int days = simulate_cmd->count("--days") > 0 ? sim_days
                                                         : cfg.horizon_days;
      const int n = simulate_cmd->count("--outbreak-count") > 0
                        ? sim_count
                        : cfg.eval_outbreaks;
      mlrss::run_simulate(cfg, cfg.seed, days, n,
                          mlrss::SimPaths{sim_output, sim_truth, sim_outbreaks},
                          std::cout);
      std::cout << "wrote " << sim_output << "\n";
    } else if (detect_cmd->parsed()) {
      const mlrss::Config cfg = make_config(detect_cmd, det_common);
      if (det_source.empty()) {
        // One source per output file; "both" is only meaningful in demo.
        det_source = cfg.detector == "ewma" ? "ewma" : "mlrss";
      }
      if (det_source != "mlrss" && det_source != "ewma") {
        throw UsageError("--detector must be mlrss or ewma");
      }
      if (det_source == "mlrss" && det_bank.empty()) {
        throw UsageError("detect --detector mlrss needs --bank");
      }
      const mlrss::CountSeries series = mlrss::read_counts_csv(det_input);
      const mlrss::BaselineModel model = mlrss::read_baseline_model(det_model);
      mlrss::ProfileBank bank({mlrss::ProfileShape::gaussian(1, 1, 1)});
      if (!det_bank.empty()) bank = mlrss::read_bank(det_bank);
      const mlrss::ScoresFile scores = mlrss::run_detect(
          series, model, det_bank.empty() ? nullptr : &bank, cfg, det_source,
          std::cout);
      mlrss::write_scores_csv(det_output, scores);
      std::cout << "wrote " << det_output << "\n";
    } else if (evaluate_cmd->parsed()) {
      const mlrss::ScoresFile scores_file = mlrss::read_scores_csv(ev_scores);
      const mlrss::TruthSeries truth_series = mlrss::read_truth_csv(ev_truth);
      const std::vector<mlrss::TruthOutbreak> records =
          mlrss::read_outbreaks_csv(ev_outbreaks);
      const mlrss::SimTruth truth =
          mlrss::truth_from_files(truth_series, records);
      const std::vector<double> scores = mlrss::scores_of(scores_file);
      const std::vector<double> grid =
          ev_grid.empty() ? mlrss::default_threshold_grid(scores)
                          : mlrss::parse_threshold_grid(ev_grid);
      const std::vector<mlrss::RunEval> points =
          mlrss::amoc_points(scores, truth, grid);
      if (!ev_amoc.empty()) {
        mlrss::write_amoc_csv(ev_amoc, points);
        std::cout << "wrote " << ev_amoc << "\n";
      }
      const bool have_threshold = evaluate_cmd->count("--threshold") > 0;
      if (!ev_report.empty()) {
        mlrss::detail::FileWriter report(ev_report);
        if (have_threshold) {
          mlrss::append_run_summary(
              report.stream(), scores_file.source,
              mlrss::evaluate(scores, truth, ev_threshold));
          report.stream() << "\n";
        }
        mlrss::append_grid_table(report.stream(), points);
        report.close();
        std::cout << "wrote " << ev_report << "\n";
      }
      if (have_threshold) {
        mlrss::append_run_summary(std::cout, scores_file.source,
                                  mlrss::evaluate(scores, truth, ev_threshold));
      } else if (ev_amoc.empty() && ev_report.empty()) {
        mlrss::append_grid_table(std::cout, points);
      }
    } else if (demo_cmd->parsed()) {
      const mlrss::Config cfg = make_config(demo_cmd, demo_common);
      mlrss::run_demo(cfg, demo_dir, std::cout);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const mlrss::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  } catch (const mlrss::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const mlrss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
