// Command-line front end: scenario simulation, observability checks, the
// two built-in demonstration scenarios, and plot-script generation.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure.
#include "attobs/runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace {

using namespace attobs;

int run_simulate(const std::string& config_path) {
  const ScenarioConfig cfg = load_scenario(config_path);
  const auto t0 = std::chrono::steady_clock::now();
  const RunOutput out = run_scenario(cfg);
  const auto t1 = std::chrono::steady_clock::now();
  std::cout << out.summary;
  std::cout << "trace: " << out.csv_path << "\n";
  std::cout << "elapsed: "
            << std::chrono::duration<double>(t1 - t0).count() << " s\n";
  return 0;
}

int run_check(const std::string& config_path) {
  const ScenarioConfig cfg = load_scenario(config_path);
  std::cout << format_check_report(check_scenario(cfg));
  return 0;
}

int run_example1(bool noise, std::uint64_t seed) {
  ScenarioConfig cfg = example1_config(noise, seed);
  const RunOutput out = run_scenario(cfg);
  std::cout << out.summary;
  std::cout << format_check_report(check_scenario(cfg));
  std::cout << "trace: " << out.csv_path << "\n";
  const PlotScripts ps = emit_plot_scripts(out.csv_path);
  std::cout << "plots: " << ps.euler_script << " " << ps.error_script << "\n";
  return 0;
}

int run_example2_cmd(double alpha, double alpha_baseline, std::uint64_t seed) {
  const Example2Result res =
      run_example2(alpha, alpha_baseline, example2_sensors(seed));
  const std::string path = resolve_output_path("example2_trace.csv");
  write_trace_csv(res.trace, path);
  std::cout << "turn windows: [" << res.windows[0].first << ", "
            << res.windows[0].second << "] and [" << res.windows[1].first
            << ", " << res.windows[1].second << "] s\n";
  std::cout << "mean Euler error on turns: proposed=" << res.mean_err_proposed
            << " rad, baseline=" << res.mean_err_baseline << " rad\n";
  std::cout << "trace: " << path << "\n";
  const PlotScripts ps = emit_plot_scripts(path);
  std::cout << "plots: " << ps.euler_script << " " << ps.error_script << "\n";
  return 0;
}

int run_plot(const std::string& trace_path) {
  const PlotScripts ps = emit_plot_scripts(trace_path);
  std::cout << "plots: " << ps.euler_script << " " << ps.error_script << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attitude observer toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto* sim = app.add_subcommand("simulate", "run a scenario config");
  sim->add_option("config", config_path, "scenario config file")->required();

  std::string check_path;
  auto* chk = app.add_subcommand("check", "observability checks for a config");
  chk->add_option("config", check_path, "scenario config file")->required();

  bool noise = false;
  std::uint64_t seed = 1;
  auto* ex1 = app.add_subcommand("example1", "single-vector benchmark");
  ex1->add_flag("--noise", noise, "enable sensor noise");
  ex1->add_option("--seed", seed, "noise seed");

  double alpha = 1.0, alpha_baseline = 8.0;
  std::uint64_t seed2 = 1;
  auto* ex2 = app.add_subcommand("example2", "vehicle scenario comparison");
  ex2->add_option("--alpha", alpha, "filter bandwidth, proposed feed");
  ex2->add_option("--alpha-baseline", alpha_baseline,
                  "filter bandwidth, baseline feed");
  ex2->add_option("--seed", seed2, "noise seed");

  std::string trace_path;
  auto* plt = app.add_subcommand("plot", "emit gnuplot scripts for a trace");
  plt->add_option("trace", trace_path, "trace CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(config_path);
    if (chk->parsed()) return run_check(check_path);
    if (ex1->parsed()) return run_example1(noise, seed);
    if (ex2->parsed()) return run_example2_cmd(alpha, alpha_baseline, seed2);
    if (plt->parsed()) return run_plot(trace_path);
  } catch (const attobs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const attobs::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
