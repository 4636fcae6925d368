#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "biphoton/cli/pipeline.hpp"
#include "biphoton/estimate.hpp"
#include "biphoton/kernels.hpp"
#include "biphoton/parallel.hpp"

namespace cli = biphoton::cli;

int main(int argc, char** argv) {
  CLI::App app{"Simulate and analyze energy-time entangled photon-pair measurements"};
  app.set_version_flag("--version", cli::version());
  app.require_subcommand(1);

  std::string config;
  std::string scenario_name;
  std::optional<std::uint64_t> seed;
  std::optional<int> mc_trials;
  std::optional<double> k_sigma;
  std::string out_dir = ".";
  unsigned threads = 0;

  std::vector<CLI::App*> runs;
  for (const char* mode : {"simulate", "analyze", "witness", "all"}) {
    CLI::App* sub = app.add_subcommand(mode, std::string("Run mode '") + mode + "'");
    sub->add_option("--config", config, "Scenario config file (INI)");
    sub->add_option("--scenario", scenario_name,
                    "Bundled scenario; with --config the file overrides its keys");
    sub->add_option("--seed", seed, "Override the master seed");
    sub->add_option("--mc-trials", mc_trials, "Override the Monte-Carlo trial count")
        ->check(CLI::Range(50, 1000000));
    sub->add_option("--k-sigma", k_sigma, "Witness significance in standard deviations")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    runs.push_back(sub);
  }

  CLI::App* analyze = runs[1];
  std::string counts_csv;
  double res_s = 0.0;
  double res_i = 0.0;
  analyze->add_option("--counts", counts_csv, "Analyze an external CountGrid CSV")
      ->check(CLI::ExistingFile);
  analyze->add_option("--res-s", res_s, "Signal-axis response width (axis units), with --counts")
      ->check(CLI::NonNegativeNumber);
  analyze->add_option("--res-i", res_i, "Idler-axis response width (axis units), with --counts")
      ->check(CLI::NonNegativeNumber);

  CLI::App* presets = app.add_subcommand("presets", "List bundled scenarios");
  std::string dump;
  presets->add_option("--dump", dump, "Print the config text of one scenario");

  CLI11_PARSE(app, argc, argv);

  try {
    biphoton::set_thread_count(threads);

    if (presets->parsed()) {
      if (!dump.empty()) {
        std::cout << cli::preset_text(dump);
      } else {
        for (const auto& name : cli::preset_names()) std::cout << name << "\n";
      }
      return cli::kExitOk;
    }

    if (analyze->parsed() && !counts_csv.empty()) {
      cli::ExternalOptions options;
      options.response = {res_s, res_i};
      if (mc_trials) options.mc_trials = *mc_trials;
      if (seed) options.seed = *seed;
      if (k_sigma) options.k_sigma = *k_sigma;
      return cli::analyze_external(counts_csv, options, out_dir, std::cout);
    }

    std::optional<cli::Scenario> base;
    if (!scenario_name.empty()) base = cli::preset(scenario_name);
    if (config.empty() && !base) {
      std::cerr << "error: give --config, --scenario, or both\n";
      return cli::kExitError;
    }
    cli::Scenario scenario = config.empty() ? *base
                                            : cli::load_scenario(config, base ? &*base : nullptr);
    if (seed) scenario.seed = *seed;
    if (mc_trials) scenario.mc_trials = *mc_trials;

    cli::Mode mode = cli::Mode::All;
    for (std::size_t m = 0; m < runs.size(); ++m) {
      if (runs[m]->parsed()) mode = static_cast<cli::Mode>(m);
    }
    return cli::run(scenario, mode, out_dir, std::cout, k_sigma);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitError;
  }
}
