#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/cli/report.hpp"
#include "biphoton/cli/scenario.hpp"
#include "biphoton/simulate.hpp"

namespace biphoton::cli {

enum class Mode { Simulate, Analyze, Witness, All };
Mode mode_from_string(const std::string& s);

/// Exit codes of a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

/// One simulated plot of a scenario.
struct PlannedDistribution {
  std::string name;
  Measurement measurement;
  BiphotonState state;
  GatePulse gate;
  Grid2D grid;
  InstrumentResponse simulated_response;    // applied when drawing counts
  InstrumentResponse removed_response;      // removed by deconvolution
  std::uint64_t draw_seed;
  std::uint64_t mc_seed;
};

/// The four plots of a scenario (joint spectrum, joint temporal and the two
/// time-frequency plots), plus an unchirped joint temporal reference when
/// the chirps have opposite signs. The gate is part of the time-frequency
/// model, so only their frequency axis is blurred in simulation; its width
/// is still removed from the gated time axis on deconvolution.
std::vector<PlannedDistribution> plan_distributions(const Scenario& scenario);

CountGrid simulate_distribution(const PlannedDistribution& plan, double total_counts);

/// Analysis of simulated or loaded grids, in plan order, plus witnesses.
Report analyze_distributions(const Scenario& scenario,
                             const std::vector<PlannedDistribution>& plans,
                             const std::vector<CountGrid>& grids);

/// Witnesses derivable from the distributions present in a report.
std::vector<WitnessReport> compute_witnesses(const Report& report, double k_sigma);

/// Exit code implied by witness verdicts.
int witness_exit_code(const std::vector<WitnessReport>& witnesses);

/// Runs `mode` for a scenario writing into out_dir. Returns the exit code;
/// throws on errors.
int run(const Scenario& scenario, Mode mode, const std::filesystem::path& out_dir,
        std::ostream& log, std::optional<double> k_sigma_override = std::nullopt);

struct ExternalOptions {
  InstrumentResponse response;
  int mc_trials = 100;
  std::uint64_t seed = 0;
  double k_sigma = 3.0;
  HeraldedPolicy policy;
};

/// Estimation pipeline on a user-supplied CountGrid CSV.
int analyze_external(const std::filesystem::path& counts_csv, const ExternalOptions& options,
                     const std::filesystem::path& out_dir, std::ostream& log);

std::string version();

}  // namespace biphoton::cli
