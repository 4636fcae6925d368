#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/cli/ini.hpp"
#include "biphoton/estimate.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/model.hpp"

namespace biphoton::cli {

/// Everything needed to simulate and analyze one experiment.
///
/// Config keys (INI):
///   [state]      sigma_s, sigma_i, rho, omega0_s, omega0_i (required);
///                chirp_s | displacement_s_mm, chirp_i | displacement_i_mm
///   [gate]       tau_g (required), omega_g0
///   [instrument] spectral_res_s_nm, spectral_res_i_nm (required);
///                wavelength_s_nm, wavelength_i_nm (default 2 pi c / omega0)
///   [grid]       half_span (4), n (128)
///   [run]        name, total_counts, mc_trials, seed (required);
///                k_sigma (3), herald_min_fraction (0.5), herald_min_slices (3)
struct Scenario {
  std::string name;
  double sigma_s = 0.0;
  double sigma_i = 0.0;
  double rho = 0.0;
  double omega0_s = 0.0;
  double omega0_i = 0.0;
  double chirp_s = 0.0;
  double chirp_i = 0.0;
  double tau_g = 0.0;
  double omega_g0 = 0.0;
  double spectral_res_s_nm = 0.0;
  double spectral_res_i_nm = 0.0;
  std::optional<double> wavelength_s_nm;
  std::optional<double> wavelength_i_nm;
  double half_span = 4.0;
  int n = 128;
  double total_counts = 0.0;
  int mc_trials = 0;
  std::uint64_t seed = 0;
  double k_sigma = 3.0;
  HeraldedPolicy policy;

  BiphotonState state() const;
  GatePulse gate() const;
  double wavelength_s() const;
  double wavelength_i() const;
  /// Monochromator resolutions in rad/ps.
  InstrumentResponse spectral_response() const;
};

/// Builds a scenario from a parsed config. With `base`, keys in `doc`
/// override it and nothing is required; without, every required key must be
/// present. Throws ConfigError naming the line (or listing missing keys).
Scenario scenario_from_ini(const IniDocument& doc, const Scenario* base = nullptr);

Scenario load_scenario(const std::filesystem::path& path, const Scenario* base = nullptr);

/// Bundled scenarios: table1 and fig4a..fig4d.
std::vector<std::string> preset_names();
/// INI text of a preset; throws ConfigError for unknown names.
const std::string& preset_text(const std::string& name);
Scenario preset(const std::string& name);

/// Canonical INI text; round-trips through scenario_from_ini.
std::string to_ini(const Scenario& s);

}  // namespace biphoton::cli
