#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/cli/scenario.hpp"
#include "biphoton/estimate.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/witness.hpp"

namespace biphoton::cli {

inline constexpr const char* kReportSchema = "biphoton.report/1";

/// Analysis of one coincidence grid as it appears in a report.
struct DistributionResult {
  std::string name;
  Grid2D grid;
  std::uint64_t total_counts = 0;
  double total_expected = 0.0;
  std::uint64_t seed = 0;
  std::string generator;
  InstrumentResponse response;  // removed by deconvolution
  FitSummary fit;
};

struct Report {
  std::optional<Scenario> scenario;  // absent for external grids
  std::vector<DistributionResult> distributions;
  std::vector<WitnessReport> witnesses;
  double k_sigma = 3.0;
  std::optional<double> dispersion_chirp;  // ps^2, when a dispersion witness applies
  std::uint64_t seed = 0;
  std::string generator;
  std::string version;

  const DistributionResult* find(const std::string& name) const;
};

std::string report_json(const Report& report);
/// Reads back what report_json wrote (distributions, k_sigma, dispersion
/// chirp, provenance). Throws ConfigError on schema mismatch.
Report parse_report_json(const std::string& text, const std::string& source);

/// Aligned plain-text tables: one per distribution, then the witnesses.
std::string report_table(const Report& report);

std::string witnesses_json(const std::vector<WitnessReport>& witnesses);
std::string witness_table(const std::vector<WitnessReport>& witnesses);

/// Unit of a witness value ("1" for products, "ps" for the dispersion test).
const char* witness_unit(const WitnessReport& w);

}  // namespace biphoton::cli
