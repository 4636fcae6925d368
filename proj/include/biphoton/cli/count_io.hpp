#pragma once

// CountGrid CSV:
//
//   # format: biphoton-countgrid/1
//   # signal.kind: frequency|time      (then signal.unit, .center, .step, .n)
//   # idler.kind: ...                   (same fields)
//   # total_expected: <double>
//   # seed: <uint64>
//   # generator: <name>
//   c00,c01,...        one line per signal sample, idler samples across
//
// Doubles are written with 17 significant digits so they round-trip.
// Header keys may appear in any order; unknown keys are errors.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "biphoton/estimate.hpp"
#include "biphoton/grid.hpp"

namespace biphoton::cli {

inline constexpr const char* kCountGridFormat = "biphoton-countgrid/1";

void write_counts_csv(std::ostream& out, const CountGrid& counts);
/// Throws ConfigError with the line number on malformed input.
CountGrid read_counts_csv(std::istream& in, const std::string& source);

void write_counts_file(const std::filesystem::path& path, const CountGrid& counts);
CountGrid read_counts_file(const std::filesystem::path& path);

/// "center,weight" per line with a two-line '#' header (kind and unit).
void write_hist_csv(std::ostream& out, const Hist1D& hist);

}  // namespace biphoton::cli
