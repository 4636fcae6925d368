#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/model.hpp"

namespace biphoton {

enum class AxisKind { Frequency, Time };

const char* to_string(AxisKind kind);
AxisKind axis_kind_from_string(std::string_view s);
/// "rad/ps" or "ps".
const char* unit_of(AxisKind kind);

/// Uniform, symmetric sampling: coord(k) = center + (k - (n - 1) / 2) * step.
struct Axis {
  AxisKind kind = AxisKind::Frequency;
  double center = 0.0;
  double step = 1.0;
  int n = 0;

  double offset(int k) const { return (k - 0.5 * (n - 1)) * step; }
  double coord(int k) const { return center + offset(k); }
  /// Offsets from the center for every sample.
  std::vector<double> offsets() const;

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Throws std::invalid_argument unless step > 0, n >= 8 and values are finite.
void validate(const Axis& axis);

/// Rows follow the signal axis, columns the idler axis.
struct Grid2D {
  Axis signal;
  Axis idler;

  const Axis& axis(Photon p) const { return p == Photon::Signal ? signal : idler; }
  std::size_t size() const { return static_cast<std::size_t>(signal.n) * idler.n; }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * idler.n + col;
  }
  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Non-negative values normalized to unit sum, row-major.
struct Intensity2D {
  Grid2D grid;
  std::vector<double> values;

  double at(int row, int col) const { return values[grid.index(row, col)]; }
  std::span<const double> row(int r) const {
    return {values.data() + grid.index(r, 0), static_cast<std::size_t>(grid.idler.n)};
  }
};

/// Integer coincidence counts with the provenance of the draw.
struct CountGrid {
  Grid2D grid;
  std::vector<std::uint64_t> counts;
  double total_expected = 0.0;
  std::uint64_t seed = 0;
  std::string generator;

  std::uint64_t at(int row, int col) const { return counts[grid.index(row, col)]; }
  std::uint64_t total() const;
  /// Counts as doubles, for fitting.
  std::vector<double> as_doubles() const;
};

/// Standard deviations of independent Gaussian responses along each axis,
/// in the axis units.
struct InstrumentResponse {
  double res_s = 0.0;
  double res_i = 0.0;

  double along(Photon p) const { return p == Photon::Signal ? res_s : res_i; }
};

/// Second moments of a 2D distribution.
struct Covariance2 {
  double var_s = 0.0;
  double var_i = 0.0;
  double cov = 0.0;

  static Covariance2 from_widths(double width_s, double width_i, double rho) {
    return {width_s * width_s, width_i * width_i, rho * width_s * width_i};
  }
  double rho() const;
};

/// Discrete moments of an intensity about its mean, using axis offsets.
struct GridMoments {
  double mean_s = 0.0;  // offset from axis center
  double mean_i = 0.0;
  Covariance2 covariance;
  double sum = 0.0;
};
GridMoments grid_moments(const Grid2D& grid, std::span<const double> values);

}  // namespace biphoton
