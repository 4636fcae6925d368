#include "biphoton/grid.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "biphoton/kernels.hpp"

namespace biphoton {

const char* to_string(AxisKind kind) { return kind == AxisKind::Frequency ? "frequency" : "time"; }

AxisKind axis_kind_from_string(std::string_view s) {
  if (s == "frequency") return AxisKind::Frequency;
  if (s == "time") return AxisKind::Time;
  throw std::invalid_argument("unknown axis kind '" + std::string(s) + "'");
}

const char* unit_of(AxisKind kind) { return kind == AxisKind::Frequency ? "rad/ps" : "ps"; }

std::vector<double> Axis::offsets() const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[k] = offset(k);
  return out;
}

void validate(const Axis& axis) {
  if (axis.n < 8) throw std::invalid_argument("axis needs at least 8 samples");
  if (!(axis.step > 0.0) || !std::isfinite(axis.step)) {
    throw std::invalid_argument("axis step must be positive");
  }
  if (!std::isfinite(axis.center)) throw std::invalid_argument("axis center must be finite");
}

std::uint64_t CountGrid::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> CountGrid::as_doubles() const {
  return std::vector<double>(counts.begin(), counts.end());
}

double Covariance2::rho() const { return cov / std::sqrt(var_s * var_i); }

GridMoments grid_moments(const Grid2D& grid, std::span<const double> values) {
  const int ns = grid.signal.n;
  const int ni = grid.idler.n;
  const std::vector<double> ys = grid.idler.offsets();
  const double y0 = grid.idler.offset(0);

  // First pass: totals and means.
  double total = 0.0, sx = 0.0, sy = 0.0;
  std::vector<double> row_sums(static_cast<std::size_t>(ns));
  for (int j = 0; j < ns; ++j) {
    auto row = values.subspan(grid.index(j, 0), static_cast<std::size_t>(ni));
    const kernels::Moments m = kernels::moments(row, y0, grid.idler.step);
    row_sums[j] = m.w;
    total += m.w;
    sx += m.w * grid.signal.offset(j);
    sy += m.wx;
  }
  GridMoments out;
  out.sum = total;
  if (total <= 0.0) return out;
  out.mean_s = sx / total;
  out.mean_i = sy / total;

  // Second pass about the mean to keep cancellation small.
  double vxx = 0.0, vyy = 0.0, vxy = 0.0;
  for (int j = 0; j < ns; ++j) {
    auto row = values.subspan(grid.index(j, 0), static_cast<std::size_t>(ni));
    const double x = grid.signal.offset(j) - out.mean_s;
    const kernels::Moments m = kernels::moments(row, y0 - out.mean_i, grid.idler.step);
    vxx += row_sums[j] * x * x;
    vyy += m.wxx;
    vxy += x * m.wx;
  }
  out.covariance = {vxx / total, vyy / total, vxy / total};
  return out;
}

}  // namespace biphoton
