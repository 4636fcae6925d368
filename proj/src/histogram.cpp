#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biphoton/estimate.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton {

double Hist1D::total() const { return kernels::sum(weights); }

Hist1D marginal_hist(const Grid2D& grid, std::span<const double> values, Photon axis) {
  if (values.size() != grid.size()) throw std::invalid_argument("values do not match the grid");
  const Axis& a = grid.axis(axis);
  Hist1D h{a.kind, a.coord(0), a.step, std::vector<double>(static_cast<std::size_t>(a.n), 0.0)};
  const auto ni = static_cast<std::size_t>(grid.idler.n);
  for (int j = 0; j < grid.signal.n; ++j) {
    std::span<const double> row = values.subspan(static_cast<std::size_t>(j) * ni, ni);
    if (axis == Photon::Signal) {
      h.weights[static_cast<std::size_t>(j)] = kernels::sum(row);
    } else {
      kernels::axpy(1.0, row, h.weights);
    }
  }
  return h;
}

Hist1D marginal_hist(const CountGrid& counts, Photon axis) {
  const std::vector<double> values = counts.as_doubles();
  return marginal_hist(counts.grid, values, axis);
}

const char* to_string(RotatedAxis a) { return a == RotatedAxis::Sum ? "sum" : "difference"; }

Hist1D rotated_hist(const CountGrid& counts, RotatedAxis mode) {
  const Grid2D& g = counts.grid;
  if (g.signal.kind != g.idler.kind) {
    throw std::invalid_argument("rotated histograms need two axes of the same kind");
  }
  const double sign = mode == RotatedAxis::Sum ? 1.0 : -1.0;
  const double step = std::max(g.signal.step, g.idler.step);

  auto combined = [&](int j, int k) { return g.signal.coord(j) + sign * g.idler.coord(k); };
  const double lo = std::min({combined(0, 0), combined(0, g.idler.n - 1),
                              combined(g.signal.n - 1, 0), combined(g.signal.n - 1, g.idler.n - 1)});
  const double hi = std::max({combined(0, 0), combined(0, g.idler.n - 1),
                              combined(g.signal.n - 1, 0), combined(g.signal.n - 1, g.idler.n - 1)});
  const auto nbins = static_cast<std::size_t>(std::lround((hi - lo) / step)) + 1;

  // Integer accumulation keeps the total exact.
  std::vector<std::uint64_t> bins(nbins, 0);
  for (int j = 0; j < g.signal.n; ++j) {
    for (int k = 0; k < g.idler.n; ++k) {
      const std::uint64_t c = counts.at(j, k);
      if (c == 0) continue;
      const auto b = static_cast<std::size_t>(std::lround((combined(j, k) - lo) / step));
      bins[std::min(b, nbins - 1)] += c;
    }
  }
  Hist1D h{g.signal.kind, lo, step, std::vector<double>(nbins)};
  std::transform(bins.begin(), bins.end(), h.weights.begin(),
                 [](std::uint64_t c) { return static_cast<double>(c); });
  return h;
}

}  // namespace biphoton
