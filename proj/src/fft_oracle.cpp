#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "biphoton/simulate.hpp"

namespace biphoton {

namespace {

constexpr int kMaxOversampling = 8;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

// Smallest 2^a 3^b 5^c >= n.
std::size_t smooth_size(std::size_t n) {
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2, 3, 5}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

int oversampling(double bandwidth, double step) {
  const int q = static_cast<int>(std::ceil(8.0 * bandwidth * step / std::numbers::pi));
  if (q > kMaxOversampling) {
    throw std::invalid_argument(
        "joint_temporal_intensity_fft: time step too coarse for the spectral bandwidth "
        "(sampled spectrum would alias)");
  }
  return std::max(q, 1);
}

}  // namespace

Intensity2D joint_temporal_intensity_fft(const BiphotonState& state, const Grid2D& grid) {
  if (grid.signal.kind != AxisKind::Time || grid.idler.kind != AxisKind::Time) {
    throw std::invalid_argument("joint_temporal_intensity_fft: grid axes must both be time");
  }
  validate(grid.signal);
  validate(grid.idler);

  const MomentSummary tm = temporal_moments(state);
  const int qs = oversampling(state.sigma_s(), grid.signal.step);
  const int qi = oversampling(state.sigma_i(), grid.idler.step);
  const double dts = grid.signal.step / qs;
  const double dti = grid.idler.step / qi;

  const double window_s = grid.signal.n * grid.signal.step + 16.0 * tm.marginal_s;
  const double window_i = grid.idler.n * grid.idler.step + 16.0 * tm.marginal_i;
  const std::size_t ns = smooth_size(static_cast<std::size_t>(std::ceil(window_s / dts)));
  const std::size_t ni = smooth_size(static_cast<std::size_t>(std::ceil(window_i / dti)));

  const double dws = 2.0 * std::numbers::pi / (static_cast<double>(ns) * dts);
  const double dwi = 2.0 * std::numbers::pi / (static_cast<double>(ni) * dti);
  const double tau0_s = grid.signal.coord(0);
  const double tau0_i = grid.idler.coord(0);

  std::unique_ptr<fftw_complex[], FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ns * ni)));
  if (!buf) throw std::bad_alloc();

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(ns), static_cast<int>(ni), buf.get(), buf.get(),
                            FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw planning failed");

  auto wrapped = [](std::size_t k, std::size_t n) {
    return k < (n + 1) / 2 ? static_cast<double>(k)
                           : static_cast<double>(k) - static_cast<double>(n);
  };

  // Sample the amplitude at offsets k dw from the centers; the shift to the
  // first grid time is folded into the phase so output index m maps to
  // tau0 + m dt.
  for (std::size_t a = 0; a < ns; ++a) {
    const double ws = wrapped(a, ns) * dws;
    const std::complex<double> shift_s = std::polar(1.0, ws * tau0_s);
    for (std::size_t b = 0; b < ni; ++b) {
      const double wi = wrapped(b, ni) * dwi;
      const std::complex<double> v = jsa(state, state.omega0_s() + ws, state.omega0_i() + wi) *
                                     shift_s * std::polar(1.0, wi * tau0_i);
      buf[a * ni + b][0] = v.real();
      buf[a * ni + b][1] = v.imag();
    }
  }

  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  Intensity2D out{grid, std::vector<double>(grid.size())};
  double total = 0.0;
  for (int j = 0; j < grid.signal.n; ++j) {
    for (int k = 0; k < grid.idler.n; ++k) {
      const fftw_complex& c =
          buf[static_cast<std::size_t>(j) * qs * ni + static_cast<std::size_t>(k) * qi];
      const double v = c[0] * c[0] + c[1] * c[1];
      out.values[grid.index(j, k)] = v;
      total += v;
    }
  }
  if (!(total > 0.0)) throw std::domain_error("fft intensity has no weight on the grid");
  for (double& v : out.values) v /= total;
  return out;
}

}  // namespace biphoton
