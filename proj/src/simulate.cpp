#include "biphoton/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "biphoton/kernels.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/random.hpp"

namespace biphoton {

namespace {

constexpr std::uint64_t kDrawDomain = 0x436f756e74735f31ULL;
constexpr std::uint64_t kResampleDomain = 0x526573616d706c65ULL;

void require_kinds(const Grid2D& grid, AxisKind s, AxisKind i, const char* what) {
  if (grid.signal.kind != s || grid.idler.kind != i) {
    throw std::invalid_argument(std::string(what) + ": grid axes are " +
                                to_string(grid.signal.kind) + " x " + to_string(grid.idler.kind) +
                                ", expected " + to_string(s) + " x " + to_string(i));
  }
}

void normalize(std::vector<double>& values) {
  const double total = kernels::sum(values);
  if (!(total > 0.0)) throw std::domain_error("intensity has no weight on the grid");
  const double inv = 1.0 / total;
  for (double& v : values) v *= inv;
}

}  // namespace

const char* to_string(Measurement m) {
  switch (m) {
    case Measurement::JointSpectrum: return "joint_spectrum";
    case Measurement::JointTemporal: return "joint_temporal";
    case Measurement::SignalTimeIdlerFrequency: return "signal_time_idler_frequency";
    case Measurement::SignalFrequencyIdlerTime: return "signal_frequency_idler_time";
  }
  return "unknown";
}

AxisKind signal_axis_kind(Measurement m) {
  return (m == Measurement::JointSpectrum || m == Measurement::SignalFrequencyIdlerTime)
             ? AxisKind::Frequency
             : AxisKind::Time;
}

AxisKind idler_axis_kind(Measurement m) {
  return (m == Measurement::JointSpectrum || m == Measurement::SignalTimeIdlerFrequency)
             ? AxisKind::Frequency
             : AxisKind::Time;
}

bool is_time_frequency(Measurement m) {
  return m == Measurement::SignalTimeIdlerFrequency || m == Measurement::SignalFrequencyIdlerTime;
}

Photon gated_side(Measurement m) {
  if (m == Measurement::SignalTimeIdlerFrequency) return Photon::Signal;
  if (m == Measurement::SignalFrequencyIdlerTime) return Photon::Idler;
  throw std::invalid_argument("measurement has no gated side");
}

Axis make_axis(AxisKind kind, double center, double width, double half_span_sigmas, int n) {
  if (n < 8) throw std::invalid_argument("grid needs n >= 8 samples per axis");
  if (!(half_span_sigmas > 0.0) || !std::isfinite(half_span_sigmas)) {
    throw std::invalid_argument("grid half-span must be positive");
  }
  if (!(width > 0.0)) throw std::invalid_argument("axis width must be positive");
  Axis axis{kind, center, 2.0 * half_span_sigmas * width / n, n};
  validate(axis);
  return axis;
}

Grid2D make_grid(const BiphotonState& state, Measurement m, double half_span_sigmas, int n) {
  switch (m) {
    case Measurement::JointSpectrum:
      return {make_axis(AxisKind::Frequency, state.omega0_s(), state.sigma_s(), half_span_sigmas, n),
              make_axis(AxisKind::Frequency, state.omega0_i(), state.sigma_i(), half_span_sigmas, n)};
    case Measurement::JointTemporal: {
      const MomentSummary t = temporal_moments(state);
      return {make_axis(AxisKind::Time, 0.0, t.marginal_s, half_span_sigmas, n),
              make_axis(AxisKind::Time, 0.0, t.marginal_i, half_span_sigmas, n)};
    }
    default:
      throw std::invalid_argument("time-frequency grids need the gate pulse");
  }
}

Grid2D make_grid(const BiphotonState& state, const GatePulse& gate, Photon gated,
                 double half_span_sigmas, int n) {
  const SpectrogramMoments sm = spectrogram_moments(state, gate, gated);
  const Photon other = partner(gated);
  const Axis time_axis = make_axis(AxisKind::Time, 0.0, sm.gated_pulse_width, half_span_sigmas, n);
  const Axis freq_axis = make_axis(AxisKind::Frequency, state.omega0(other), sm.partner_bandwidth,
                                   half_span_sigmas, n);
  return gated == Photon::Signal ? Grid2D{time_axis, freq_axis} : Grid2D{freq_axis, time_axis};
}

Grid2D with_shared_step(const Grid2D& grid) {
  Grid2D out = grid;
  out.signal.step = out.idler.step = std::max(grid.signal.step, grid.idler.step);
  return out;
}

Intensity2D gaussian_intensity(const Grid2D& grid, const Covariance2& covariance, double mean_s,
                               double mean_i) {
  validate(grid.signal);
  validate(grid.idler);
  const double rho = covariance.rho();
  if (!(covariance.var_s > 0.0) || !(covariance.var_i > 0.0) || !(std::abs(rho) < 1.0)) {
    throw std::invalid_argument("covariance must be positive definite");
  }
  const double det = covariance.var_s * covariance.var_i * (1.0 - rho) * (1.0 + rho);
  const double p_ss = covariance.var_i / det;
  const double p_ii = covariance.var_s / det;
  const double p_si = -covariance.cov / det;

  std::vector<double> ys = grid.idler.offsets();
  for (double& y : ys) y -= mean_i;

  Intensity2D out{grid, std::vector<double>(grid.size())};
  const auto ni = static_cast<std::size_t>(grid.idler.n);
  parallel_for(static_cast<std::size_t>(grid.signal.n), [&](std::size_t j) {
    const double x = grid.signal.offset(static_cast<int>(j)) - mean_s;
    kernels::exp_quadratic(ys, -0.5 * p_ss * x * x, -p_si * x, -0.5 * p_ii,
                           std::span<double>(out.values.data() + j * ni, ni));
  });
  normalize(out.values);
  return out;
}

namespace {

struct GaussianModel {
  Covariance2 covariance;
  double mean_s;
  double mean_i;
};

GaussianModel spectral_model(const BiphotonState& state, const Grid2D& grid) {
  require_kinds(grid, AxisKind::Frequency, AxisKind::Frequency, "joint_spectral_intensity");
  const MomentSummary m = spectral_moments(state);
  return {Covariance2::from_widths(m.marginal_s, m.marginal_i, m.rho),
          state.omega0_s() - grid.signal.center, state.omega0_i() - grid.idler.center};
}

GaussianModel temporal_model(const BiphotonState& state, const Grid2D& grid) {
  require_kinds(grid, AxisKind::Time, AxisKind::Time, "joint_temporal_intensity");
  const MomentSummary m = temporal_moments(state);
  return {Covariance2::from_widths(m.marginal_s, m.marginal_i, m.rho), -grid.signal.center,
          -grid.idler.center};
}

GaussianModel spectrogram_model(const BiphotonState& state, const GatePulse& gate,
                                const Grid2D& grid, Photon gated) {
  const double partner_center = state.omega0(partner(gated));
  const SpectrogramMoments sm = spectrogram_moments(state, gate, gated);
  if (gated == Photon::Signal) {
    require_kinds(grid, AxisKind::Time, AxisKind::Frequency, "time_frequency_intensity");
    return {Covariance2::from_widths(sm.gated_pulse_width, sm.partner_bandwidth, sm.rho_f),
            -grid.signal.center, partner_center - grid.idler.center};
  }
  require_kinds(grid, AxisKind::Frequency, AxisKind::Time, "time_frequency_intensity");
  return {Covariance2::from_widths(sm.partner_bandwidth, sm.gated_pulse_width, sm.rho_f),
          partner_center - grid.signal.center, -grid.idler.center};
}

GaussianModel measurement_model(const BiphotonState& state, const GatePulse& gate, Measurement m,
                                const Grid2D& grid) {
  switch (m) {
    case Measurement::JointSpectrum: return spectral_model(state, grid);
    case Measurement::JointTemporal: return temporal_model(state, grid);
    default: return spectrogram_model(state, gate, grid, gated_side(m));
  }
}

Intensity2D render(const Grid2D& grid, const GaussianModel& g) {
  return gaussian_intensity(grid, g.covariance, g.mean_s, g.mean_i);
}

}  // namespace

Intensity2D joint_spectral_intensity(const BiphotonState& state, const Grid2D& grid) {
  return render(grid, spectral_model(state, grid));
}

Intensity2D joint_temporal_intensity(const BiphotonState& state, const Grid2D& grid) {
  return render(grid, temporal_model(state, grid));
}

Intensity2D time_frequency_intensity(const BiphotonState& state, const GatePulse& gate,
                                     const Grid2D& grid, Photon gated) {
  return render(grid, spectrogram_model(state, gate, grid, gated));
}

Intensity2D ideal_intensity(const BiphotonState& state, const GatePulse& gate, Measurement m,
                            const Grid2D& grid) {
  return render(grid, measurement_model(state, gate, m, grid));
}

Intensity2D observed_intensity(const BiphotonState& state, const GatePulse& gate, Measurement m,
                               const Grid2D& grid, const InstrumentResponse& response) {
  if (response.res_s < 0.0 || response.res_i < 0.0) {
    throw std::invalid_argument("instrument response widths must be non-negative");
  }
  GaussianModel g = measurement_model(state, gate, m, grid);
  g.covariance.var_s += response.res_s * response.res_s;
  g.covariance.var_i += response.res_i * response.res_i;
  return render(grid, g);
}

std::vector<double> gaussian_taps(double sigma_steps) {
  if (!(sigma_steps >= 0.0) || !std::isfinite(sigma_steps)) {
    throw std::invalid_argument("response width must be non-negative");
  }
  if (sigma_steps == 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(5.0 * sigma_steps)) + 1;
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  const double t = sigma_steps * sigma_steps;
  for (int k = -radius; k <= radius; ++k) {
    double w;
    if (sigma_steps < 1.0) {
      // Discrete Gaussian kernel e^-t I_k(t): variance exactly t even when
      // the response is narrower than one sample.
      w = std::exp(-t) * std::cyl_bessel_i(static_cast<double>(std::abs(k)), t);
    } else {
      w = std::exp(-0.5 * k * k / t);
    }
    taps[static_cast<std::size_t>(k + radius)] = w;
  }
  double total = 0.0;
  for (double w : taps) total += w;
  for (double& w : taps) w /= total;
  return taps;
}

Intensity2D blur(const Intensity2D& intensity, const InstrumentResponse& response) {
  if (response.res_s < 0.0 || response.res_i < 0.0) {
    throw std::invalid_argument("instrument response widths must be non-negative");
  }
  const Grid2D& grid = intensity.grid;
  const auto ns = static_cast<std::size_t>(grid.signal.n);
  const auto ni = static_cast<std::size_t>(grid.idler.n);
  Intensity2D out{grid, intensity.values};

  if (response.res_i > 0.0) {
    const std::vector<double> taps = gaussian_taps(response.res_i / grid.idler.step);
    std::vector<double> tmp(out.values.size());
    parallel_for(ns, [&](std::size_t j) {
      kernels::fir(std::span<const double>(out.values.data() + j * ni, ni), taps,
                   std::span<double>(tmp.data() + j * ni, ni));
    });
    out.values.swap(tmp);
  }

  if (response.res_s > 0.0) {
    const std::vector<double> taps = gaussian_taps(response.res_s / grid.signal.step);
    const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);
    std::vector<double> tmp(out.values.size(), 0.0);
    parallel_for(ns, [&](std::size_t j) {
      std::span<double> dst(tmp.data() + j * ni, ni);
      for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(j) + t;
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(ns)) continue;
        kernels::axpy(taps[static_cast<std::size_t>(t + radius)],
                      std::span<const double>(out.values.data() + src * ni, ni), dst);
      }
    });
    out.values.swap(tmp);
  }

  normalize(out.values);
  return out;
}

CountGrid draw_counts(const Intensity2D& intensity, double total_counts, std::uint64_t seed) {
  if (!(total_counts >= 0.0) || !std::isfinite(total_counts)) {
    throw std::invalid_argument("total counts must be non-negative");
  }
  const Grid2D& grid = intensity.grid;
  const auto ni = static_cast<std::size_t>(grid.idler.n);
  CountGrid out{grid, std::vector<std::uint64_t>(grid.size()), total_counts, seed, kGeneratorName};
  parallel_for(static_cast<std::size_t>(grid.signal.n), [&](std::size_t j) {
    std::vector<double> means(ni);
    for (std::size_t k = 0; k < ni; ++k) means[k] = total_counts * intensity.values[j * ni + k];
    Engine engine(derive_seed(seed, kDrawDomain, j));
    poisson_fill(engine, means, std::span<std::uint64_t>(out.counts.data() + j * ni, ni));
  });
  return out;
}

CountGrid resample_counts(const CountGrid& counts, std::uint64_t seed) {
  const Grid2D& grid = counts.grid;
  const auto ni = static_cast<std::size_t>(grid.idler.n);
  CountGrid out{grid, std::vector<std::uint64_t>(grid.size()), static_cast<double>(counts.total()),
                seed, kGeneratorName};
  parallel_for(static_cast<std::size_t>(grid.signal.n), [&](std::size_t j) {
    std::vector<double> means(counts.counts.begin() + static_cast<std::ptrdiff_t>(j * ni),
                              counts.counts.begin() + static_cast<std::ptrdiff_t>((j + 1) * ni));
    Engine engine(derive_seed(seed, kResampleDomain, j));
    poisson_fill(engine, means, std::span<std::uint64_t>(out.counts.data() + j * ni, ni));
  });
  return out;
}

}  // namespace biphoton
