#pragma once

// Discretization of the model onto measurement grids, instrument blur and
// Poissonian shot noise. The closed-form Gaussians are the production path;
// joint_temporal_intensity_fft is an independent numerical Fourier oracle.

#include <cstdint>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/model.hpp"

namespace biphoton {

enum class Measurement {
  JointSpectrum,             // frequency x frequency
  JointTemporal,             // time x time
  SignalTimeIdlerFrequency,  // signal gated, idler spectrally resolved
  SignalFrequencyIdlerTime,  // idler gated, signal spectrally resolved
};

const char* to_string(Measurement m);
AxisKind signal_axis_kind(Measurement m);
AxisKind idler_axis_kind(Measurement m);
bool is_time_frequency(Measurement m);
/// The time-resolved photon of a time-frequency measurement.
Photon gated_side(Measurement m);

/// Axis of n samples spanning +-half_span_sigmas * width around center.
Axis make_axis(AxisKind kind, double center, double width, double half_span_sigmas, int n);

/// Grid for a joint spectrum or joint temporal intensity: frequency axes
/// centered on the state's central frequencies, time axes on 0, each
/// spanning +-half_span_sigmas marginal widths (chirp-broadened in time).
Grid2D make_grid(const BiphotonState& state, Measurement m, double half_span_sigmas = 4.0,
                 int n = 128);

/// Grid for a time-frequency plot; the gated time axis spans the gated
/// pulse width (gate included).
Grid2D make_grid(const BiphotonState& state, const GatePulse& gate, Photon gated,
                 double half_span_sigmas = 4.0, int n = 128);

/// Both axes resampled at the larger of the two steps, keeping centers and
/// n. When the axes share a kind, every coord_s +- coord_i then falls on a
/// multiple of the step, so rotated histograms bin without rounding jitter.
Grid2D with_shared_step(const Grid2D& grid);

/// Normalized samples of a 2D Gaussian intensity with the given covariance,
/// centered at the axis centers plus (mean_s, mean_i).
Intensity2D gaussian_intensity(const Grid2D& grid, const Covariance2& covariance,
                               double mean_s = 0.0, double mean_i = 0.0);

/// |jsa|^2 on a frequency x frequency grid.
Intensity2D joint_spectral_intensity(const BiphotonState& state, const Grid2D& grid);

/// Closed-form joint temporal intensity (chirp included) on a time x time grid.
Intensity2D joint_temporal_intensity(const BiphotonState& state, const Grid2D& grid);

/// Numerical oracle: 2D DFT of sampled jsa values (chirp phase included),
/// modulus squared and normalized, on a time x time grid. Internally the
/// time step is grid.step / q with the smallest integer q that puts the
/// Nyquist frequency beyond 8 marginal bandwidths, and the window is padded
/// by 8 chirp-broadened marginal widths on each side. Throws
/// std::invalid_argument when q would exceed 8 (grid step too coarse for the
/// bandwidth; the sampled spectrum would alias).
Intensity2D joint_temporal_intensity_fft(const BiphotonState& state, const Grid2D& grid);

/// Coincidence probability versus gate delay on `gated` and frequency of
/// its partner, gate width included. Grid rows are always the signal axis.
Intensity2D time_frequency_intensity(const BiphotonState& state, const GatePulse& gate,
                                     const Grid2D& grid, Photon gated);

/// Convenience dispatch over the four measurements.
Intensity2D ideal_intensity(const BiphotonState& state, const GatePulse& gate, Measurement m,
                            const Grid2D& grid);

/// Closed-form intensity as recorded through independent Gaussian responses:
/// the ideal covariance plus diag(res_s^2, res_i^2). Exact for the Gaussian
/// model, so production scans carry no convolution discretization error.
Intensity2D observed_intensity(const BiphotonState& state, const GatePulse& gate, Measurement m,
                               const Grid2D& grid, const InstrumentResponse& response);

/// Symmetric taps of the discrete Gaussian kernel whose variance is exactly
/// sigma_steps^2 (before truncation), truncated beyond 5 sigma plus one
/// sample and renormalized. Sampled-Gaussian taps are used once the kernel
/// is wide enough that both agree to double precision.
std::vector<double> gaussian_taps(double sigma_steps);

/// Separable convolution with independent Gaussian responses on each axis
/// (zero outside the grid), renormalized to unit sum. Throws on negative
/// response widths.
Intensity2D blur(const Intensity2D& intensity, const InstrumentResponse& response);

/// Independent Poisson counts with means total_counts * value. Each grid row
/// draws from its own stream keyed by (seed, row).
CountGrid draw_counts(const Intensity2D& intensity, double total_counts, std::uint64_t seed);

/// Poisson resample of observed counts (mean = observed count per cell).
CountGrid resample_counts(const CountGrid& counts, std::uint64_t seed);

}  // namespace biphoton
