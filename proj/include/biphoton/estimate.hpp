#pragma once

// Analysis of coincidence grids: marginal and rotated histograms, 1D
// Gaussian fits, heralded slice widths, the fixed-marginal correlation fit,
// resolution deconvolution and Poisson Monte-Carlo errors.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/model.hpp"

namespace biphoton {

/// Uniformly binned 1D weights.
struct Hist1D {
  AxisKind kind = AxisKind::Frequency;
  double first_center = 0.0;
  double step = 1.0;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double center(std::size_t k) const { return first_center + static_cast<double>(k) * step; }
  double total() const;
};

/// Projection onto one axis: sums over the other axis. Bin centers are the
/// absolute axis coordinates.
Hist1D marginal_hist(const CountGrid& counts, Photon axis);
Hist1D marginal_hist(const Grid2D& grid, std::span<const double> values, Photon axis);

enum class RotatedAxis { Sum, Difference };
const char* to_string(RotatedAxis a);

/// Counts binned by coord_s + coord_i or coord_s - coord_i, each cell
/// assigned whole to the nearest bin of width max(step_s, step_i); the first
/// bin is centered on the smallest combined coordinate. Both axes must be of
/// the same kind. Total counts are conserved exactly.
Hist1D rotated_hist(const CountGrid& counts, RotatedAxis mode);

/// A * exp(-(x - center)^2 / (2 width^2)) + offset.
struct GaussFit1D {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.0;
  double offset = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;

  double operator()(double x) const;
};

/// Fit failure. `last` holds the final iterate when the solver ran out of
/// iterations; it is empty for degenerate input.
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what, std::optional<GaussFit1D> last = std::nullopt)
      : std::runtime_error(what), last_(last) {}
  const std::optional<GaussFit1D>& last() const { return last_; }

 private:
  std::optional<GaussFit1D> last_;
};

struct GaussFitOptions {
  bool fit_offset = true;
  int max_iterations = 200;
  double step_tolerance = 1e-10;
};

/// Levenberg-Marquardt least squares, started from the sample moments of
/// the weights above their minimum. Throws FitError for fewer than 8 bins,
/// fewer than 3 non-empty bins, flat data or non-convergence.
GaussFit1D fit_gauss1d(const Hist1D& hist, const GaussFitOptions& options = {});

/// Which slices enter a heralded width: those whose total weight is at least
/// min_fraction of the heaviest slice.
struct HeraldedPolicy {
  double min_fraction = 0.5;
  int min_slices = 3;
};

struct HeraldedWidth {
  double width = 0.0;
  double error = 0.0;  // standard error of the mean over slices
  int slices = 0;
};

/// Width of `photon` with its partner fixed: every qualifying slice at fixed
/// partner coordinate is fitted, and the unweighted mean width returned.
/// Throws std::runtime_error when fewer than policy.min_slices qualify.
HeraldedWidth heralded_width(const CountGrid& counts, Photon photon,
                             const HeraldedPolicy& policy = {});

struct CorrelationFit {
  double rho = 0.0;
  double error = 0.0;  // Poisson standard error from the residual curvature
  double residual_norm = 0.0;
};

/// Least squares over rho of A * N2(centers, widths, rho) + b with centers
/// and widths frozen from the marginal fits; A and b are solved exactly for
/// each rho. Minimized in atanh(rho) to 1e-6 in rho.
CorrelationFit fit_correlation(const CountGrid& counts, const GaussFit1D& fit_s,
                               const GaussFit1D& fit_i);

/// Thrown when a measured width does not exceed its resolution.
class ResolutionLimited : public std::domain_error {
 public:
  ResolutionLimited(double measured, double resolution);
  double measured() const { return measured_; }
  double resolution() const { return resolution_; }

 private:
  double measured_;
  double resolution_;
};

/// sqrt(measured^2 - resolution^2). Throws std::invalid_argument for
/// non-positive measured or negative resolution.
double deconvolve_width(double measured, double resolution);

struct DeconvolvedSummary {
  MomentSummary summary;
  bool rho_clamped = false;
};

/// Removes independent Gaussian responses from every entry of a raw
/// summary. Marginals lose their own response; sum and difference widths
/// the quadrature of both. The covariance is unchanged, so
/// rho_dec = rho_raw * w_s,raw * w_i,raw / (w_s,dec * w_i,dec), clamped to
/// within 1e-9 of +-1 with a flag. A heralded width loses its own response
/// plus the partner response carried through the regression on the partner:
/// r^2 = r_self^2 + rho_raw^2 (w_self,raw / w_partner,dec)^2 r_partner^2.
DeconvolvedSummary deconvolve_summary(const MomentSummary& raw, const InstrumentResponse& response);

/// Point estimates of one grid, flattened in a fixed order.
using Estimator = std::function<std::vector<double>(const CountGrid&)>;

struct MonteCarloErrors {
  std::vector<double> stddev;
  int trials = 0;
  int failures = 0;
};

/// Runs `estimator` on n_trials Poisson resamplings of the observed counts
/// and returns the sample standard deviation of each output. Trial t is
/// seeded from (seed, t) so results are independent of threading. Throws
/// std::invalid_argument for n_trials < 50 and std::runtime_error when more
/// than 20% of trials fail.
MonteCarloErrors monte_carlo_errors(const CountGrid& counts, int n_trials, std::uint64_t seed,
                                    const Estimator& estimator);

struct AnalysisOptions {
  HeraldedPolicy policy;
  int mc_trials = 100;
  std::uint64_t seed = 0;
};

/// Raw and deconvolved summaries of one coincidence grid with Monte-Carlo
/// standard errors for every entry. Sum and difference widths are present
/// only when both axes have the same kind.
struct FitSummary {
  MomentSummary raw;
  MomentSummary deconvolved;
  MomentSummary raw_error;
  MomentSummary deconvolved_error;
  double center_s = 0.0;
  double center_i = 0.0;
  bool rho_clamped = false;
  int mc_trials = 0;
  int mc_failures = 0;
};

/// Point estimate only: marginal fits, heralded slices, correlation fit,
/// rotated widths and deconvolution.
struct PointEstimate {
  MomentSummary raw;
  DeconvolvedSummary deconvolved;
  double center_s = 0.0;
  double center_i = 0.0;
};
PointEstimate estimate_distribution(const CountGrid& counts, const InstrumentResponse& response,
                                    const HeraldedPolicy& policy = {});

FitSummary analyze_distribution(const CountGrid& counts, const InstrumentResponse& response,
                                const AnalysisOptions& options);

}  // namespace biphoton
