#include <cmath>
#include <stdexcept>
#include <string>

#include "biphoton/estimate.hpp"

namespace biphoton {

namespace {

constexpr double kRhoLimit = 1.0 - 1e-9;

std::string limited_message(double measured, double resolution) {
  return "resolution-limited: measured width " + std::to_string(measured) +
         " does not exceed the resolution " + std::to_string(resolution);
}

}  // namespace

ResolutionLimited::ResolutionLimited(double measured, double resolution)
    : std::domain_error(limited_message(measured, resolution)),
      measured_(measured),
      resolution_(resolution) {}

double deconvolve_width(double measured, double resolution) {
  if (!(measured > 0.0) || !std::isfinite(measured)) {
    throw std::invalid_argument("measured width must be positive");
  }
  if (!(resolution >= 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("resolution must be non-negative");
  }
  if (resolution == 0.0) return measured;
  if (measured <= resolution) throw ResolutionLimited(measured, resolution);
  return std::sqrt((measured - resolution) * (measured + resolution));
}

DeconvolvedSummary deconvolve_summary(const MomentSummary& raw, const InstrumentResponse& response) {
  const double rs = response.res_s;
  const double ri = response.res_i;
  DeconvolvedSummary out;
  MomentSummary& d = out.summary;

  d.marginal_s = deconvolve_width(raw.marginal_s, rs);
  d.marginal_i = deconvolve_width(raw.marginal_i, ri);

  double rho = raw.rho * (raw.marginal_s / d.marginal_s) * (raw.marginal_i / d.marginal_i);
  if (std::abs(rho) > kRhoLimit) {
    rho = std::copysign(kRhoLimit, rho);
    out.rho_clamped = true;
  }
  d.rho = rho;

  const double rho2 = raw.rho * raw.rho;
  const double gain_s = raw.marginal_s / d.marginal_i;
  const double gain_i = raw.marginal_i / d.marginal_s;
  d.heralded_s = deconvolve_width(raw.heralded_s, std::sqrt(rs * rs + rho2 * gain_s * gain_s * ri * ri));
  d.heralded_i = deconvolve_width(raw.heralded_i, std::sqrt(ri * ri + rho2 * gain_i * gain_i * rs * rs));

  const double combined = std::hypot(rs, ri);
  if (raw.width_sum) d.width_sum = deconvolve_width(*raw.width_sum, combined);
  if (raw.width_diff) d.width_diff = deconvolve_width(*raw.width_diff, combined);
  return out;
}

}  // namespace biphoton
