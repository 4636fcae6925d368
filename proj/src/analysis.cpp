#include <vector>

#include "biphoton/estimate.hpp"

namespace biphoton {

namespace {

void append(std::vector<double>& out, const MomentSummary& m) {
  out.insert(out.end(), {m.marginal_s, m.marginal_i, m.heralded_s, m.heralded_i, m.rho});
  if (m.width_sum) out.push_back(*m.width_sum);
  if (m.width_diff) out.push_back(*m.width_diff);
}

// Inverse of append, using `shape` to know which optional entries exist.
std::size_t take(const std::vector<double>& in, std::size_t at, const MomentSummary& shape,
                 MomentSummary& out) {
  out.marginal_s = in[at++];
  out.marginal_i = in[at++];
  out.heralded_s = in[at++];
  out.heralded_i = in[at++];
  out.rho = in[at++];
  if (shape.width_sum) out.width_sum = in[at++];
  if (shape.width_diff) out.width_diff = in[at++];
  return at;
}

std::vector<double> flatten(const PointEstimate& p) {
  std::vector<double> out;
  append(out, p.raw);
  append(out, p.deconvolved.summary);
  return out;
}

}  // namespace

PointEstimate estimate_distribution(const CountGrid& counts, const InstrumentResponse& response,
                                    const HeraldedPolicy& policy) {
  const GaussFit1D fit_s = fit_gauss1d(marginal_hist(counts, Photon::Signal));
  const GaussFit1D fit_i = fit_gauss1d(marginal_hist(counts, Photon::Idler));

  PointEstimate p;
  p.center_s = fit_s.center;
  p.center_i = fit_i.center;
  p.raw.marginal_s = fit_s.width;
  p.raw.marginal_i = fit_i.width;
  p.raw.heralded_s = heralded_width(counts, Photon::Signal, policy).width;
  p.raw.heralded_i = heralded_width(counts, Photon::Idler, policy).width;
  p.raw.rho = fit_correlation(counts, fit_s, fit_i).rho;
  if (counts.grid.signal.kind == counts.grid.idler.kind) {
    p.raw.width_sum = fit_gauss1d(rotated_hist(counts, RotatedAxis::Sum)).width;
    p.raw.width_diff = fit_gauss1d(rotated_hist(counts, RotatedAxis::Difference)).width;
  }
  p.deconvolved = deconvolve_summary(p.raw, response);
  return p;
}

FitSummary analyze_distribution(const CountGrid& counts, const InstrumentResponse& response,
                                const AnalysisOptions& options) {
  const PointEstimate point = estimate_distribution(counts, response, options.policy);
  const MonteCarloErrors mc =
      monte_carlo_errors(counts, options.mc_trials, options.seed, [&](const CountGrid& c) {
        return flatten(estimate_distribution(c, response, options.policy));
      });

  FitSummary s;
  s.raw = point.raw;
  s.deconvolved = point.deconvolved.summary;
  s.center_s = point.center_s;
  s.center_i = point.center_i;
  s.rho_clamped = point.deconvolved.rho_clamped;
  s.mc_trials = mc.trials;
  s.mc_failures = mc.failures;
  const std::size_t at = take(mc.stddev, 0, point.raw, s.raw_error);
  take(mc.stddev, at, point.deconvolved.summary, s.deconvolved_error);
  return s;
}

}  // namespace biphoton
