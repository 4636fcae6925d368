#include "biphoton/witness.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace biphoton {

namespace {

void require_positive(const Measured& m, const char* what) {
  if (!(m.value > 0.0) || !std::isfinite(m.value)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
  if (!(m.error >= 0.0)) throw std::invalid_argument(std::string(what) + " error must be >= 0");
}

WitnessReport product_witness(const char* name, Measured a, Measured b, double threshold,
                              double k_sigma) {
  const double value = a.value * b.value;
  const double error = value * std::hypot(a.error / a.value, b.error / b.value);
  return make_report(name, value, error, threshold, k_sigma);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Violated: return "violated";
    case Verdict::NotViolated: return "not violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict classify(double value, double error, double threshold, double k_sigma) {
  if (!(k_sigma >= 0.0)) throw std::invalid_argument("k_sigma must be non-negative");
  const double margin = threshold - value;
  if (margin > k_sigma * error) return Verdict::Violated;
  if (-margin >= k_sigma * error) return Verdict::NotViolated;
  return Verdict::Inconclusive;
}

WitnessReport make_report(std::string name, double value, double error, double threshold,
                          double k_sigma) {
  WitnessReport r;
  r.name = std::move(name);
  r.value = value;
  r.error = error;
  r.threshold = threshold;
  r.k_sigma = k_sigma;
  r.verdict = classify(value, error, threshold, k_sigma);
  const double margin = threshold - value;
  if (error > 0.0) {
    r.sigma_distance = margin / error;
  } else {
    r.sigma_distance = margin == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), margin);
  }
  return r;
}

WitnessReport uncertainty_witness(Measured width_sum, Measured time_diff, double k_sigma) {
  require_positive(width_sum, "sum-frequency width");
  require_positive(time_diff, "time-difference width");
  return product_witness("joint_uncertainty", width_sum, time_diff, 1.0, k_sigma);
}

WitnessReport mirrored_uncertainty_witness(Measured width_diff, Measured time_sum,
                                           double k_sigma) {
  require_positive(width_diff, "difference-frequency width");
  require_positive(time_sum, "time-sum width");
  return product_witness("mirrored_uncertainty", width_diff, time_sum, 1.0, k_sigma);
}

WitnessReport heralded_tbp_witness(Measured heralded_bandwidth, Measured heralded_duration,
                                   double k_sigma) {
  require_positive(heralded_bandwidth, "heralded bandwidth");
  require_positive(heralded_duration, "heralded duration");
  return product_witness("heralded_tbp", heralded_bandwidth, heralded_duration, 0.5, k_sigma);
}

double classical_dispersion_bound(double dt0, double chirp) {
  if (!(dt0 > 0.0) || !std::isfinite(dt0)) {
    throw std::invalid_argument("undispersed width must be positive");
  }
  return std::sqrt(dt0 * dt0 + 4.0 * chirp * chirp / (dt0 * dt0));
}

WitnessReport dispersion_witness(Measured time_diff, Measured undispersed, double chirp,
                                 double k_sigma) {
  require_positive(time_diff, "dispersed time-difference width");
  require_positive(undispersed, "undispersed time-difference width");
  const double dt0 = undispersed.value;
  const double bound = classical_dispersion_bound(dt0, chirp);
  // d bound / d dt0 = (dt0 - 4 A^2 / dt0^3) / bound
  const double slope = (dt0 - 4.0 * chirp * chirp / (dt0 * dt0 * dt0)) / bound;
  const double error = std::hypot(time_diff.error, slope * undispersed.error);
  return make_report("dispersion_cancellation", time_diff.value, error, bound, k_sigma);
}

}  // namespace biphoton
