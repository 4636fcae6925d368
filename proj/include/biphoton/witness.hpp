#pragma once

// Entanglement witnesses and the classical bound on dispersed pulse pairs.
// Each witness compares a measured value against the bound obeyed by
// separable states or classical pulses.

#include <string>

namespace biphoton {

enum class Verdict { Violated, NotViolated, Inconclusive };
const char* to_string(Verdict v);

struct Measured {
  double value = 0.0;
  double error = 0.0;
};

struct WitnessReport {
  std::string name;
  double value = 0.0;
  double error = 0.0;
  double threshold = 0.0;
  double k_sigma = 3.0;
  Verdict verdict = Verdict::Inconclusive;
  /// (threshold - value) / error; positive on the violating side.
  double sigma_distance = 0.0;
};

/// Violated when threshold - value > k error, not violated when
/// value - threshold >= k error, inconclusive in between.
Verdict classify(double value, double error, double threshold, double k_sigma);

WitnessReport make_report(std::string name, double value, double error, double threshold,
                          double k_sigma);

/// Delta(w_s + w_i) Delta(t_s - t_i) against 1.
WitnessReport uncertainty_witness(Measured width_sum, Measured time_diff, double k_sigma = 3.0);

/// Delta(w_s - w_i) Delta(t_s + t_i) against 1.
WitnessReport mirrored_uncertainty_witness(Measured width_diff, Measured time_sum,
                                           double k_sigma = 3.0);

/// Heralded bandwidth times heralded pulse width against 1/2.
WitnessReport heralded_tbp_witness(Measured heralded_bandwidth, Measured heralded_duration,
                                   double k_sigma = 3.0);

/// sqrt(dt0^2 + 4 A^2 / dt0^2): the smallest Delta(t_s - t_i) a classical
/// pulse pair of undispersed width dt0 can show after chirps +-A. Throws
/// std::invalid_argument for dt0 <= 0.
double classical_dispersion_bound(double dt0, double chirp);

/// Measured dispersed Delta(t_s - t_i) against the classical bound built
/// from the undispersed width; the bound's error follows from dt0's.
WitnessReport dispersion_witness(Measured time_diff, Measured undispersed, double chirp,
                                 double k_sigma = 3.0);

}  // namespace biphoton
