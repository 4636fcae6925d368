#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls the closed-form moment code under test.

#include <span>

#include "biphoton/grid.hpp"
#include "biphoton/model.hpp"

namespace oracle {

struct Cov {
  double var_s = 0.0;
  double var_i = 0.0;
  double cov = 0.0;
  double rho() const;
};

/// Integral of |jsa|^2 by tensor Simpson quadrature over +-half_span sigmas.
double jsa_norm(const biphoton::BiphotonState& state, double half_span = 6.0, int n = 801);

/// Spectral covariance straight from the state parameters.
Cov spectral_cov(const biphoton::BiphotonState& state);

/// Exact temporal covariance of the chirped Gaussian: with the amplitude
/// exp(-w^T M w), M = Sigma_w^-1 / 4 - i diag(A), the intensity covariance is
/// (Re M^-1)^-1. Evaluated with explicit complex 2x2 algebra.
Cov temporal_cov(const biphoton::BiphotonState& state);

/// Covariance of (gate delay, partner frequency) from the gated
/// coincidence rate: the gated photon's time profile at each partner
/// frequency is obtained by numerical Fourier quadrature of the jsa, and
/// the gate adds an independent delay of variance tau_g^2.
Cov spectrogram_cov(const biphoton::BiphotonState& state, double tau_g, biphoton::Photon gated);

/// Plain discrete moments of gridded weights (absolute coordinates).
Cov discrete_cov(const biphoton::Grid2D& grid, std::span<const double> values);

/// Conditional standard deviation of the first variable given the second.
double conditional_width(double var_self, double var_other, double cov);

}  // namespace oracle
