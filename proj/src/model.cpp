#include "biphoton/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace biphoton {

namespace {

double one_minus_rho2(double rho) { return (1.0 - rho) * (1.0 + rho); }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite");
  }
}

// Heralded temporal width of `p` under chirp; the partner quantities enter
// through the cross term.
double chirped_heralded_time(double s_p, double s_q, double a_p, double a_q, double rho) {
  const double q = one_minus_rho2(rho);
  const double cross = a_p * s_p * s_p + a_q * s_q * s_q;
  const double denom = s_p * s_p * (1.0 + 16.0 * a_q * a_q * q * s_q * s_q * s_q * s_q);
  return std::sqrt(1.0 / (4.0 * s_p * s_p) + 4.0 * a_p * a_p * q * s_p * s_p +
                   4.0 * rho * rho * cross * cross / denom);
}

double chirped_marginal_time(double s, double a, double rho) {
  return std::sqrt(1.0 / (4.0 * one_minus_rho2(rho) * s * s) + 4.0 * a * a * s * s);
}

}  // namespace

const char* to_string(Photon p) { return p == Photon::Signal ? "signal" : "idler"; }

BiphotonState::BiphotonState(double sigma_s, double sigma_i, double rho, double omega0_s,
                             double omega0_i, double chirp_s, double chirp_i)
    : sigma_s_(sigma_s),
      sigma_i_(sigma_i),
      rho_(rho),
      omega0_s_(omega0_s),
      omega0_i_(omega0_i),
      chirp_s_(chirp_s),
      chirp_i_(chirp_i) {
  require_finite(sigma_s, "sigma_s");
  require_finite(sigma_i, "sigma_i");
  require_finite(rho, "rho");
  require_finite(omega0_s, "omega0_s");
  require_finite(omega0_i, "omega0_i");
  require_finite(chirp_s, "chirp_s");
  require_finite(chirp_i, "chirp_i");
  if (sigma_s <= 0.0 || sigma_i <= 0.0) {
    throw std::invalid_argument("bandwidths must be positive");
  }
  if (std::abs(rho) >= 1.0) {
    throw std::invalid_argument("|rho| must be < 1: the state is not normalizable");
  }
}

double BiphotonState::purity() const { return std::sqrt(one_minus_rho2(rho_)); }

BiphotonState BiphotonState::with_chirps(double chirp_s, double chirp_i) const {
  return BiphotonState(sigma_s_, sigma_i_, rho_, omega0_s_, omega0_i_, chirp_s, chirp_i);
}

BiphotonState make_state(double sigma_s, double sigma_i, double rho, double omega0_s,
                         double omega0_i, double chirp_s, double chirp_i) {
  return BiphotonState(sigma_s, sigma_i, rho, omega0_s, omega0_i, chirp_s, chirp_i);
}

GatePulse::GatePulse(double tau_g, double omega_g0) : tau_g_(tau_g), omega_g0_(omega_g0) {
  if (!std::isfinite(tau_g) || tau_g <= 0.0) {
    throw std::invalid_argument("gate width tau_g must be positive");
  }
  require_finite(omega_g0, "omega_g0");
}

std::complex<double> jsa(const BiphotonState& state, double omega_s, double omega_i) {
  const double ss = state.sigma_s();
  const double si = state.sigma_i();
  const double rho = state.rho();
  const double q = one_minus_rho2(rho);
  const double x = omega_s - state.omega0_s();
  const double y = omega_i - state.omega0_i();

  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi * ss * si) * std::pow(q, 0.25));
  const double quad = x * x / (2.0 * ss * ss) + y * y / (2.0 * si * si) - rho * x * y / (ss * si);
  const double magnitude = norm * std::exp(-quad / (2.0 * q));
  const double phase = state.chirp_s() * x * x + state.chirp_i() * y * y;
  return std::polar(magnitude, phase);
}

MomentSummary spectral_moments(const BiphotonState& state) {
  const double ss = state.sigma_s();
  const double si = state.sigma_i();
  const double rho = state.rho();
  const double purity = state.purity();

  MomentSummary m;
  m.marginal_s = ss;
  m.marginal_i = si;
  m.heralded_s = purity * ss;
  m.heralded_i = purity * si;
  m.rho = rho;
  m.width_sum = std::sqrt(ss * ss + 2.0 * rho * ss * si + si * si);
  m.width_diff = std::sqrt(ss * ss - 2.0 * rho * ss * si + si * si);
  return m;
}

DifferenceVarianceTerms difference_time_variance_terms(const BiphotonState& state) {
  const double ss = state.sigma_s();
  const double si = state.sigma_i();
  const double rho = state.rho();
  const double as = state.chirp_s();
  const double ai = state.chirp_i();

  DifferenceVarianceTerms t{};
  t.fourier_limited = (ss * ss + 2.0 * rho * ss * si + si * si) /
                      (4.0 * one_minus_rho2(rho) * ss * ss * si * si);
  const double balance = as * ss + ai * si;
  t.cancellation = 4.0 * balance * balance;
  t.finite_correlation = -8.0 * as * ai * (1.0 + rho) * ss * si;
  return t;
}

MomentSummary temporal_moments(const BiphotonState& state) {
  const double ss = state.sigma_s();
  const double si = state.sigma_i();
  const double rho = state.rho();
  const double as = state.chirp_s();
  const double ai = state.chirp_i();

  MomentSummary m;
  m.marginal_s = chirped_marginal_time(ss, as, rho);
  m.marginal_i = chirped_marginal_time(si, ai, rho);
  m.heralded_s = chirped_heralded_time(ss, si, as, ai, rho);
  m.heralded_i = chirped_heralded_time(si, ss, ai, as, rho);

  const double var_diff = difference_time_variance_terms(state).total();
  const double ms2 = m.marginal_s * m.marginal_s;
  const double mi2 = m.marginal_i * m.marginal_i;
  m.rho = (ms2 + mi2 - var_diff) / (2.0 * m.marginal_s * m.marginal_i);
  m.width_diff = std::sqrt(var_diff);
  m.width_sum = std::sqrt(2.0 * (ms2 + mi2) - var_diff);
  return m;
}

double joint_uncertainty_product(const BiphotonState& state) {
  return *spectral_moments(state).width_sum * *temporal_moments(state).width_diff;
}

double mirrored_uncertainty_product(const BiphotonState& state) {
  return *spectral_moments(state).width_diff * *temporal_moments(state).width_sum;
}

TimeBandwidthProducts time_bandwidth_products(const BiphotonState& state, Photon photon) {
  const MomentSummary w = spectral_moments(state);
  const MomentSummary t = temporal_moments(state);
  return {w.marginal(photon) * t.heralded(photon), w.heralded(photon) * t.marginal(photon),
          w.marginal(photon) * t.marginal(photon), w.heralded(photon) * t.heralded(photon)};
}

SpectrogramMoments spectrogram_moments(const BiphotonState& state, const GatePulse& gate,
                                       Photon gated_side) {
  const double s = state.sigma(gated_side);
  const double a = state.chirp(gated_side);
  const double rho = state.rho();
  const double q = one_minus_rho2(rho);
  const double sg = gate.sigma_g();

  SpectrogramMoments out{};
  out.partner_bandwidth = state.sigma(partner(gated_side));
  out.gated_pulse_width =
      std::sqrt(1.0 / (4.0 * sg * sg) + 1.0 / (4.0 * q * s * s) + 4.0 * a * a * s * s);
  const double num = -4.0 * a * rho * std::sqrt(q) * sg * s * s;
  const double den = std::sqrt(q * s * s + sg * sg * (1.0 + 16.0 * a * a * q * s * s * s * s));
  out.rho_f = num / den;
  return out;
}

double wavelength_to_angfreq(double lambda_nm) {
  if (!(lambda_nm > 0.0) || !std::isfinite(lambda_nm)) {
    throw std::invalid_argument("wavelength must be positive");
  }
  return 2.0 * std::numbers::pi * kSpeedOfLight / lambda_nm;
}

double angfreq_resolution(double lambda_nm, double dlambda_nm) {
  if (!(lambda_nm > 0.0) || !std::isfinite(lambda_nm)) {
    throw std::invalid_argument("wavelength must be positive");
  }
  if (!(dlambda_nm >= 0.0)) {
    throw std::invalid_argument("wavelength resolution must be non-negative");
  }
  return 2.0 * std::numbers::pi * kSpeedOfLight * dlambda_nm / (lambda_nm * lambda_nm);
}

double displacement_to_chirp(double displacement_mm, Photon side) {
  require_finite(displacement_mm, "displacement");
  return displacement_mm * (side == Photon::Signal ? kSignalChirpPerMm : kIdlerChirpPerMm);
}

}  // namespace biphoton
