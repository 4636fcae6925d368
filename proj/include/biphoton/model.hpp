#pragma once

// Closed-form Gaussian two-photon state and its analytic moments.
//
// Units: angular frequency in rad/ps, time in ps, chirp (quadratic spectral
// phase) in ps^2. Every width is an intensity standard deviation (1/sqrt(e)
// half width); FWHM never appears here.

#include <complex>
#include <optional>

namespace biphoton {

/// Speed of light in nm/ps.
inline constexpr double kSpeedOfLight = 299792.458;

/// Compressor chirp per mm of grating displacement, ps^2/mm.
inline constexpr double kSignalChirpPerMm = 1.315e-3;
inline constexpr double kIdlerChirpPerMm = 1.925e-3;

enum class Photon { Signal, Idler };

inline Photon partner(Photon p) { return p == Photon::Signal ? Photon::Idler : Photon::Signal; }
const char* to_string(Photon p);

/// Gaussian joint spectral amplitude with separable quadratic spectral phase.
///
/// The joint spectral intensity is a bivariate normal with standard
/// deviations (sigma_s, sigma_i) and correlation rho. |rho| = 1 is not
/// representable (the amplitude normalization carries (1 - rho^2)^(1/4)).
/// For 1 - rho^2 below ~1e-10 the temporal quantities lose precision; no
/// regularization is applied.
class BiphotonState {
 public:
  BiphotonState(double sigma_s, double sigma_i, double rho, double omega0_s = 0.0,
                double omega0_i = 0.0, double chirp_s = 0.0, double chirp_i = 0.0);

  double sigma_s() const { return sigma_s_; }
  double sigma_i() const { return sigma_i_; }
  double sigma(Photon p) const { return p == Photon::Signal ? sigma_s_ : sigma_i_; }
  double rho() const { return rho_; }
  double omega0_s() const { return omega0_s_; }
  double omega0_i() const { return omega0_i_; }
  double omega0(Photon p) const { return p == Photon::Signal ? omega0_s_ : omega0_i_; }
  double chirp_s() const { return chirp_s_; }
  double chirp_i() const { return chirp_i_; }
  double chirp(Photon p) const { return p == Photon::Signal ? chirp_s_ : chirp_i_; }

  /// Purity of the reduced single-photon state, sqrt(1 - rho^2).
  double purity() const;
  bool chirped() const { return chirp_s_ != 0.0 || chirp_i_ != 0.0; }

  BiphotonState with_chirps(double chirp_s, double chirp_i) const;

  friend bool operator==(const BiphotonState&, const BiphotonState&) = default;

 private:
  double sigma_s_;
  double sigma_i_;
  double rho_;
  double omega0_s_;
  double omega0_i_;
  double chirp_s_;
  double chirp_i_;
};

/// Validating factory; throws std::invalid_argument on non-positive
/// bandwidths, |rho| >= 1 or non-finite inputs.
BiphotonState make_state(double sigma_s, double sigma_i, double rho, double omega0_s,
                         double omega0_i, double chirp_s, double chirp_i);

/// Optical gate used for the temporal measurement. tau_g is the intensity
/// temporal width; the field bandwidth follows as sigma_g = 1 / (2 tau_g).
class GatePulse {
 public:
  explicit GatePulse(double tau_g, double omega_g0 = 0.0);

  double tau_g() const { return tau_g_; }
  double sigma_g() const { return 0.5 / tau_g_; }
  double omega_g0() const { return omega_g0_; }

 private:
  double tau_g_;
  double omega_g0_;
};

/// Widths and correlation of one joint distribution. Units follow the
/// distribution: rad/ps for spectra, ps for temporal plots, mixed for
/// time-frequency plots (which have no sum/difference widths).
struct MomentSummary {
  double marginal_s = 0.0;
  double marginal_i = 0.0;
  double heralded_s = 0.0;
  double heralded_i = 0.0;
  double rho = 0.0;
  std::optional<double> width_sum;
  std::optional<double> width_diff;

  double marginal(Photon p) const { return p == Photon::Signal ? marginal_s : marginal_i; }
  double heralded(Photon p) const { return p == Photon::Signal ? heralded_s : heralded_i; }
};

/// Joint spectral amplitude including the chirp phase
/// exp(i [A_s (w_s - w_s0)^2 + A_i (w_i - w_i0)^2]).
std::complex<double> jsa(const BiphotonState& state, double omega_s, double omega_i);

/// Spectral marginals, heralded widths, correlation and sum/difference
/// widths. Independent of the chirps.
MomentSummary spectral_moments(const BiphotonState& state);

/// Temporal moments of the joint temporal intensity including chirp.
/// Reduces to the transform-limited forms when both chirps vanish; the
/// correlation follows from the marginals and the difference variance.
MomentSummary temporal_moments(const BiphotonState& state);

/// The three contributions to Var(t_s - t_i) under chirp.
struct DifferenceVarianceTerms {
  double fourier_limited;      // chirp-free variance
  double cancellation;         // 4 (A_s s_s + A_i s_i)^2, zero when A_s s_s = -A_i s_i
  double finite_correlation;   // -8 A_s A_i (1 + rho) s_s s_i, zero for rho -> -1
  double total() const { return fourier_limited + cancellation + finite_correlation; }
};
DifferenceVarianceTerms difference_time_variance_terms(const BiphotonState& state);

/// Delta(w_s + w_i) * Delta(t_s - t_i), chirp-aware.
double joint_uncertainty_product(const BiphotonState& state);

/// Delta(w_s - w_i) * Delta(t_s + t_i), chirp-aware.
double mirrored_uncertainty_product(const BiphotonState& state);

/// The four single-photon time-bandwidth products. For a chirp-free state
/// the first two are exactly 1/2; chirp can only increase them.
struct TimeBandwidthProducts {
  double marginal_freq_heralded_time;
  double heralded_freq_marginal_time;
  double marginal_freq_marginal_time;
  double heralded_freq_heralded_time;
};
TimeBandwidthProducts time_bandwidth_products(const BiphotonState& state, Photon photon);

/// Moments of the time-frequency coincidence plot in which `gated_side` is
/// time-resolved by the gate and its partner is spectrally resolved.
/// Phasematching of the gating process is taken as infinitely broad.
struct SpectrogramMoments {
  double partner_bandwidth;   // rad/ps, the partner's marginal bandwidth
  double gated_pulse_width;   // ps, includes the gate width
  double rho_f;               // correlation of (gated time, partner frequency)
};
SpectrogramMoments spectrogram_moments(const BiphotonState& state, const GatePulse& gate,
                                       Photon gated_side);

/// 2 pi c / lambda in rad/ps. Throws on non-positive wavelength.
double wavelength_to_angfreq(double lambda_nm);
/// 2 pi c dlambda / lambda^2 in rad/ps.
double angfreq_resolution(double lambda_nm, double dlambda_nm);
/// Grating displacement (mm) to chirp (ps^2) for the given arm's compressor.
double displacement_to_chirp(double displacement_mm, Photon side);

}  // namespace biphoton
