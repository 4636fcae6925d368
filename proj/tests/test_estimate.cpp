#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>

#include "biphoton/estimate.hpp"
#include "biphoton/simulate.hpp"
#include "oracles.hpp"

using namespace biphoton;

namespace {

const BiphotonState kTable1 = make_state(10.56, 9.69, -0.9951, 2586.9, 2276.9, 0.0, 0.0);
const GatePulse kGate(0.120);
const InstrumentResponse kSpectral{angfreq_resolution(728.6, 0.081), angfreq_resolution(827.3, 0.135)};
const InstrumentResponse kTemporal{0.120, 0.120};

CountGrid simulate(const BiphotonState& s, Measurement m, const InstrumentResponse& r, double total,
                   std::uint64_t seed, int n = 128) {
  const Grid2D g = with_shared_step(make_grid(s, m, 4.0, n));
  return draw_counts(observed_intensity(s, kGate, m, g, r), total, seed);
}

Hist1D gaussian_hist(double amplitude, double center, double width, double first, double step, int n) {
  Hist1D h{AxisKind::Time, first, step, std::vector<double>(static_cast<std::size_t>(n))};
  for (int k = 0; k < n; ++k) {
    const double u = (h.center(k) - center) / width;
    h.weights[k] = amplitude * std::exp(-0.5 * u * u);
  }
  return h;
}

MomentSummary from_cov(const oracle::Cov& c) {
  MomentSummary m;
  m.marginal_s = std::sqrt(c.var_s);
  m.marginal_i = std::sqrt(c.var_i);
  m.heralded_s = oracle::conditional_width(c.var_s, c.var_i, c.cov);
  m.heralded_i = oracle::conditional_width(c.var_i, c.var_s, c.cov);
  m.rho = c.rho();
  m.width_sum = std::sqrt(c.var_s + c.var_i + 2 * c.cov);
  m.width_diff = std::sqrt(c.var_s + c.var_i - 2 * c.cov);
  return m;
}

}  // namespace

TEST_SUITE("estimate") {

TEST_CASE("marginal histograms") {
  const CountGrid c = simulate(kTable1, Measurement::JointSpectrum, {}, 1e6, 1);
  const Hist1D hs = marginal_hist(c, Photon::Signal);
  const Hist1D hi = marginal_hist(c, Photon::Idler);
  CHECK(hs.total() == static_cast<double>(c.total()));
  CHECK(hi.total() == static_cast<double>(c.total()));
  CHECK(hs.first_center == c.grid.signal.coord(0));
  CHECK(fit_gauss1d(hs).width == doctest::Approx(10.56).epsilon(0.02));

  const BiphotonState sep = make_state(3.0, 5.0, 0.0, 0, 0, 0, 0);
  const Intensity2D f = joint_spectral_intensity(sep, make_grid(sep, Measurement::JointSpectrum));
  const Hist1D m = marginal_hist(f.grid, f.values, Photon::Idler);
  double norm = 0.0;
  for (int k = 0; k < f.grid.idler.n; ++k) norm += std::exp(-0.5 * std::pow(f.grid.idler.offset(k) / 5.0, 2));
  for (int k = 0; k < f.grid.idler.n; ++k) {
    CHECK(m.weights[k] == doctest::Approx(std::exp(-0.5 * std::pow(f.grid.idler.offset(k) / 5.0, 2)) / norm).epsilon(1e-12));
  }
}

TEST_CASE("rotated histograms") {
  Grid2D g{make_axis(AxisKind::Frequency, 10.0, 1.0, 4.0, 16), make_axis(AxisKind::Frequency, 3.0, 1.0, 4.0, 16)};
  g = with_shared_step(g);
  CountGrid one;
  one.grid = g;
  one.counts.assign(g.size(), 0);
  one.counts[g.index(5, 9)] = 17;
  const Hist1D s = rotated_hist(one, RotatedAxis::Sum);
  int occupied = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.weights[k] > 0) {
      ++occupied;
      CHECK(s.center(k) == doctest::Approx(g.signal.coord(5) + g.idler.coord(9)).epsilon(1e-12));
      CHECK(s.weights[k] == 17.0);
    }
  }
  CHECK(occupied == 1);

  const CountGrid c = simulate(kTable1, Measurement::JointSpectrum, kSpectral, 1e6, 2);
  const Hist1D sum = rotated_hist(c, RotatedAxis::Sum);
  const Hist1D diff = rotated_hist(c, RotatedAxis::Difference);
  CHECK(sum.total() == static_cast<double>(c.total()));
  CHECK(diff.total() == static_cast<double>(c.total()));
  const double ws = fit_gauss1d(sum).width;
  const double wd = fit_gauss1d(diff).width;
  CHECK(ws == doctest::Approx(1.429).epsilon(0.02));
  const double ms = fit_gauss1d(marginal_hist(c, Photon::Signal)).width;
  const double mi = fit_gauss1d(marginal_hist(c, Photon::Idler)).width;
  CHECK(ws * ws + wd * wd == doctest::Approx(2.0 * (ms * ms + mi * mi)).epsilon(0.02));

  CountGrid mixed = c;
  mixed.grid.idler.kind = AxisKind::Time;
  CHECK_THROWS_AS(rotated_hist(mixed, RotatedAxis::Sum), std::invalid_argument);
}

TEST_CASE("gaussian fit on noiseless data at any bin phase") {
  for (double phase : {0.0, 0.13, 0.5, 0.77}) {
    CAPTURE(phase);
    const Hist1D h = gaussian_hist(250.0, 1.0 + phase * 0.05, 0.4, -1.0, 0.05, 64);
    const GaussFit1D f = fit_gauss1d(h);
    CHECK(f.amplitude == doctest::Approx(250.0).epsilon(1e-9));
    CHECK(f.center == doctest::Approx(1.0 + phase * 0.05).epsilon(1e-9));
    CHECK(f.width == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(std::abs(f.offset) < 1e-9 * 250.0);
    const GaussFit1D g = fit_gauss1d(h, {.fit_offset = false});
    CHECK(g.width == doctest::Approx(0.4).epsilon(1e-9));
    CHECK(g.offset == 0.0);
  }
}

TEST_CASE("gaussian fit under Poisson noise") {
  // Width scatter calibrated by repeated draws.
  const double total = 1e5, width = 0.4, step = 0.05;
  const Hist1D shape = gaussian_hist(1.0, 0.0, width, -1.6, step, 65);
  const double norm = shape.total();
  std::mt19937_64 rng(77);
  std::vector<double> widths;
  for (int r = 0; r < 200; ++r) {
    Hist1D h = shape;
    for (double& w : h.weights) w = static_cast<double>(std::poisson_distribution<long>(total * w / norm)(rng));
    widths.push_back(fit_gauss1d(h).width);
  }
  double mean = 0.0, var = 0.0;
  for (double w : widths) mean += w;
  mean /= widths.size();
  for (double w : widths) var += (w - mean) * (w - mean);
  const double se = std::sqrt(var / (widths.size() - 1));
  CHECK(std::abs(widths.front() - width) < 3.0 * se);
  CHECK(std::abs(mean - width) < 3.0 * se / std::sqrt(static_cast<double>(widths.size())));
}

TEST_CASE("gaussian fit failures") {
  Hist1D flat{AxisKind::Time, 0.0, 1.0, std::vector<double>(20, 5.0)};
  CHECK_THROWS_AS(fit_gauss1d(flat), FitError);
  Hist1D spike{AxisKind::Time, 0.0, 1.0, std::vector<double>(20, 0.0)};
  spike.weights[7] = 100.0;
  CHECK_THROWS_AS(fit_gauss1d(spike), FitError);
  Hist1D tiny = gaussian_hist(1.0, 0.0, 1.0, -2.0, 1.0, 5);
  CHECK_THROWS_AS(fit_gauss1d(tiny), FitError);

  Hist1D noisy = gaussian_hist(100.0, 0.3, 0.5, -2.0, 0.1, 40);
  for (std::size_t k = 0; k < noisy.size(); ++k) noisy.weights[k] += (k % 3) * 2.0;
  try {
    fit_gauss1d(noisy, {.max_iterations = 1});
    FAIL("expected non-convergence");
  } catch (const FitError& e) {
    REQUIRE(e.last().has_value());
    CHECK(e.last()->width > 0.0);
    CHECK(e.last()->iterations == 1);
  }
}

TEST_CASE("heralded widths") {
  const BiphotonState sep = make_state(3.0, 5.0, 0.0, 0, 0, 0, 0);
  const Intensity2D f = joint_spectral_intensity(sep, make_grid(sep, Measurement::JointSpectrum));
  CountGrid exact;
  exact.grid = f.grid;
  exact.counts.resize(f.grid.size());
  for (std::size_t k = 0; k < f.values.size(); ++k) exact.counts[k] = static_cast<std::uint64_t>(std::llround(1e12 * f.values[k]));
  const HeraldedWidth h = heralded_width(exact, Photon::Signal);
  CHECK(h.width == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(h.slices >= 3);

  const CountGrid c = simulate(kTable1, Measurement::JointSpectrum, kSpectral, 1e6, 3);
  CHECK(heralded_width(c, Photon::Signal).width == doctest::Approx(1.16).epsilon(0.05));

  const BiphotonState tight = make_state(10.0, 10.0, -0.999, 0, 0, 0, 0);
  const CountGrid t = simulate(tight, Measurement::JointSpectrum, {}, 1e7, 4, 512);
  const double ratio = heralded_width(t, Photon::Signal).width / fit_gauss1d(marginal_hist(t, Photon::Signal)).width;
  CHECK(ratio == doctest::Approx(std::sqrt(1.0 - 0.999 * 0.999)).epsilon(0.1));

  CHECK_THROWS_AS(heralded_width(c, Photon::Signal, {1.0, 3}), std::runtime_error);
  CHECK_THROWS_AS(heralded_width(c, Photon::Signal, {0.0, 3}), std::invalid_argument);
}

TEST_CASE("correlation fit") {
  const BiphotonState sep = make_state(3.0, 5.0, 0.0, 0, 0, 0, 0);
  const CountGrid s = simulate(sep, Measurement::JointSpectrum, {}, 1e6, 5);
  const CorrelationFit fs = fit_correlation(s, fit_gauss1d(marginal_hist(s, Photon::Signal)),
                                            fit_gauss1d(marginal_hist(s, Photon::Idler)));
  CHECK(std::abs(fs.rho) < 3.0 * fs.error);
  CHECK(fs.error > 0.0);
  const Estimator rho_only = [](const CountGrid& g) {
    return std::vector<double>{fit_correlation(g, fit_gauss1d(marginal_hist(g, Photon::Signal)),
                                               fit_gauss1d(marginal_hist(g, Photon::Idler))).rho};
  };
  CHECK(fs.error == doctest::Approx(monte_carlo_errors(s, 100, 1, rho_only).stddev[0]).epsilon(0.2));

  const CountGrid jt = simulate(kTable1, Measurement::JointTemporal, kTemporal, 1e6, 6);
  const double rt = fit_correlation(jt, fit_gauss1d(marginal_hist(jt, Photon::Signal)),
                                    fit_gauss1d(marginal_hist(jt, Photon::Idler))).rho;
  CHECK(rt == doctest::Approx(0.944).epsilon(0.01));
  const CountGrid js = simulate(kTable1, Measurement::JointSpectrum, kSpectral, 1e6, 7);
  const double rw = fit_correlation(js, fit_gauss1d(marginal_hist(js, Photon::Signal)),
                                    fit_gauss1d(marginal_hist(js, Photon::Idler))).rho;
  CHECK(rw < -0.99);
  CHECK(rt > 0.9);

  GaussFit1D bad;
  CHECK_THROWS_AS(fit_correlation(js, bad, bad), std::invalid_argument);
}

TEST_CASE("deconvolve_width") {
  CHECK(deconvolve_width(0.550, 0.120) == doctest::Approx(0.537).epsilon(1e-3));
  CHECK(deconvolve_width(0.203, 0.1697) == doctest::Approx(0.111).epsilon(1e-2));
  CHECK(deconvolve_width(0.3, 0.0) == 0.3);
  CHECK_THROWS_AS(deconvolve_width(0.1, 0.2), ResolutionLimited);
  CHECK_THROWS_AS(deconvolve_width(0.2, 0.2), ResolutionLimited);
  CHECK_THROWS_AS(deconvolve_width(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(deconvolve_width(0.3, -0.1), std::invalid_argument);
  try {
    deconvolve_width(0.1, 0.2);
  } catch (const ResolutionLimited& e) {
    CHECK(std::string(e.what()).find("resolution-limited") != std::string::npos);
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int k = 0; k < 1000; ++k) {
    const double w = u(rng), r = u(rng);
    // Rounding of the quadrature sum is amplified by (r / w)^2 on the way back.
    const double tol = 4e-16 * (1.0 + (r / w) * (r / w));
    CHECK(deconvolve_width(std::sqrt(w * w + r * r), r) == doctest::Approx(w).epsilon(tol));
  }
}

TEST_CASE("deconvolve_summary") {
  MomentSummary t;
  t.marginal_s = 0.550;
  t.marginal_i = 0.600;
  t.heralded_s = 0.5;
  t.heralded_i = 0.5;
  t.rho = 0.944;
  const DeconvolvedSummary d = deconvolve_summary(t, {std::sqrt(0.550 * 0.550 - 0.537 * 0.537),
                                                       std::sqrt(0.600 * 0.600 - 0.587 * 0.587)});
  CHECK(d.summary.marginal_s == doctest::Approx(0.537).epsilon(1e-12));
  CHECK(d.summary.rho == doctest::Approx(0.988).epsilon(5e-4));
  CHECK_FALSE(d.rho_clamped);
  CHECK_FALSE(d.summary.width_sum.has_value());

  MomentSummary w;
  w.marginal_s = 10.57;
  w.marginal_i = 9.69;
  w.heralded_s = 1.2;
  w.heralded_i = 1.1;
  w.rho = -0.9939;
  w.width_sum = 1.5;
  w.width_diff = 20.0;
  const DeconvolvedSummary ds = deconvolve_summary(w, {std::sqrt(10.57 * 10.57 - 10.56 * 10.56), 0.0});
  CHECK(ds.summary.rho == doctest::Approx(-0.9948).epsilon(1e-4));

  const DeconvolvedSummary id = deconvolve_summary(w, {});
  CHECK(id.summary.marginal_s == w.marginal_s);
  CHECK(id.summary.heralded_i == w.heralded_i);
  CHECK(id.summary.rho == w.rho);
  CHECK(*id.summary.width_sum == *w.width_sum);

  MomentSummary tight = t;
  tight.rho = 0.9999;
  const DeconvolvedSummary c = deconvolve_summary(tight, {0.3, 0.3});
  CHECK(c.rho_clamped);
  CHECK(c.summary.rho == doctest::Approx(1.0 - 1e-9).epsilon(1e-15));
}

TEST_CASE("deconvolution inverts Gaussian responses exactly") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> width(0.2, 2.0), rho(-0.995, 0.995), res(0.0, 0.3);
  for (int k = 0; k < 200; ++k) {
    const oracle::Cov truth{std::pow(width(rng), 2), std::pow(width(rng), 2), 0.0};
    const oracle::Cov t{truth.var_s, truth.var_i, rho(rng) * std::sqrt(truth.var_s * truth.var_i)};
    const InstrumentResponse r{res(rng), res(rng)};
    const oracle::Cov blurred{t.var_s + r.res_s * r.res_s, t.var_i + r.res_i * r.res_i, t.cov};
    const MomentSummary want = from_cov(t);
    const DeconvolvedSummary got = deconvolve_summary(from_cov(blurred), r);
    CHECK(got.summary.marginal_s == doctest::Approx(want.marginal_s).epsilon(1e-12));
    CHECK(got.summary.heralded_s == doctest::Approx(want.heralded_s).epsilon(1e-9));
    CHECK(got.summary.heralded_i == doctest::Approx(want.heralded_i).epsilon(1e-9));
    CHECK(got.summary.rho == doctest::Approx(want.rho).epsilon(1e-12));
    CHECK(*got.summary.width_sum == doctest::Approx(*want.width_sum).epsilon(1e-9));
    CHECK(*got.summary.width_diff == doctest::Approx(*want.width_diff).epsilon(1e-9));
  }
}

TEST_CASE("Monte-Carlo errors") {
  const CountGrid c = simulate(kTable1, Measurement::JointSpectrum, kSpectral, 1e6, 10);
  const Estimator marginal = [](const CountGrid& g) {
    return std::vector<double>{fit_gauss1d(marginal_hist(g, Photon::Signal)).width};
  };
  CHECK_THROWS_AS(monte_carlo_errors(c, 1, 1, marginal), std::invalid_argument);
  const MonteCarloErrors a = monte_carlo_errors(c, 100, 11, marginal);
  const MonteCarloErrors b = monte_carlo_errors(c, 100, 11, marginal);
  CHECK(a.stddev == b.stddev);
  CHECK(a.failures == 0);

  const CountGrid big = simulate(kTable1, Measurement::JointSpectrum, kSpectral, 1e8, 10);
  const MonteCarloErrors e = monte_carlo_errors(big, 100, 11, marginal);
  const double ratio = a.stddev[0] / e.stddev[0];
  CHECK(ratio > 8.0);
  CHECK(ratio < 12.0);

  std::atomic<int> calls{0};
  const Estimator flaky = [&](const CountGrid& g) {
    if (calls.fetch_add(1) % 3 == 0) throw std::runtime_error("synthetic failure");
    return marginal(g);
  };
  CHECK_THROWS_AS(monte_carlo_errors(c, 60, 1, flaky), std::runtime_error);
}

TEST_CASE("Monte-Carlo error magnitude at Table I scale") {
  const CountGrid js = simulate(kTable1, Measurement::JointSpectrum, kSpectral, 1e6, 12);
  const CountGrid jt = simulate(kTable1, Measurement::JointTemporal, kTemporal, 1e6, 13);
  const FitSummary fs = analyze_distribution(js, kSpectral, {.policy = {}, .mc_trials = 50, .seed = 1});
  const FitSummary ft = analyze_distribution(jt, kTemporal, {.policy = {}, .mc_trials = 50, .seed = 2});
  CHECK(fs.raw_error.rho > 1e-6);
  CHECK(fs.raw_error.rho < 1e-2);
  CHECK(ft.raw_error.rho > 1e-5);
  CHECK(ft.raw_error.rho < 1e-2);
  CHECK(fs.deconvolved.marginal_s <= fs.raw.marginal_s);
  CHECK(*ft.deconvolved.width_diff <= *ft.raw.width_diff);
  CHECK(fs.mc_trials == 50);
}

TEST_CASE("round trip over random states") {
  // Deconvolved entries against truth in units of their Monte-Carlo standard
  // errors. With 280 comparisons a 3-sigma gate is expected to be crossed
  // about 0.8 times by chance, so the gate is: at most 3 entries beyond 3 SE
  // (binomial tail < 1%), none beyond 4 SE, and calibrated scatter.
  std::mt19937_64 rng(2024);
  double z_sum = 0.0, z_sq = 0.0;
  std::uniform_real_distribution<double> sig(5.0, 12.0), rho(-0.995, 0.9), chirp(-0.05, 0.05);
  int checked = 0, outside = 0;
  for (int r = 0; r < 20; ++r) {
    const BiphotonState s = make_state(sig(rng), sig(rng), rho(rng), 0, 0, chirp(rng), chirp(rng));
    for (Measurement m : {Measurement::JointSpectrum, Measurement::JointTemporal}) {
      const bool spectral = m == Measurement::JointSpectrum;
      const InstrumentResponse resp = spectral ? kSpectral : kTemporal;
      const CountGrid c = simulate(s, m, resp, 1e6, 100 + r);
      const FitSummary f = analyze_distribution(c, resp, {.policy = {}, .mc_trials = 50, .seed = 200u + r});
      const MomentSummary truth = spectral ? spectral_moments(s) : temporal_moments(s);
      const MomentSummary& got = f.deconvolved;
      const MomentSummary& err = f.deconvolved_error;
      auto check = [&](const std::string& what, double g, double t, double e) {
        CAPTURE(r);
        CAPTURE(what);
        CAPTURE(s.rho());
        CAPTURE(spectral);
        const double z = (g - t) / e;
        ++checked;
        z_sum += z;
        z_sq += z * z;
        if (std::abs(z) > 3.0) ++outside;
        CHECK(e > 0.0);
        CHECK(std::abs(z) <= 4.0);
      };
      check("marginal_s", got.marginal_s, truth.marginal_s, err.marginal_s);
      check("marginal_i", got.marginal_i, truth.marginal_i, err.marginal_i);
      check("heralded_s", got.heralded_s, truth.heralded_s, err.heralded_s);
      check("heralded_i", got.heralded_i, truth.heralded_i, err.heralded_i);
      check("rho", got.rho, truth.rho, err.rho);
      check("width_sum", *got.width_sum, *truth.width_sum, *err.width_sum);
      check("width_diff", *got.width_diff, *truth.width_diff, *err.width_diff);
    }
  }
  const double mean = z_sum / checked;
  const double rms = std::sqrt(z_sq / checked);
  MESSAGE(checked << " entries, " << outside << " beyond 3 SE, mean z " << mean << ", rms z " << rms);
  CHECK(checked == 280);
  CHECK(outside <= 3);
  CHECK(std::abs(mean) < 0.2);
  CHECK(rms > 0.85);
  CHECK(rms < 1.15);
}

}  // TEST_SUITE
