#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "biphoton/estimate.hpp"
#include "biphoton/kernels.hpp"
#include "biphoton/parallel.hpp"

namespace biphoton {

HeraldedWidth heralded_width(const CountGrid& counts, Photon photon, const HeraldedPolicy& policy) {
  if (!(policy.min_fraction > 0.0 && policy.min_fraction <= 1.0) || policy.min_slices < 2) {
    throw std::invalid_argument("heralded policy needs min_fraction in (0, 1] and min_slices >= 2");
  }
  const Grid2D& g = counts.grid;
  const Axis& along = g.axis(photon);
  const Axis& fixed = g.axis(partner(photon));

  auto slice = [&](int f) {
    Hist1D h{along.kind, along.coord(0), along.step,
             std::vector<double>(static_cast<std::size_t>(along.n))};
    for (int a = 0; a < along.n; ++a) {
      const std::uint64_t c = photon == Photon::Signal ? counts.at(a, f) : counts.at(f, a);
      h.weights[static_cast<std::size_t>(a)] = static_cast<double>(c);
    }
    return h;
  };

  const Hist1D partner_marginal = marginal_hist(counts, partner(photon));
  double peak = 0.0;
  for (double w : partner_marginal.weights) peak = std::max(peak, w);
  std::vector<int> chosen;
  for (int f = 0; f < fixed.n; ++f) {
    if (peak > 0.0 && partner_marginal.weights[static_cast<std::size_t>(f)] >= policy.min_fraction * peak) {
      chosen.push_back(f);
    }
  }
  if (static_cast<int>(chosen.size()) < policy.min_slices) {
    throw std::runtime_error("heralded width: only " + std::to_string(chosen.size()) +
                             " slices reach the weight threshold");
  }

  std::vector<double> widths(chosen.size());
  for (std::size_t s = 0; s < chosen.size(); ++s) widths[s] = fit_gauss1d(slice(chosen[s])).width;

  const double n = static_cast<double>(widths.size());
  double mean = 0.0;
  for (double w : widths) mean += w;
  mean /= n;
  double var = 0.0;
  for (double w : widths) var += (w - mean) * (w - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n), static_cast<int>(widths.size())};
}

namespace {

class CorrelationObjective {
 public:
  CorrelationObjective(const CountGrid& counts, const GaussFit1D& fit_s, const GaussFit1D& fit_i)
      : ns_(static_cast<std::size_t>(counts.grid.signal.n)),
        ni_(static_cast<std::size_t>(counts.grid.idler.n)),
        data_(counts.as_doubles()),
        xs_(ns_),
        yi_(ni_) {
    if (!(fit_s.width > 0.0) || !(fit_i.width > 0.0)) {
      throw std::invalid_argument("correlation fit needs positive marginal widths");
    }
    for (std::size_t j = 0; j < ns_; ++j) {
      xs_[j] = (counts.grid.signal.coord(static_cast<int>(j)) - fit_s.center) / fit_s.width;
    }
    for (std::size_t k = 0; k < ni_; ++k) {
      yi_[k] = (counts.grid.idler.coord(static_cast<int>(k)) - fit_i.center) / fit_i.width;
    }
    data_sum_ = kernels::sum(data_);
    data_sq_ = kernels::dot(data_, data_);
  }

  // Residual sum of squares with amplitude and offset solved exactly.
  double operator()(double rho) const {
    const double q = 1.0 / ((1.0 - rho) * (1.0 + rho));
    std::vector<kernels::ModelSums> rows(ns_);
    parallel_for(ns_, [&](std::size_t j) {
      const double x = xs_[j];
      rows[j] = kernels::exp_quadratic_sums(yi_, std::span<const double>(data_.data() + j * ni_, ni_),
                                            -0.5 * q * x * x, rho * q * x, -0.5 * q);
    });
    kernels::ModelSums t;
    for (const auto& r : rows) {
      t.m += r.m;
      t.mm += r.mm;
      t.dm += r.dm;
    }
    const double n = static_cast<double>(data_.size());
    const double det = t.mm * n - t.m * t.m;
    if (!(det > 0.0)) return std::numeric_limits<double>::infinity();
    const double a = (t.dm * n - t.m * data_sum_) / det;
    const double b = (t.mm * data_sum_ - t.m * t.dm) / det;
    return std::max(data_sq_ - a * t.dm - b * data_sum_, 0.0);
  }

  // Poisson (sandwich) variance of the minimizer: noise enters the slope of
  // the profiled residual through d(model)/d(rho) with the amplitude and
  // offset directions projected out, each cell weighted by its fitted mean.
  double sandwich_variance(double rho, double curvature) const {
    const double q = 1.0 / ((1.0 - rho) * (1.0 + rho));
    const double n = static_cast<double>(data_.size());
    std::vector<double> m(data_.size()), g(data_.size());
    double sm = 0.0, smm = 0.0, sdm = 0.0, sg = 0.0, sgm = 0.0;
    for (std::size_t j = 0; j < ns_; ++j) {
      for (std::size_t k = 0; k < ni_; ++k) {
        const double x = xs_[j], y = yi_[k];
        const double quad = x * x - 2.0 * rho * x * y + y * y;
        const double mk = std::exp(-0.5 * q * quad);
        const double gk = mk * (q * x * y - rho * q * q * quad);
        const std::size_t c = j * ni_ + k;
        m[c] = mk;
        g[c] = gk;
        sm += mk;
        smm += mk * mk;
        sdm += data_[c] * mk;
        sg += gk;
        sgm += gk * mk;
      }
    }
    const double det = smm * n - sm * sm;
    if (!(det > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double amp = (sdm * n - sm * data_sum_) / det;
    const double off = (smm * data_sum_ - sm * sdm) / det;
    const double alpha = (sgm * n - sm * sg) / det;
    const double beta = (smm * sg - sm * sgm) / det;
    double var_slope = 0.0;
    for (std::size_t c = 0; c < data_.size(); ++c) {
      const double resid_g = g[c] - alpha * m[c] - beta;
      var_slope += resid_g * resid_g * std::max(amp * m[c] + off, 0.0);
    }
    var_slope *= 4.0 * amp * amp;
    return var_slope / (curvature * curvature);
  }

 private:
  std::size_t ns_;
  std::size_t ni_;
  std::vector<double> data_;
  std::vector<double> xs_;
  std::vector<double> yi_;
  double data_sum_ = 0.0;
  double data_sq_ = 0.0;
};

}  // namespace

CorrelationFit fit_correlation(const CountGrid& counts, const GaussFit1D& fit_s,
                               const GaussFit1D& fit_i) {
  const CorrelationObjective ssr(counts, fit_s, fit_i);
  auto in_z = [&](double z) { return ssr(std::tanh(z)); };

  // Coarse scan in z = atanh(rho) to bracket the global minimum, then Brent.
  constexpr double kZMax = 7.0;
  constexpr double kZStep = 0.25;
  const int nz = static_cast<int>(2.0 * kZMax / kZStep) + 1;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nz; ++k) {
    const double v = in_z(-kZMax + k * kZStep);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  if (best == 0 || best == nz - 1) {
    throw std::runtime_error("correlation fit did not converge: minimum at |rho| -> 1");
  }
  const double lo = -kZMax + (best - 1) * kZStep;
  const double hi = -kZMax + (best + 1) * kZStep;

  std::uintmax_t max_iter = 200;
  const auto [z, val] = boost::math::tools::brent_find_minima(in_z, lo, hi, std::numeric_limits<double>::digits / 2, max_iter);
  if (max_iter >= 200) throw std::runtime_error("correlation fit did not converge");

  CorrelationFit out;
  out.rho = std::tanh(z);
  out.residual_norm = std::sqrt(val);

  const double h = 1e-3 * (1.0 - std::abs(out.rho));
  const double curvature = (ssr(out.rho + h) - 2.0 * val + ssr(out.rho - h)) / (h * h);
  out.error = curvature > 0.0 ? std::sqrt(ssr.sandwich_variance(out.rho, curvature))
                              : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace biphoton
