#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "biphoton/estimate.hpp"

namespace biphoton {

double GaussFit1D::operator()(double x) const {
  const double u = (x - center) / width;
  return amplitude * std::exp(-0.5 * u * u) + offset;
}

namespace {

// Parameters in scaled units: x' = (x - x_ref) / x_scale, y' = y / y_scale.
using Params = Eigen::Vector4d;  // amplitude, center, width, offset

double residual_ss(const std::vector<double>& x, const std::vector<double>& y, const Params& p) {
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double u = (x[k] - p[1]) / p[2];
    const double r = y[k] - (p[0] * std::exp(-0.5 * u * u) + p[3]);
    ss += r * r;
  }
  return ss;
}

}  // namespace

GaussFit1D fit_gauss1d(const Hist1D& hist, const GaussFitOptions& options) {
  const std::size_t n = hist.size();
  if (n < 8) throw FitError("gaussian fit needs at least 8 bins");
  if (!(hist.step > 0.0)) throw FitError("histogram step must be positive");

  const auto [min_it, max_it] = std::minmax_element(hist.weights.begin(), hist.weights.end());
  const double wmin = *min_it;
  const double wmax = *max_it;
  if (!(wmax > wmin)) throw FitError("degenerate histogram: flat weights");
  const auto nonempty = std::count_if(hist.weights.begin(), hist.weights.end(),
                                      [&](double w) { return w > wmin; });
  if (nonempty < 3) throw FitError("degenerate histogram: fewer than 3 occupied bins");

  const double x_ref = hist.center(0);
  const double x_scale = hist.step * static_cast<double>(n);
  const double y_scale = wmax - wmin;
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = (hist.center(k) - x_ref) / x_scale;
    y[k] = hist.weights[k] / y_scale;
  }

  // Moments of the excess over the minimum.
  const double base = wmin / y_scale;
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    s0 += y[k] - base;
    s1 += (y[k] - base) * x[k];
  }
  const double mean = s1 / s0;
  double s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) s2 += (y[k] - base) * (x[k] - mean) * (x[k] - mean);
  const double dx = 1.0 / static_cast<double>(n);
  const double width0 = std::max(std::sqrt(s2 / s0), 0.5 * dx);

  Params p(1.0, mean, width0, options.fit_offset ? base : 0.0);
  const int np = options.fit_offset ? 4 : 3;
  double lambda = 1e-3;
  double ss = residual_ss(x, y, p);

  auto result = [&](int iterations) {
    GaussFit1D f;
    f.amplitude = p[0] * y_scale;
    f.center = x_ref + p[1] * x_scale;
    f.width = std::abs(p[2]) * x_scale;
    f.offset = p[3] * y_scale;
    f.residual_norm = std::sqrt(ss) * y_scale;
    f.iterations = iterations;
    return f;
  };

  Eigen::MatrixXd jtj(np, np);
  Eigen::VectorXd jtr(np);
  for (int it = 1; it <= options.max_iterations; ++it) {
    jtj.setZero();
    jtr.setZero();
    for (std::size_t k = 0; k < n; ++k) {
      const double d = x[k] - p[1];
      const double u = d / p[2];
      const double g = std::exp(-0.5 * u * u);
      const double r = y[k] - (p[0] * g + p[3]);
      Eigen::Vector4d jac(g, p[0] * g * d / (p[2] * p[2]), p[0] * g * d * d / (p[2] * p[2] * p[2]),
                          1.0);
      const auto j = jac.head(np);
      jtj.noalias() += j * j.transpose();
      jtr.noalias() += j * r;
    }

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::VectorXd delta = a.ldlt().solve(jtr);
      Params trial = p;
      trial.head(np) += delta;
      const double trial_ss = residual_ss(x, y, trial);
      if (std::isfinite(trial_ss) && trial_ss <= ss) {
        const double rel = delta.norm() / std::max(p.head(np).norm(), 1e-300);
        p = trial;
        ss = trial_ss;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (rel < options.step_tolerance) {
          if (!(p[0] > 0.0)) throw FitError("gaussian fit converged to non-positive amplitude");
          return result(it);
        }
        break;
      }
      lambda *= 10.0;
    }
    // No downhill step at any damping: the current point is a minimum to
    // working precision.
    if (!accepted) {
      if (!(p[0] > 0.0)) throw FitError("gaussian fit converged to non-positive amplitude");
      return result(it);
    }
  }
  throw FitError("gaussian fit did not converge", result(options.max_iterations));
}

}  // namespace biphoton
