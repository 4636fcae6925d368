#include <algorithm>
#include <cmath>

#include "biphoton/kernels.hpp"

namespace biphoton::kernels {

namespace {

void exp_quadratic_scalar(const double* y, std::size_t n, double c0, double c1, double c2,
                          double* out) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = std::exp(c0 + y[k] * (c1 + c2 * y[k]));
  }
}

ModelSums exp_quadratic_sums_scalar(const double* y, const double* data, std::size_t n, double c0,
                                    double c1, double c2) {
  ModelSums s;
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::exp(c0 + y[k] * (c1 + c2 * y[k]));
    s.m += m;
    s.mm += m * m;
    s.dm += data[k] * m;
  }
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
  return s;
}

Moments moments_scalar(const double* w, std::size_t n, double x0, double dx) {
  Moments m;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = x0 + static_cast<double>(k) * dx;
    m.w += w[k];
    m.wx += w[k] * x;
    m.wxx += w[k] * x * x;
  }
  return m;
}

void fir_scalar(const double* in, std::size_t n, const double* taps, std::size_t radius,
                double* out) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto r = static_cast<std::ptrdiff_t>(radius);
  for (std::ptrdiff_t k = 0; k < sn; ++k) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(-r, -k);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(r, sn - 1 - k);
    double acc = 0.0;
    for (std::ptrdiff_t t = lo; t <= hi; ++t) acc += taps[t + r] * in[k + t];
    out[k] = acc;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",     exp_quadratic_scalar, exp_quadratic_sums_scalar, axpy_scalar,
      sum_scalar,   dot_scalar,           moments_scalar,            fir_scalar,
  };
  return table;
}

}  // namespace biphoton::kernels
