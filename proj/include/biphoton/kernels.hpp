#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant. The variant is chosen
// once per process from the CPU features; BIPHOTON_KERNELS=scalar forces the
// reference path. Variants agree to rounding (see tests/test_kernels.cpp),
// not bitwise, so byte-level reproducibility holds for a fixed variant.

#include <cstddef>
#include <span>
#include <string_view>

namespace biphoton::kernels {

/// Weighted sums of a uniformly spaced sample: sum w, sum w x, sum w x^2
/// with x = x0 + k dx.
struct Moments {
  double w = 0.0;
  double wx = 0.0;
  double wxx = 0.0;
};

/// Sums needed to profile amplitude and offset out of a linear fit
/// data ~ A * model + b.
struct ModelSums {
  double m = 0.0;    // sum model
  double mm = 0.0;   // sum model^2
  double dm = 0.0;   // sum data * model
};

struct KernelTable {
  std::string_view name;
  // out[k] = exp(c0 + c1 y[k] + c2 y[k]^2)
  void (*exp_quadratic)(const double* y, std::size_t n, double c0, double c1, double c2,
                        double* out);
  // ModelSums over model[k] = exp(c0 + c1 y[k] + c2 y[k]^2) against data[k].
  ModelSums (*exp_quadratic_sums)(const double* y, const double* data, std::size_t n, double c0,
                                  double c1, double c2);
  // y += a x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  Moments (*moments)(const double* w, std::size_t n, double x0, double dx);
  // Same-size zero-padded correlation with a symmetric kernel of
  // 2 * radius + 1 taps: out[k] = sum_t taps[t] in[k + t - radius].
  void (*fir)(const double* in, std::size_t n, const double* taps, std::size_t radius,
              double* out);
};

const KernelTable& scalar_table();
/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();
/// The table used by the span wrappers below.
const KernelTable& active();

// Span wrappers over active(). Sizes must match; checked with assert.
void exp_quadratic(std::span<const double> y, double c0, double c1, double c2,
                   std::span<double> out);
ModelSums exp_quadratic_sums(std::span<const double> y, std::span<const double> data, double c0,
                             double c1, double c2);
void axpy(double a, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
Moments moments(std::span<const double> w, double x0, double dx);
void fir(std::span<const double> in, std::span<const double> taps, std::span<double> out);

}  // namespace biphoton::kernels
