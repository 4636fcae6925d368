#include <cassert>
#include <cstdlib>
#include <string_view>

#include "biphoton/kernels.hpp"

namespace biphoton::kernels {

#if defined(BIPHOTON_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

const KernelTable* avx2_table() {
#if defined(BIPHOTON_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* forced = std::getenv("BIPHOTON_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

void exp_quadratic(std::span<const double> y, double c0, double c1, double c2,
                   std::span<double> out) {
  assert(y.size() == out.size());
  active().exp_quadratic(y.data(), y.size(), c0, c1, c2, out.data());
}

ModelSums exp_quadratic_sums(std::span<const double> y, std::span<const double> data, double c0,
                             double c1, double c2) {
  assert(y.size() == data.size());
  return active().exp_quadratic_sums(y.data(), data.data(), y.size(), c0, c1, c2);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

Moments moments(std::span<const double> w, double x0, double dx) {
  return active().moments(w.data(), w.size(), x0, dx);
}

void fir(std::span<const double> in, std::span<const double> taps, std::span<double> out) {
  assert(in.size() == out.size());
  assert(taps.size() % 2 == 1);
  active().fir(in.data(), in.size(), taps.data(), taps.size() / 2, out.data());
}

}  // namespace biphoton::kernels
