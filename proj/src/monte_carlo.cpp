#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "biphoton/estimate.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/random.hpp"
#include "biphoton/simulate.hpp"

namespace biphoton {

namespace {
constexpr std::uint64_t kTrialDomain = 0x4d6f6e7465436172ULL;
}

MonteCarloErrors monte_carlo_errors(const CountGrid& counts, int n_trials, std::uint64_t seed,
                                    const Estimator& estimator) {
  if (n_trials < 50) throw std::invalid_argument("Monte-Carlo errors need at least 50 trials");

  std::vector<std::optional<std::vector<double>>> results(static_cast<std::size_t>(n_trials));
  parallel_for(results.size(), [&](std::size_t t) {
    try {
      const CountGrid trial = resample_counts(counts, derive_seed(seed, kTrialDomain, t));
      std::vector<double> r = estimator(trial);
      for (double v : r) {
        if (!std::isfinite(v)) return;
      }
      results[t] = std::move(r);
    } catch (const std::exception&) {
      // Counted as a failed trial below.
    }
  });

  MonteCarloErrors out;
  out.trials = n_trials;
  std::size_t width = 0;
  int ok = 0;
  for (const auto& r : results) {
    if (!r) continue;
    if (ok == 0) width = r->size();
    if (r->size() != width) throw std::logic_error("estimator output size varies between trials");
    ++ok;
  }
  out.failures = n_trials - ok;
  if (out.failures * 5 > n_trials) {
    throw std::runtime_error("Monte-Carlo estimator failed in " + std::to_string(out.failures) +
                             " of " + std::to_string(n_trials) + " trials");
  }

  std::vector<double> mean(width, 0.0);
  for (const auto& r : results) {
    if (!r) continue;
    for (std::size_t p = 0; p < width; ++p) mean[p] += (*r)[p];
  }
  for (double& m : mean) m /= ok;
  out.stddev.assign(width, 0.0);
  for (const auto& r : results) {
    if (!r) continue;
    for (std::size_t p = 0; p < width; ++p) {
      const double d = (*r)[p] - mean[p];
      out.stddev[p] += d * d;
    }
  }
  for (double& s : out.stddev) s = std::sqrt(s / (ok - 1));
  return out;
}

}  // namespace biphoton
