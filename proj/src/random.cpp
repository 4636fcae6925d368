#include "biphoton/random.hpp"

#include <boost/random/poisson_distribution.hpp>
#include <cassert>
#include <cmath>

namespace biphoton {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(domain)) + index);
}

void poisson_fill(Engine& engine, std::span<const double> means, std::span<std::uint64_t> out) {
  assert(means.size() == out.size());
  for (std::size_t k = 0; k < means.size(); ++k) {
    const double mean = means[k];
    if (!(mean > 0.0)) {
      out[k] = 0;
      continue;
    }
    boost::random::poisson_distribution<std::uint64_t, double> dist(mean);
    out[k] = dist(engine);
  }
}

}  // namespace biphoton
