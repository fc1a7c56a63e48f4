#pragma once

#include <cstdint>
#include <random>

namespace svarmsh {

// Seeded random stream.  All stochastic routines in the library draw from
// one of these, so a fixed seed reproduces the exact draw sequence.
// Independent streams (chains, replications, importance blocks) are derived
// with derive().
class RngStream {
public:
  explicit RngStream(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  // Independent stream for a parallel unit of work.  Mixes the substream
  // index into the seed with splitmix64 so derived streams do not overlap
  // for practical purposes.
  RngStream derive(std::uint64_t substream) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (substream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return RngStream(z ^ (z >> 31));
  }

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
  }

  // Gamma with given shape and scale.
  double gamma(double shape, double scale) {
    return std::gamma_distribution<double>(shape, scale)(engine_);
  }

  double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

  // Index in [0, n) with the given (unnormalized, nonnegative) weights.
  // Assumes the weights sum to something strictly positive.
  int categorical(const double* w, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += w[i];
    double u = uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += w[i];
      if (u <= acc) return i;
    }
    return n - 1;
  }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

} // namespace svarmsh
