#pragma once

#include <cstdint>
#include <random>

namespace copulimp {

// Seedable generator with derivable substreams. mt19937_64 output is
// specified by the standard, so identical seeds reproduce identical
// streams on every platform. Substreams are derived by mixing the root
// seed with a stream index through splitmix64, which decorrelates
// nearby seeds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : root_(seed), engine_(splitmix64(seed)) {}

  // Independent substream i rooted at this generator's seed.
  Rng substream(std::uint64_t i) const {
    return Rng(splitmix64(root_ ^ (0x9e3779b97f4a7c15ULL * (i + 1))));
  }

  std::uint64_t root_seed() const { return root_; }

  // Uniform on the open interval (0,1); never returns an endpoint.
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;  // 53 random bits
    return (static_cast<double>(bits) + 0.5) * 0x1p-53;
  }

  // Standard normal via the inverse CDF; one uniform consumed per draw.
  double normal();

  // Gamma(shape, scale=1), Marsaglia-Tsang. shape > 0.
  double gamma(double shape);

  double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t root_;
  std::mt19937_64 engine_;
};

}  // namespace copulimp
