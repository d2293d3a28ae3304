#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace klproj {

/// splitmix64 step, the standard 64-bit seed expander.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent child seed from (master, k).  Every replicate,
/// chain and ladder rung gets its own stream so runs are reproducible
/// piecewise, not just end to end.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t s = master ^ (0x632be59bd9b4e019ULL * (k + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

/// mt19937_64 seeded through splitmix64 so low-entropy seeds still give
/// well-mixed initial states.
inline std::mt19937_64 make_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  return std::mt19937_64(splitmix64(s));
}

/// Inverse-Gaussian(mu, lambda) draw by the Michael-Schucany-Haas method.
/// The smaller root is computed in a cancellation-free form so extreme
/// mu/lambda ratios stay finite.
template <class Engine>
double rand_inverse_gaussian(Engine& eng, double mu, double lambda) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double z = gauss(eng);
  const double v = z * z;
  const double s = std::sqrt(4.0 * mu * lambda * v + mu * mu * v * v);
  double x = v > 0.0 ? 4.0 * mu * mu * lambda * v / ((mu * v + s) * (mu * v + s)) : mu;
  if (!(x > 0.0)) x = 1e-300;
  if (unif(eng) > mu / (mu + x)) x = mu * mu / x;
  return x;
}

}  // namespace klproj
