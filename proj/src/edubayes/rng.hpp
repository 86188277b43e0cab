#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace edubayes {

// Deterministic random source. All variate algorithms are implemented here
// (not delegated to std:: distributions) so that a given (seed, stream) pair
// reproduces the same draw sequence on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on (0, 1); never returns an exact endpoint.
  double uniform_open();
  double uniform(double lo, double hi);

  bool bernoulli(double p);
  double normal();  // standard normal, polar method
  double normal(double mean, double sd);
  double gamma(double shape);  // unit scale, Marsaglia-Tsang
  double beta(double alpha, double beta);
  std::vector<double> dirichlet(std::span<const double> concentration);

  // Index draw proportional to `weights` (nonnegative, not all zero).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace edubayes
