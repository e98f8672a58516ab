#pragma once

#include <cstdint>
#include <random>

namespace graphdep {

/// Deterministic random stream.
///
/// The engine is std::mt19937_64 (bit-exact across platforms) but every
/// variate transform is implemented here rather than with std::*_distribution,
/// whose output is implementation-defined. Substreams are derived by keyed
/// seeding so that results never depend on scheduling or worker count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Independent stream keyed by (master, k1, k2, k3).
  static RngStream substream(std::uint64_t master, std::uint64_t k1,
                             std::uint64_t k2 = 0, std::uint64_t k3 = 0);

  std::uint64_t next_u64();

  /// Unbiased integer in [0, bound) by rejection; no modulo shortcut.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform double in (0, 1).
  double uniform01_open();

  double normal();
  double exponential();
  double gamma(double shape, double scale);
  double chi_square(double dof);
  double cauchy(double scale);
  int poisson(double mean);
  int binomial(int trials, double p);
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace graphdep
