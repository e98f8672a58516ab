#include "graphdep/rng.hpp"

#include <cmath>

#include "graphdep/errors.hpp"

namespace graphdep {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

RngStream RngStream::substream(std::uint64_t master, std::uint64_t k1,
                               std::uint64_t k2, std::uint64_t k3) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(k1 + 0x61c8864680b583ebULL));
  h = splitmix64(h ^ splitmix64(k2 + 0xa5a5a5a5a5a5a5a5ULL));
  h = splitmix64(h ^ splitmix64(k3 + 0x0f0f0f0f0f0f0f0fULL));
  return RngStream(h);
}

std::uint64_t RngStream::next_u64() { return engine_(); }

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw parameter_error("uniform_below: bound must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform01_open() {
  double u;
  do {
    u = uniform01();
  } while (u == 0.0);
  return u;
}

double RngStream::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  have_spare_normal_ = true;
  return u * f;
}

double RngStream::exponential() { return -std::log(uniform01_open()); }

double RngStream::gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0)
    throw parameter_error("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost the shape, then correct with a power of a uniform.
    const double g = gamma(shape + 1.0, scale);
    return g * std::pow(uniform01_open(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v * scale;
  }
}

double RngStream::chi_square(double dof) { return gamma(0.5 * dof, 2.0); }

double RngStream::cauchy(double scale) {
  const double pi = 3.141592653589793238462643383279502884;
  return scale * std::tan(pi * (uniform01_open() - 0.5));
}

int RngStream::poisson(double mean) {
  if (mean < 0.0) throw parameter_error("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  if (mean > 30.0) return poisson(mean * 0.5) + poisson(mean - mean * 0.5);
  // Knuth multiplication method.
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform01();
  } while (p > limit);
  return k - 1;
}

int RngStream::binomial(int trials, double p) {
  if (trials < 0 || p < 0.0 || p > 1.0)
    throw parameter_error("binomial: invalid parameters");
  int k = 0;
  for (int i = 0; i < trials; ++i) k += uniform01() < p ? 1 : 0;
  return k;
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

}  // namespace graphdep
