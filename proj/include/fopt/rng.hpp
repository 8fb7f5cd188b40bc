#ifndef FOPT_RNG_HPP
#define FOPT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace fopt {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ seeded through splitmix64.  Substreams are derived from
// (seed, stream_index) so that path i always sees the same draws no matter
// how work is split across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) { reseed(seed, 0); }
  RngStream(std::uint64_t seed, std::uint64_t stream_index) {
    reseed(seed, stream_index);
  }

  void reseed(std::uint64_t seed, std::uint64_t stream_index) {
    std::uint64_t sm = seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
    for (auto& word : s_) word = detail::splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl64(s_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never returns 0 so -log is safe.
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Box-Muller.  No caching of the second variate, so draw counts stay
  // easy to reason about when reproducing streams.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  // Exact Poisson sampling: product-of-uniforms for small means,
  // Hormann's PTRS transformed rejection otherwise.
  long long poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
      const double limit = std::exp(-mean);
      long long k = 0;
      double prod = uniform();
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    return poisson_ptrs(mean);
  }

  // Marsaglia-Tsang; exact for all shape > 0 via the boost trick below 1.
  double gamma(double shape, double rate) {
    if (shape <= 0.0 || rate <= 0.0)
      throw std::invalid_argument("gamma: shape and rate must be positive");
    if (shape < 1.0) {
      double boost = std::pow(uniform(), 1.0 / shape);
      return gamma(shape + 1.0, rate) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  // Geometric on {1, 2, ...} with success probability a.
  long long geometric1(double a) {
    if (a <= 0.0 || a > 1.0)
      throw std::invalid_argument("geometric1: a must be in (0, 1]");
    if (a == 1.0) return 1;
    double u = uniform();
    double k = std::floor(std::log(u) / std::log1p(-a));
    return 1 + static_cast<long long>(k);
  }

 private:
  long long poisson_ptrs(double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      double us = 0.5 - std::abs(u);
      double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<long long>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          k * loglam - mean - std::lgamma(k + 1.0)) {
        return static_cast<long long>(k);
      }
    }
  }

  std::uint64_t s_[4];
};

}  // namespace fopt

#endif  // FOPT_RNG_HPP
