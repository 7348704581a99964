#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace napp {

/// Counter-based splittable generator (splitmix64 core). Every draw is a pure
/// function of (seed, stream, counter), so independent streams can be handed
/// to concurrent workers and any draw can be replayed without replaying the
/// ones before it.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + kGamma) ^ mix(stream + kStreamSalt))), ctr_(0) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  result_type operator()() { return mix(key_ + (++ctr_) * kGamma); }

  /// Derive an independent child stream; the parent's counter is untouched.
  Rng substream(std::uint64_t tag, std::uint64_t index = 0) const {
    Rng child(0, 0);
    child.key_ = mix(key_ ^ mix(tag + kStreamSalt) ^ mix(index + kGamma));
    child.ctr_ = 0;
    return child;
  }

  // uniform on [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal, Marsaglia polar
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential(double scale) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -scale * std::log(u);
  }

  // Marsaglia-Tsang; valid for any shape > 0
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw std::invalid_argument("gamma: shape and scale must be positive");
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v * scale;
    }
  }

  long poisson(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("poisson: lambda < 0");
    if (lambda < 30.0) return poisson_inversion(lambda);
    return poisson_ptrs(lambda);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  long poisson_inversion(double lambda) {
    const double l = std::exp(-lambda);
    long k = 0;
    double prod = uniform();
    while (prod > l) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  // Hormann's PTRS transformed rejection, for large means
  long poisson_ptrs(double lambda) {
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * loglam - lambda - std::lgamma(kf + 1.0))
        return static_cast<long>(kf);
    }
  }

  std::uint64_t key_;
  std::uint64_t ctr_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace napp
