#include "sparsehdp/random.hpp"

#include <cmath>
#include <string>

#include "sparsehdp/error.hpp"

namespace shdp {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Stream::Stream(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    s = z ^ (z >> 31);
  }
  // all-zero state is a fixed point; splitmix never yields four zeros, but be exact
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Stream derive_stream(const StreamKey& key) {
  std::uint64_t h = splitmix64(key.seed ^ 0x5348445053545245ULL);
  h = splitmix64(h ^ key.iteration);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.unit_kind));
  h = splitmix64(h ^ key.unit_index);
  return Stream(h);
}

double draw_normal(Stream& rng) {
  // Marsaglia polar method; the second variate is discarded so the stream
  // position depends only on the number of calls.
  for (;;) {
    const double u = 2.0 * draw_uniform(rng) - 1.0;
    const double v = 2.0 * draw_uniform(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

namespace {

// Marsaglia & Tsang (2000), shape >= 1.
double gamma_mt(Stream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = draw_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = draw_uniform_open(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

void check_shape(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ConfigError("gamma shape must be positive and finite, got " + std::to_string(shape));
  }
}

}  // namespace

double draw_gamma(Stream& rng, double shape) {
  check_shape(shape);
  if (shape >= 1.0) return gamma_mt(rng, shape);
  const double g = gamma_mt(rng, shape + 1.0);
  return g * std::pow(draw_uniform_open(rng), 1.0 / shape);
}

double draw_log_gamma(Stream& rng, double shape) {
  check_shape(shape);
  if (shape >= 1.0) return std::log(gamma_mt(rng, shape));
  const double g = gamma_mt(rng, shape + 1.0);
  return std::log(g) + std::log(draw_uniform_open(rng)) / shape;
}

double draw_beta(Stream& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError("beta parameters must be positive, got a=" + std::to_string(a) +
                      " b=" + std::to_string(b));
  }
  const double lx = draw_log_gamma(rng, a);
  const double ly = draw_log_gamma(rng, b);
  // x / (x + y) evaluated without forming x or y
  return 1.0 / (1.0 + std::exp(ly - lx));
}

std::uint64_t draw_poisson(Stream& rng, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw ConfigError("poisson rate must be nonnegative and finite, got " + std::to_string(rate));
  }
  if (rate == 0.0) return 0;
  if (rate < 10.0) {
    // sequential search inversion
    double p = std::exp(-rate);
    double u = draw_uniform(rng);
    std::uint64_t x = 0;
    while (u > p) {
      u -= p;
      ++x;
      p *= rate / static_cast<double>(x);
      if (p <= 0.0) break;  // u lost to rounding in the far tail
    }
    return x;
  }
  // PTRS: Hormann (1993), "The transformed rejection method for generating
  // Poisson random variables".
  const double log_rate = std::log(rate);
  const double b = 0.931 + 2.53 * std::sqrt(rate);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = draw_uniform(rng) - 0.5;
    const double v = draw_uniform_open(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -rate + k * log_rate - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(k);
  }
}

namespace {

// Inversion by sequential search; requires p <= 0.5.
std::uint64_t binomial_inversion(Stream& rng, std::uint64_t n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = (static_cast<double>(n) + 1.0) * s;
  for (;;) {
    double r = std::exp(static_cast<double>(n) * std::log1p(-p));
    double u = draw_uniform(rng);
    std::uint64_t x = 0;
    bool ok = true;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) {
        ok = false;  // rounding pushed u past the total mass; redraw
        break;
      }
      r *= a / static_cast<double>(x) - s;
    }
    if (ok) return x;
  }
}

// BTRS: Hormann (1993), "The generation of binomial random variates";
// requires p <= 0.5 and n * p >= 10.
std::uint64_t binomial_btrs(Stream& rng, std::uint64_t n, double p) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double m = std::floor((nd + 1.0) * p);
  const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
  for (;;) {
    const double u = draw_uniform(rng) - 0.5;
    double v = draw_uniform_open(rng);
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > nd) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - std::lgamma(k + 1.0) - std::lgamma(nd - k + 1.0) + (k - m) * lpq) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace

std::uint64_t draw_binomial(Stream& rng, std::uint64_t trials, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("binomial probability must lie in [0, 1], got " + std::to_string(p));
  }
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  const std::uint64_t x = static_cast<double>(trials) * pp < 10.0
                              ? binomial_inversion(rng, trials, pp)
                              : binomial_btrs(rng, trials, pp);
  return flip ? trials - x : x;
}

}  // namespace shdp
