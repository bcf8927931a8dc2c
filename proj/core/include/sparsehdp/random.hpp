#pragma once

#include <cstdint>
#include <limits>

namespace shdp {

/// Which phase of the sampler a random stream belongs to.
enum class UnitKind : std::uint32_t {
  phi_row = 1,
  document = 2,
  l_topic = 3,
  psi = 4,
  init = 5,
  b_flags = 6,  // reference chain only
};

/// Identifies one independent random stream. The stream is a pure function of
/// the key, so a work unit draws the same numbers regardless of which thread
/// runs it or in which order units are scheduled.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  UnitKind unit_kind = UnitKind::init;
  std::uint64_t unit_index = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// xoshiro256** generator. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

Stream derive_stream(const StreamKey& key);

/// Uniform on [0, 1) with 53 random bits.
inline double draw_uniform(Stream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on the open interval (0, 1).
inline double draw_uniform_open(Stream& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

__extension__ using uint128 = unsigned __int128;

/// Uniform integer in [0, bound) by multiply-shift. `bound` must be positive.
inline std::uint64_t draw_index(Stream& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<uint128>(rng()) * bound) >> 64);
}

double draw_normal(Stream& rng);

/// Gamma(shape, 1) by Marsaglia and Tsang, boosted for shape < 1.
double draw_gamma(Stream& rng, double shape);

/// log of a Gamma(shape, 1) variate; stays finite for tiny shapes where the
/// variate itself underflows.
double draw_log_gamma(Stream& rng, double shape);

/// Beta(a, b). Throws ConfigError unless a > 0 and b > 0.
double draw_beta(Stream& rng, double a, double b);

/// Poisson(rate): inversion below rate 10, Hormann's transformed rejection
/// (PTRS) above. Throws ConfigError for negative or non-finite rates.
std::uint64_t draw_poisson(Stream& rng, double rate);

/// Binomial(trials, p): inversion when trials * min(p, 1-p) < 10, Hormann's
/// BTRS otherwise. Throws ConfigError unless 0 <= p <= 1.
std::uint64_t draw_binomial(Stream& rng, std::uint64_t trials, double p);

}  // namespace shdp
