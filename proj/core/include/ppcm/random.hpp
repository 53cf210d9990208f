#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace ppcm {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// The 128-bit counter is split into a 64-bit block index (low words) and a
// 64-bit stream id (high words); the 64-bit key carries the seed. Any
// (seed, stream) pair is an independent sequence, so parallel workers can
// derive their own generator from indices alone.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32() : Philox4x32(0, 0) {}
  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  void discard(std::uint64_t n);

  // One application of the 10-round bijection; exposed for known-answer tests.
  static Counter block(Counter ctr, Key key);

 private:
  void refill();

  Key key_{};
  Counter ctr_{};
  Counter buffer_{};
  unsigned next_ = 4;
};

// Purpose tags keep independent uses of one user seed from sharing streams.
enum class StreamPurpose : std::uint32_t {
  kBartOutcome = 1,
  kBartResponse = 2,
  kSensitivity = 3,
  kImputation = 4,
  kSimulation = 5,
  kLinear = 6,
  kMrp = 7,
  kStudy = 8,
};

// Mixes a user seed with a purpose tag and up to two indices into a key.
std::uint64_t derive_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t a = 0,
                          std::uint64_t b = 0);

// Variate generation on top of a Philox stream. Samplers below are written
// out explicitly (rather than std:: distributions) where the draw count per
// call must not depend on the parameters, so that streams stay aligned when
// configuration changes.
class Rng {
 public:
  Rng() = default;
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  Philox4x32& engine() { return engine_; }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  double exponential() { return -std::log(uniform()); }
  bool bernoulli(double p) { return uniform() < p; }
  double gamma(double shape);
  // log of a Gamma(shape, 1) draw; accurate for very small shapes.
  double log_gamma(double shape);
  double chi_squared(double df) { return 2.0 * gamma(0.5 * df); }
  // Standard normal conditioned on exceeding `lower`.
  double normal_above(double lower);
  std::size_t index(std::size_t n);

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ppcm
