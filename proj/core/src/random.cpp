#include "ppcm/random.hpp"

#include <cmath>

namespace ppcm {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) {
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  ctr_ = {0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  ctr = round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    ctr = round(ctr, key);
  }
  return ctr;
}

void Philox4x32::refill() {
  buffer_ = block(ctr_, key_);
  if (++ctr_[0] == 0) ++ctr_[1];
  next_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (next_ == 4) refill();
  return buffer_[next_++];
}

void Philox4x32::discard(std::uint64_t n) {
  while (n > 0 && next_ < 4) {
    ++next_;
    --n;
  }
  if (n == 0) return;
  std::uint64_t blocks = n / 4;
  std::uint64_t block_index = (static_cast<std::uint64_t>(ctr_[1]) << 32) | ctr_[0];
  block_index += blocks;
  ctr_[0] = static_cast<std::uint32_t>(block_index);
  ctr_[1] = static_cast<std::uint32_t>(block_index >> 32);
  next_ = 4;
  for (std::uint64_t i = 0; i < n % 4; ++i) (*this)();
}

std::uint64_t derive_seed(std::uint64_t seed, StreamPurpose purpose, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ a);
  return splitmix64(h ^ (b + 0x632BE59BD9B4E019ull));
}

double Rng::uniform() {
  const std::uint64_t a = engine_() >> 5;  // 27 bits
  const std::uint64_t b = engine_() >> 6;  // 26 bits
  return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return normal_(engine_); }

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia & Tsang (2000).
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
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::log_gamma(double shape) {
  if (shape < 1.0) {
    return std::log(gamma(shape + 1.0)) + std::log(uniform()) / shape;
  }
  return std::log(gamma(shape));
}

double Rng::normal_above(double lower) {
  if (lower < 0.45) {
    for (;;) {
      const double z = normal();
      if (z > lower) return z;
    }
  }
  // Robert (1995) translated-exponential proposal.
  const double alpha = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  for (;;) {
    const double z = lower + exponential() / alpha;
    const double diff = z - alpha;
    if (uniform() <= std::exp(-0.5 * diff * diff)) return z;
  }
}

std::size_t Rng::index(std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

}  // namespace ppcm
