#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ppcm/frames.hpp"

namespace ppcm {

// c0 + c1 a + c2 a^2 in the age a (years).
struct QuadraticBound {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  static QuadraticBound constant(double v) { return {v, 0.0, 0.0}; }
  double operator()(double a) const { return c0 + a * (c1 + a * c2); }
  bool age_dependent() const { return c1 != 0.0 || c2 != 0.0; }
  bool operator==(const QuadraticBound&) const = default;
};

struct TriangularPrior {
  QuadraticBound min;
  QuadraticBound mode;
  QuadraticBound max;

  static TriangularPrior constant(double lo, double mode, double hi) {
    return {QuadraticBound::constant(lo), QuadraticBound::constant(mode), QuadraticBound::constant(hi)};
  }
  bool age_dependent() const { return min.age_dependent() || mode.age_dependent() || max.age_dependent(); }
  bool is_zero() const;
  bool operator==(const TriangularPrior&) const = default;
};

struct TriangularBounds {
  double min = 0.0;
  double mode = 0.0;
  double max = 0.0;
};

// Bounds at age a multiplied by scale_k. Throws ConfigError naming `wave`
// and a when min <= mode <= max fails.
TriangularBounds eval_bound(const TriangularPrior& prior, double a, double scale_k = 1.0, std::size_t wave = 0);

// Inverse CDF of Tri(min, mode, max) at u in [0, 1].
double triangular_quantile(const TriangularBounds& b, double u);

// Per-wave priors for waves 1..T; entry t-1 belongs to wave t. The dropout
// offset is a signed shift added to non-responders' outcomes (negative means
// dropouts score lower). The practice effect is subtracted from every
// prediction after baseline.
struct SensitivityConfig {
  std::vector<TriangularPrior> dropout;
  std::vector<TriangularPrior> practice;
  double scale_k = 1.0;

  static SensitivityConfig zeros(std::size_t waves);
  // Follow-up wave count covered (T).
  std::size_t follow_up_waves() const { return dropout.size(); }
  bool dropout_zero() const;
  bool practice_zero() const;
  bool all_zero() const { return dropout_zero() && practice_zero(); }
  bool age_dependent() const;
  // Checks sizes against a panel with `waves` waves (T + 1) and scale_k >= 0.
  void validate(std::size_t waves) const;

  SensitivityConfig with_dropout_zeroed() const;
  SensitivityConfig with_practice_zeroed() const;
  SensitivityConfig scaled(double k) const;

  static SensitivityConfig from_json(const std::string& text, std::size_t waves);
  static SensitivityConfig load(const std::string& path, std::size_t waves);
  std::string to_json() const;

  bool operator==(const SensitivityConfig&) const = default;
};

// One posterior iteration's offsets, units x waves row-major. Wave 0 and
// dead unit-waves hold 0.
struct SensitivityDraw {
  std::size_t units = 0;
  std::size_t waves = 0;
  std::vector<double> dropout;
  std::vector<double> practice;

  static SensitivityDraw zeros(std::size_t units, std::size_t waves);
  double dropout_at(std::size_t i, std::size_t t) const { return dropout[i * waves + t]; }
  double practice_at(std::size_t i, std::size_t t) const { return practice[i * waves + t]; }
};

// Independent triangular draws for every alive (unit, wave >= 1) of
// posterior iteration `draw`. Each unit owns a stream derived from
// (seed, draw, unit), so draws under different bounds share their uniforms.
SensitivityDraw sample_sensitivity(const SensitivityConfig& cfg, const data::Panel& population,
                                   std::uint64_t seed, std::size_t draw);

}  // namespace ppcm
