#pragma once

#include <cstdint>

namespace echoslam::nn {

// Deterministic 64-bit generator (splitmix64). All stochastic behaviour in
// the library flows through this class so that a seed fixes every draw
// independently of platform or standard-library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller. Draws exactly two uniforms per call and
  // discards the second variate so the draw count stays predictable.
  double gaussian();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace echoslam::nn
