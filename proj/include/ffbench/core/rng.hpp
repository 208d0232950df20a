#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ffbench/core/vec3.hpp"

namespace ffbench {

// Deterministic random stream.  Uses the standard-fixed mt19937_64 engine with
// hand-rolled uniform and Box-Muller transforms so the same seed reproduces
// the same sequence on every platform (std::*_distribution output is
// implementation-defined and would not).
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    const double t = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  Vec3 gaussian_vec3() {
    const double a = gaussian(), b = gaussian(), c = gaussian();
    return {a, b, c};
  }

  uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ffbench
