#pragma once
#include <cmath>
#include <string>

#include "ffbench/core/error.hpp"

namespace ffbench {

enum class ModelKind { lennard_jones, spline, zero, custom };

// Central pair potential: all interactions are a scalar radial force
// f(r) = -dV/dr acting along the pair axis, identically zero beyond cutoff.
class PairModel {
 public:
  virtual ~PairModel() = default;
  virtual ModelKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual double cutoff() const = 0;
  // Scalar radial force f(r) = -dV/dr in eV/A (positive = repulsive).
  virtual double pair_force(double r) const = 0;
  // Pair energy in eV, with V(r) -> 0 at the cutoff for models that
  // reconstruct energy by integrating force.
  virtual double pair_energy(double r) const = 0;
};

class LennardJonesModel final : public PairModel {
 public:
  LennardJonesModel(double epsilon_eV, double sigma_A, double cutoff_A,
                    bool shift_energy = false)
      : epsilon_(epsilon_eV), sigma_(sigma_A), cutoff_(cutoff_A), shift_(shift_energy) {
    if (!(epsilon_ > 0.0) || !(sigma_ > 0.0) || !(cutoff_ > sigma_))
      throw ConfigError("Lennard-Jones parameters require epsilon, sigma > 0 and cutoff > sigma");
    const double s2 = sigma_ * sigma_ / (cutoff_ * cutoff_);
    const double s6 = s2 * s2 * s2;
    energy_at_cutoff_ = 4.0 * epsilon_ * (s6 * s6 - s6);
  }

  static LennardJonesModel argon() { return {0.0103, 3.40, 8.5}; }

  ModelKind kind() const override { return ModelKind::lennard_jones; }
  std::string name() const override { return "lennard-jones"; }
  double cutoff() const override { return cutoff_; }
  double epsilon() const { return epsilon_; }
  double sigma() const { return sigma_; }
  bool shift_energy() const { return shift_; }

  double pair_force(double r) const override {
    if (r <= 0.0) throw ComputeError("pair force undefined for r <= 0");
    if (r >= cutoff_) return 0.0;
    return force_over_r(r * r) * r;
  }

  double pair_energy(double r) const override {
    if (r <= 0.0) throw ComputeError("pair energy undefined for r <= 0");
    if (r >= cutoff_) return 0.0;
    return energy_r2(r * r);
  }

  // Hot-loop forms working on squared distance; caller guarantees r2 < cutoff^2.
  double force_over_r(double r2) const {
    const double s2 = sigma_ * sigma_ / r2;
    const double s6 = s2 * s2 * s2;
    return 24.0 * epsilon_ * (2.0 * s6 * s6 - s6) / r2;
  }
  double energy_r2(double r2) const {
    const double s2 = sigma_ * sigma_ / r2;
    const double s6 = s2 * s2 * s2;
    return 4.0 * epsilon_ * (s6 * s6 - s6) - (shift_ ? energy_at_cutoff_ : 0.0);
  }

 private:
  double epsilon_, sigma_, cutoff_;
  bool shift_;
  double energy_at_cutoff_;
};

// Degenerate force field: no interactions.  Used as the ideal-gas limit and as
// a deliberately wrong benchmark candidate in tests.
class ZeroPairModel final : public PairModel {
 public:
  explicit ZeroPairModel(double cutoff_A = 8.5) : cutoff_(cutoff_A) {}
  ModelKind kind() const override { return ModelKind::zero; }
  std::string name() const override { return "zero-force"; }
  double cutoff() const override { return cutoff_; }
  double pair_force(double) const override { return 0.0; }
  double pair_energy(double) const override { return 0.0; }
  double force_over_r(double) const { return 0.0; }
  double energy_r2(double) const { return 0.0; }

 private:
  double cutoff_;
};

}  // namespace ffbench
