#pragma once
#include <cmath>
#include <string>

#include "ffbench/core/error.hpp"

namespace ffbench {
namespace units {

// Internal working units throughout: Angstrom, femtosecond, eV, amu, Kelvin.

// Boltzmann constant, eV/K.
inline constexpr double k_boltzmann = 8.617333262e-5;

// 1 amu * (A/fs)^2 expressed in eV.  CODATA: amu = 1.66053906660e-27 kg,
// eV = 1.602176634e-19 J, and (A/fs)^2 = 1e10 (m/s)^2.
inline constexpr double mv2_to_ev = 166.053906660 / 1.602176634;

// Acceleration produced by 1 eV/A acting on 1 amu, in A/fs^2.
inline constexpr double force_to_accel = 1.0 / mv2_to_ev;

// Force-constant-over-mass eV/(A^2 amu) -> angular frequency squared (rad/fs)^2.
// Same bridge as force_to_accel: [eV/(A^2 amu)] = force_to_accel / fs^2.
inline constexpr double evA2amu_to_radfs2 = force_to_accel;

}  // namespace units

enum class Quantity {
  length,        // A           <- sigma
  time,          // fs          <- tau = sigma*sqrt(m/eps)
  energy,        // eV          <- eps
  force,         // eV/A        <- eps/sigma
  velocity,      // A/fs        <- sigma/tau
  temperature,   // K           <- eps/kB
  mass_density,  // amu/A^3     <- m/sigma^3
  number_density,// 1/A^3       <- 1/sigma^3
  pressure,      // eV/A^3      <- eps/sigma^3
  diffusion,     // A^2/fs      <- sigma^2/tau
};

// Reference scales that tie dimensionless (reduced) Lennard-Jones values to
// real units.
struct UnitSystem {
  double sigma_A = 1.0;
  double epsilon_eV = 1.0;
  double mass_amu = 1.0;

  static UnitSystem lj_argon() { return {3.40, 0.0103, 39.948}; }

  // Intrinsic LJ time unit sigma*sqrt(m/eps) in fs.
  double tau_fs() const {
    return sigma_A * std::sqrt(mass_amu * units::mv2_to_ev / epsilon_eV);
  }

  double real_per_reduced(Quantity q) const {
    const double s = sigma_A, e = epsilon_eV, m = mass_amu, t = tau_fs();
    switch (q) {
      case Quantity::length: return s;
      case Quantity::time: return t;
      case Quantity::energy: return e;
      case Quantity::force: return e / s;
      case Quantity::velocity: return s / t;
      case Quantity::temperature: return e / units::k_boltzmann;
      case Quantity::mass_density: return m / (s * s * s);
      case Quantity::number_density: return 1.0 / (s * s * s);
      case Quantity::pressure: return e / (s * s * s);
      case Quantity::diffusion: return s * s / t;
    }
    throw ComputeError("unknown quantity");
  }
};

inline double reduced_to_real(double value, Quantity q, const UnitSystem& u) {
  return value * u.real_per_reduced(q);
}

inline double real_to_reduced(double value, Quantity q, const UnitSystem& u) {
  return value / u.real_per_reduced(q);
}

}  // namespace ffbench
