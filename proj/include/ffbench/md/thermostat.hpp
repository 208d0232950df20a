#pragma once
#include <cmath>
#include <vector>

#include "ffbench/core/error.hpp"
#include "ffbench/core/units.hpp"

namespace ffbench {

// Nose-Hoover chain state and its half-step propagator.  The collision
// frequency is the inverse damping time: 0.02 /ps means t_damp = 50 ps.
struct NoseHooverChain {
  int chain_length = 5;
  double collision_frequency_per_ps = 0.02;
  int mtk_loops = 5;  // inner integration loops per half-step
  double target_temperature_K = 0.0;
  std::vector<double> xi;    // chain positions, dimensionless
  std::vector<double> v_xi;  // chain velocities, 1/fs

  void validate() const {
    if (chain_length < 1) throw ConfigError("thermostat chain length must be >= 1");
    if (!(collision_frequency_per_ps > 0.0))
      throw ConfigError("thermostat collision frequency must be positive");
    if (mtk_loops < 1) throw ConfigError("thermostat needs at least one inner loop");
    if (!(target_temperature_K > 0.0))
      throw ConfigError("thermostat target temperature must be positive");
  }

  double tau_fs() const { return 1000.0 / collision_frequency_per_ps; }

  // Chain masses in eV fs^2: Q_1 couples to all n_f degrees of freedom.
  double mass(int k, double n_f) const {
    const double kbt = units::k_boltzmann * target_temperature_K;
    const double t2 = tau_fs() * tau_fs();
    return (k == 0 ? n_f : 1.0) * kbt * t2;
  }

  void ensure_state() {
    if (static_cast<int>(xi.size()) != chain_length) {
      xi.assign(static_cast<size_t>(chain_length), 0.0);
      v_xi.assign(static_cast<size_t>(chain_length), 0.0);
    }
  }

  // Thermostat contribution to the extended-system conserved quantity, eV.
  double energy(double n_f) const {
    if (xi.empty()) return 0.0;
    const double kbt = units::k_boltzmann * target_temperature_K;
    double e = 0.0;
    for (int k = 0; k < chain_length; ++k) {
      e += 0.5 * mass(k, n_f) * v_xi[static_cast<size_t>(k)] * v_xi[static_cast<size_t>(k)];
      e += (k == 0 ? n_f : 1.0) * kbt * xi[static_cast<size_t>(k)];
    }
    return e;
  }

  // Propagate the chain over half a step and return the accumulated velocity
  // scale factor for the thermostatted degrees of freedom.  two_ke is twice
  // their kinetic energy in eV and is rescaled in place.
  double propagate(double& two_ke, double n_f, double dt_half_fs) {
    validate();
    ensure_state();
    const int m = chain_length;
    const double kbt = units::k_boltzmann * target_temperature_K;
    const double dtn = dt_half_fs / mtk_loops;
    const double dt4 = dtn / 2.0, dt8 = dtn / 4.0;
    auto g = [&](int k) {
      if (k == 0) return (two_ke - n_f * kbt) / mass(0, n_f);
      const double vk1 = v_xi[static_cast<size_t>(k - 1)];
      return (mass(k - 1, n_f) * vk1 * vk1 - kbt) / mass(k, n_f);
    };

    double scale = 1.0;
    for (int loop = 0; loop < mtk_loops; ++loop) {
      v_xi[static_cast<size_t>(m - 1)] += g(m - 1) * dt4;
      for (int k = m - 2; k >= 0; --k) {
        const double s = std::exp(-dt8 * v_xi[static_cast<size_t>(k + 1)]);
        v_xi[static_cast<size_t>(k)] = (v_xi[static_cast<size_t>(k)] * s + dt4 * g(k)) * s;
      }
      const double sv = std::exp(-dtn * v_xi[0]);
      scale *= sv;
      two_ke *= sv * sv;
      for (int k = 0; k < m; ++k) xi[static_cast<size_t>(k)] += dtn * v_xi[static_cast<size_t>(k)];
      for (int k = 0; k <= m - 2; ++k) {
        const double s = std::exp(-dt8 * v_xi[static_cast<size_t>(k + 1)]);
        v_xi[static_cast<size_t>(k)] = (v_xi[static_cast<size_t>(k)] * s + dt4 * g(k)) * s;
      }
      v_xi[static_cast<size_t>(m - 1)] += g(m - 1) * dt4;
    }
    return scale;
  }
};

// Isotropic pressure coupling parameters.  A non-positive collision frequency
// freezes the cell, which reduces NPT stepping to NVT exactly.
struct BarostatSpec {
  double collision_frequency_per_ps = 0.2;
  double target_pressure_evA3 = 0.0;

  double tau_fs() const { return 1000.0 / collision_frequency_per_ps; }
  bool enabled() const { return collision_frequency_per_ps > 0.0; }
};

}  // namespace ffbench
