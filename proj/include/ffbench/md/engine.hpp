#pragma once
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ffbench/core/configuration.hpp"
#include "ffbench/forcefield/evaluate.hpp"
#include "ffbench/md/neighbor_list.hpp"
#include "ffbench/md/thermostat.hpp"

namespace ffbench {

// Cell degree of freedom for the isotropic MTK barostat, plus the chain that
// thermostats it.
struct BarostatState {
  double v_eps = 0.0;  // cell strain rate, 1/fs
  NoseHooverChain chain{};

  void reset(double temperature_K, double barostat_tau_collision_per_ps) {
    v_eps = 0.0;
    chain = NoseHooverChain{};
    chain.collision_frequency_per_ps = barostat_tau_collision_per_ps;
    chain.target_temperature_K = temperature_K;
    chain.ensure_state();
  }
};

struct EngineSettings {
  double skin_A = 0.5;
  // Per-atom hold flags: a nonzero entry pins that atom in place.  Frozen
  // atoms keep zero velocity, ignore forces, and drop out of the thermostat
  // degree-of-freedom count.  Empty means every atom is mobile.
  std::vector<std::uint8_t> frozen;
};

// Owns one mutable system state and advances it with velocity-Verlet-based
// integrators.  Forces are cached between steps and the neighbor list is
// rebuilt automatically when an atom strays beyond skin/2.
class Engine {
 public:
  Engine(Configuration initial, const PairModel& model, EngineSettings settings = {})
      : config_(std::move(initial)), model_(model), settings_(std::move(settings)) {
    config_.validate();
    if (!settings_.frozen.empty()) {
      if (static_cast<int>(settings_.frozen.size()) != config_.natoms())
        throw ConfigError("frozen mask length must match the atom count");
      mobile_ = 0;
      for (int i = 0; i < config_.natoms(); ++i) {
        if (settings_.frozen[static_cast<size_t>(i)])
          config_.velocities[static_cast<size_t>(i)] = Vec3{};
        else
          ++mobile_;
      }
      if (mobile_ == 0) throw ConfigError("cannot integrate with every atom frozen");
    } else {
      mobile_ = config_.natoms();
    }
    config_.wrap();
    rebuild_list();
    evaluate_forces();
  }

  const Configuration& config() const { return config_; }
  Configuration take_config() && { return std::move(config_); }
  const ForceEvaluation& forces() const { return eval_; }

  // Thermostatted degrees of freedom.  A fully mobile cell conserves total
  // momentum (3N - 3); a frozen wall absorbs momentum, so no centre-of-mass
  // constraint applies and each mobile atom contributes all three.
  double n_f() const {
    return settings_.frozen.empty() ? 3.0 * config_.natoms() - 3.0 : 3.0 * mobile_;
  }
  double kinetic_energy() const { return config_.kinetic_energy(); }
  double potential_energy() const { return eval_.potential_energy.value_or(0.0); }
  double temperature() const { return config_.temperature(); }
  double pressure() const {
    return instantaneous_pressure(kinetic_energy(), eval_.virial, config_.cell.volume());
  }

  double conserved_nve() const { return kinetic_energy() + potential_energy(); }
  double conserved_nvt(const NoseHooverChain& chain) const {
    return conserved_nve() + chain.energy(n_f());
  }
  double conserved_npt(const NoseHooverChain& chain, const BarostatSpec& baro,
                       const BarostatState& state) const {
    const double w = barostat_mass(baro, chain.target_temperature_K);
    return conserved_nvt(chain) + 0.5 * w * state.v_eps * state.v_eps +
           state.chain.energy(1.0) + baro.target_pressure_evA3 * config_.cell.volume();
  }

  void step_nve(double dt_fs) {
    half_kick(dt_fs);
    drift_and_refresh(dt_fs);
    half_kick(dt_fs);
    config_.time_fs += dt_fs;
  }

  void step_nvt(double dt_fs, NoseHooverChain& chain) {
    apply_thermostat(chain, dt_fs / 2.0);
    half_kick(dt_fs);
    drift_and_refresh(dt_fs);
    half_kick(dt_fs);
    apply_thermostat(chain, dt_fs / 2.0);
    config_.time_fs += dt_fs;
  }

  void step_npt(double dt_fs, NoseHooverChain& chain, const BarostatSpec& baro,
                BarostatState& state) {
    if (!baro.enabled()) {  // frozen cell: exact NVT limit
      step_nvt(dt_fs, chain);
      return;
    }
    if (!settings_.frozen.empty())
      throw ConfigError("the barostat cannot rescale a cell that contains frozen atoms");
    const double w = barostat_mass(baro, chain.target_temperature_K);

    apply_thermostat(chain, dt_fs / 2.0);
    apply_barostat_thermostat(state, w, dt_fs / 2.0);
    update_v_eps(state, baro, w, dt_fs / 2.0);
    mtk_half_kick(state.v_eps, dt_fs);
    mtk_drift(state.v_eps, dt_fs);
    rebuild_list();
    evaluate_forces();
    mtk_half_kick(state.v_eps, dt_fs);
    update_v_eps(state, baro, w, dt_fs / 2.0);
    apply_barostat_thermostat(state, w, dt_fs / 2.0);
    apply_thermostat(chain, dt_fs / 2.0);
    config_.time_fs += dt_fs;
  }

  double barostat_mass(const BarostatSpec& baro, double temperature_K) const {
    // MTK mass for the isotropic cell DOF, (N_f + 3) kB T tau_p^2.
    const double t = baro.tau_fs();
    return (n_f() + 3.0) * units::k_boltzmann * std::max(1.0, temperature_K) * t * t;
  }

 private:
  void rebuild_list() {
    list_ = build_neighbor_list(config_, model_.cutoff(), settings_.skin_A);
  }

  void evaluate_forces() { eval_ = evaluate(model_, config_, list_); }

  const std::uint8_t* frozen_mask() const {
    return settings_.frozen.empty() ? nullptr : settings_.frozen.data();
  }

  void half_kick(double dt_fs) {
    const double c = 0.5 * dt_fs * units::force_to_accel;
    const std::uint8_t* hold = frozen_mask();
    for (int i = 0; i < config_.natoms(); ++i) {
      if (hold && hold[i]) continue;
      config_.velocities[static_cast<size_t>(i)] +=
          (c / config_.mass(i)) * eval_.forces[static_cast<size_t>(i)];
    }
  }

  void drift_and_refresh(double dt_fs) {
    const std::uint8_t* hold = frozen_mask();
    for (int i = 0; i < config_.natoms(); ++i) {
      if (hold && hold[i]) continue;
      config_.positions[static_cast<size_t>(i)] += dt_fs * config_.velocities[static_cast<size_t>(i)];
    }
    config_.wrap();
    if (!list_.valid(config_)) rebuild_list();
    evaluate_forces();
  }

  void apply_thermostat(NoseHooverChain& chain, double dt_half_fs) {
    double two_ke = 2.0 * kinetic_energy();
    const double scale = chain.propagate(two_ke, n_f(), dt_half_fs);
    for (auto& v : config_.velocities) v *= scale;
  }

  void apply_barostat_thermostat(BarostatState& state, double w, double dt_half_fs) {
    double two_ke = w * state.v_eps * state.v_eps;
    const double scale = state.chain.propagate(two_ke, 1.0, dt_half_fs);
    state.v_eps *= scale;
  }

  void update_v_eps(BarostatState& state, const BarostatSpec& baro, double w,
                    double dt_half_fs) {
    const double v = config_.cell.volume();
    const double p_int = pressure();
    const double g = (3.0 * v * (p_int - baro.target_pressure_evA3) +
                      (3.0 / n_f()) * 2.0 * kinetic_energy()) /
                     w;
    state.v_eps += dt_half_fs * g;
  }

  static double sinhc(double x) {
    const double x2 = x * x;
    if (x2 < 1e-8) return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    return std::sinh(x) / x;
  }

  // Velocity update dv/dt = F/m - alpha v_eps v over dt/2, exact for constant F.
  void mtk_half_kick(double v_eps, double dt_fs) {
    const double alpha = 1.0 + 3.0 / n_f();
    const double x = alpha * v_eps * dt_fs / 4.0;
    const double e = std::exp(-x);
    const double c = 0.5 * dt_fs * units::force_to_accel * e * sinhc(x);
    const double e2 = e * e;
    for (int i = 0; i < config_.natoms(); ++i) {
      auto& vel = config_.velocities[static_cast<size_t>(i)];
      vel = vel * e2 + (c / config_.mass(i)) * eval_.forces[static_cast<size_t>(i)];
    }
  }

  // Position/cell update dr/dt = v + v_eps r over dt, exact for constant
  // v_eps; positions scale about the origin together with the cell.
  void mtk_drift(double v_eps, double dt_fs) {
    const double u = v_eps * dt_fs / 2.0;
    const double e = std::exp(u);
    const double c = dt_fs * e * sinhc(u);
    for (int i = 0; i < config_.natoms(); ++i) {
      auto& p = config_.positions[static_cast<size_t>(i)];
      p = p * (e * e) + c * config_.velocities[static_cast<size_t>(i)];
    }
    config_.cell.scale(e * e);
    config_.wrap();
  }

  Configuration config_;
  const PairModel& model_;
  EngineSettings settings_;
  int mobile_ = 0;
  NeighborList list_;
  ForceEvaluation eval_;
};

}  // namespace ffbench
