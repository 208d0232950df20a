#pragma once
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ffbench/core/rng.hpp"
#include "ffbench/md/engine.hpp"

namespace ffbench {

enum class Ensemble { nve, nvt, npt };

inline std::string to_string(Ensemble e) {
  switch (e) {
    case Ensemble::nve: return "NVE";
    case Ensemble::nvt: return "NVT";
    case Ensemble::npt: return "NPT";
  }
  return "?";
}

// One leg of a simulation protocol.  Constant temperature unless t_end_K is
// set, in which case the thermostat target ramps linearly over the stage.
struct ProtocolStage {
  Ensemble ensemble = Ensemble::nvt;
  double duration_ps = 0.0;
  double timestep_fs = 10.78;
  double t_start_K = 0.0;
  double t_end_K = -1.0;  // < 0 means constant at t_start_K
  int sample_every_steps = 0;  // 0 = stage produces no frames
  double thermostat_frequency_per_ps = 0.02;
  int chain_length = 5;
  int mtk_loops = 5;
  double barostat_frequency_per_ps = 0.2;
  double pressure_target_evA3 = 0.0;

  int nsteps() const {
    return static_cast<int>(std::llround(duration_ps * 1000.0 / timestep_fs));
  }

  double target_at(int step) const {  // target while integrating step+1
    if (t_end_K < 0.0) return t_start_K;
    const int n = nsteps();
    const double frac = n <= 1 ? 1.0 : static_cast<double>(step + 1) / n;
    return t_start_K + (t_end_K - t_start_K) * frac;
  }

  void validate() const {
    if (!(duration_ps > 0.0)) throw ConfigError("protocol stage duration must be positive");
    if (!(timestep_fs > 0.0)) throw ConfigError("protocol stage timestep must be positive");
    if (ensemble != Ensemble::nve) {
      if (!(t_start_K > 0.0))
        throw ConfigError("thermostatted stage needs a positive start temperature");
      if (t_end_K == 0.0)
        throw ConfigError("ramp end temperature must be positive");
    }
    if (sample_every_steps < 0) throw ConfigError("sampling interval cannot be negative");
  }
};

struct ProtocolSpec {
  std::vector<ProtocolStage> stages;
  uint64_t seed = 1;
  // When the initial configuration carries no velocities, draw them from a
  // Maxwell-Boltzmann distribution at the first stage's start temperature.
  bool assign_initial_velocities = true;

  void validate() const {
    for (const auto& s : stages) s.validate();
  }
};

// Maxwell-Boltzmann velocities at temperature_K with the centre-of-mass
// momentum removed.  No exact-temperature rescale: the sampled kinetic
// temperature fluctuates with the expected chi-squared spread.
inline void init_velocities(Configuration& config, double temperature_K, uint64_t seed) {
  if (!(temperature_K >= 0.0)) throw ConfigError("velocity init needs T >= 0");
  Rng rng(seed);
  for (int i = 0; i < config.natoms(); ++i) {
    const double s =
        std::sqrt(units::k_boltzmann * temperature_K / (config.mass(i) * units::mv2_to_ev));
    config.velocities[static_cast<size_t>(i)] = s * rng.gaussian_vec3();
  }
  config.zero_com_momentum();
}

inline double instantaneous_temperature(const Configuration& config) {
  return config.temperature();
}

// Execute the stages in order, chaining the final state of each into the
// next.  Frames are recorded every sample_every_steps steps of sampling
// stages; with no sampled frames the trajectory holds only the initial state.
inline Trajectory run_protocol(const ProtocolSpec& spec, const PairModel& model,
                               Configuration initial,
                               EngineSettings settings = {}) {
  spec.validate();
  initial.validate();

  bool all_zero = true;
  for (const auto& v : initial.velocities)
    if (norm2(v) != 0.0) all_zero = false;
  if (spec.assign_initial_velocities && all_zero && !spec.stages.empty() &&
      spec.stages.front().ensemble != Ensemble::nve && initial.natoms() > 1)
    init_velocities(initial, spec.stages.front().t_start_K, spec.seed);

  Trajectory traj;
  const Configuration initial_copy = initial;
  Engine engine(std::move(initial), model, settings);

  int stage_index = 0;
  for (const auto& stage : spec.stages) {
    NoseHooverChain chain;
    chain.chain_length = stage.chain_length;
    chain.mtk_loops = stage.mtk_loops;
    chain.collision_frequency_per_ps = stage.thermostat_frequency_per_ps;
    chain.target_temperature_K = stage.t_start_K > 0 ? stage.t_start_K : 1.0;
    BarostatSpec baro;
    baro.collision_frequency_per_ps = stage.barostat_frequency_per_ps;
    baro.target_pressure_evA3 = stage.pressure_target_evA3;
    BarostatState baro_state;
    baro_state.reset(chain.target_temperature_K, baro.collision_frequency_per_ps);

    const int n = stage.nsteps();
    for (int step = 0; step < n; ++step) {
      chain.target_temperature_K = stage.ensemble == Ensemble::nve ? chain.target_temperature_K
                                                                   : stage.target_at(step);
      try {
        switch (stage.ensemble) {
          case Ensemble::nve: engine.step_nve(stage.timestep_fs); break;
          case Ensemble::nvt: engine.step_nvt(stage.timestep_fs, chain); break;
          case Ensemble::npt: engine.step_npt(stage.timestep_fs, chain, baro, baro_state); break;
        }
      } catch (const ComputeError& err) {
        std::ostringstream os;
        os << "stage " << stage_index << " (" << to_string(stage.ensemble) << "), step "
           << step << ": " << err.what();
        throw ComputeError(os.str());
      }
      if (stage.sample_every_steps > 0 && (step + 1) % stage.sample_every_steps == 0)
        traj.frames.push_back(engine.config());
    }
    ++stage_index;
  }

  if (traj.frames.empty()) {
    traj.frames.push_back(initial_copy);
    traj.frame_interval_fs = 0.0;
  } else if (traj.frames.size() > 1) {
    traj.frame_interval_fs = traj.frames[1].time_fs - traj.frames[0].time_fs;
  }
  traj.validate();
  return traj;
}

// Single-step conveniences matching the engine operations.
inline Configuration step_nve(Configuration config, const PairModel& model, double dt_fs) {
  Engine e(std::move(config), model);
  e.step_nve(dt_fs);
  return std::move(e).take_config();
}

inline Configuration step_nvt(Configuration config, const PairModel& model, double dt_fs,
                              NoseHooverChain& chain) {
  Engine e(std::move(config), model);
  e.step_nvt(dt_fs, chain);
  return std::move(e).take_config();
}

inline Configuration step_npt(Configuration config, const PairModel& model, double dt_fs,
                              NoseHooverChain& chain, const BarostatSpec& baro,
                              BarostatState& state) {
  Engine e(std::move(config), model);
  e.step_npt(dt_fs, chain, baro, state);
  return std::move(e).take_config();
}

}  // namespace ffbench
