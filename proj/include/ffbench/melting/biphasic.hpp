#pragma once
#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

#include "ffbench/melting/classify.hpp"
#include "ffbench/solid/fcc.hpp"

namespace ffbench {

// Geometry and preparation schedule for a two-phase coexistence cell: an FCC
// block spanning the full cell, with the half below the midplane of the
// chosen axis kept crystalline and the half above it melted.
struct BiphasicSpec {
  int cells_transverse = 8;  // FCC cells along each of the two transverse axes
  int cells_half = 8;        // FCC cells per half along the interface normal
  int axis = 2;
  double density_amu_A3 = 0.858;
  double solid_prep_temperature_K = 20.0;
  double liquid_prep_temperature_K = 100.0;
  double solid_equilibration_ps = 10.0;
  double liquid_equilibration_ps = 20.0;
  double timestep_fs = 10.78;
  double thermostat_frequency_per_ps = 2.0;
  std::uint64_t seed = 1;
  // The preparation refuses to hand back a cell whose molten half still
  // classifies as crystal.  Disable only to build degenerate all-solid cells
  // on purpose (for instance with both halves prepared cold).
  bool require_molten_liquid = true;

  int natoms_per_half() const { return 4 * cells_transverse * cells_transverse * cells_half; }
  int natoms_total() const { return 2 * natoms_per_half(); }

  void validate() const {
    if (cells_transverse < 2 || cells_half < 1)
      throw ConfigError("biphasic cell needs at least 2 transverse cells and 1 cell per half");
    if (axis < 0 || axis > 2) throw ConfigError("interface axis must be 0, 1, or 2");
    if (!(density_amu_A3 > 0.0)) throw ConfigError("biphasic density must be positive");
    if (!(solid_prep_temperature_K > 0.0) || !(liquid_prep_temperature_K > 0.0))
      throw ConfigError("biphasic preparation temperatures must be positive");
    if (!(solid_equilibration_ps > 0.0) || !(liquid_equilibration_ps > 0.0))
      throw ConfigError("biphasic equilibration durations must be positive");
    if (!(timestep_fs > 0.0)) throw ConfigError("biphasic timestep must be positive");
  }
};

struct BiphasicSystem {
  Configuration config;
  std::vector<std::uint8_t> solid_half;  // 1 where the atom began in the crystal half

  int natoms() const { return config.natoms(); }
};

namespace detail {

// Largest verlet skin the cell admits under the minimum-image constraint
// (min edge > 2 (cutoff + skin)), capped at the usual 0.5 A.
inline double auto_skin(const Configuration& config, double cutoff_A) {
  const double min_edge =
      std::min({config.cell.edge.x, config.cell.edge.y, config.cell.edge.z});
  const double headroom = 0.5 * min_edge - cutoff_A;
  if (!(headroom > 0.0))
    throw ConfigError("cell too small for the model cutoff under minimum image");
  return std::min(0.5, 0.45 * headroom);
}

// Maxwell-Boltzmann draw for the mobile atoms only.  The frozen wall absorbs
// momentum, so no centre-of-mass correction applies.
inline void thermalize_mobile(Configuration& config, const std::vector<std::uint8_t>& frozen,
                              double temperature_K, std::uint64_t seed) {
  Rng rng(seed);
  for (int i = 0; i < config.natoms(); ++i) {
    if (frozen[static_cast<size_t>(i)]) {
      config.velocities[static_cast<size_t>(i)] = Vec3{};
      continue;
    }
    const double s = std::sqrt(units::k_boltzmann * temperature_K /
                               (config.mass(i) * units::mv2_to_ev));
    config.velocities[static_cast<size_t>(i)] = s * rng.gaussian_vec3();
  }
}

inline Configuration equilibrate_half(const PairModel& model, Configuration start,
                                      const std::vector<std::uint8_t>& frozen,
                                      double temperature_K, double duration_ps,
                                      const BiphasicSpec& spec) {
  ProtocolStage stage;
  stage.ensemble = Ensemble::nvt;
  stage.duration_ps = duration_ps;
  stage.timestep_fs = spec.timestep_fs;
  stage.t_start_K = temperature_K;
  stage.thermostat_frequency_per_ps = spec.thermostat_frequency_per_ps;
  stage.sample_every_steps = stage.nsteps();
  ProtocolSpec protocol;
  protocol.stages = {stage};
  protocol.assign_initial_velocities = false;
  EngineSettings settings;
  settings.skin_A = auto_skin(start, model.cutoff());
  settings.frozen = frozen;
  Trajectory traj = run_protocol(protocol, model, std::move(start), settings);
  return traj.frames.back();
}

}  // namespace detail

// Assemble the coexistence cell: one FCC block across the whole cell, the
// crystal half thermalized at its preparation temperature against the other
// half held fixed, then the roles swapped and the second half melted at its
// own preparation temperature.  The halves never leave the common cell, so
// the seam carries no overlaps by construction.
inline BiphasicSystem build_biphasic(const BiphasicSpec& spec, const PairModel& model,
                                     const ClassifierCalibration& calib) {
  spec.validate();
  calib.validate();

  int dims[3] = {spec.cells_transverse, spec.cells_transverse, spec.cells_transverse};
  dims[spec.axis] = 2 * spec.cells_half;
  Configuration full =
      build_fcc_block(dims[0], dims[1], dims[2], spec.density_amu_A3, AtomTypes::argon());

  const double length = full.cell.edge[spec.axis];
  const double half_length = 0.5 * length;
  if (!(half_length > 2.0 * model.cutoff()))
    throw ConfigError(
        "each biphasic half must span more than twice the model cutoff so the two "
        "interfaces stay independent");

  const int n = full.natoms();
  std::vector<std::uint8_t> solid_half(static_cast<size_t>(n), 0);
  std::vector<std::uint8_t> liquid_half(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const bool low = full.positions[static_cast<size_t>(i)][spec.axis] < half_length;
    solid_half[static_cast<size_t>(i)] = low ? 1 : 0;
    liquid_half[static_cast<size_t>(i)] = low ? 0 : 1;
  }

  // Crystal half first: thermalize it against the untouched lattice above.
  detail::thermalize_mobile(full, liquid_half, spec.solid_prep_temperature_K, spec.seed);
  Configuration after_solid =
      detail::equilibrate_half(model, std::move(full), liquid_half,
                               spec.solid_prep_temperature_K, spec.solid_equilibration_ps, spec);

  std::vector<Vec3> solid_velocities = after_solid.velocities;

  // Then melt the other half against the now-thermal crystal held fixed.
  detail::thermalize_mobile(after_solid, solid_half, spec.liquid_prep_temperature_K,
                            spec.seed + 1);
  Configuration joined =
      detail::equilibrate_half(model, std::move(after_solid), solid_half,
                               spec.liquid_prep_temperature_K, spec.liquid_equilibration_ps,
                               spec);

  // Both halves carry their own preparation-stage velocities in the joined
  // state.
  for (int i = 0; i < n; ++i)
    if (solid_half[static_cast<size_t>(i)])
      joined.velocities[static_cast<size_t>(i)] = solid_velocities[static_cast<size_t>(i)];

  if (spec.require_molten_liquid) {
    // The frozen crystal walls template the adjacent melt (real epitaxial
    // layering, further smeared by the neighbor averaging of the bond order),
    // so probe the molten half's interior, beyond one classification cutoff
    // from either seam plane, where a stuck crystal and a true liquid differ
    // unambiguously.
    const Classification cl = classify_atoms(joined, calib);
    std::vector<double> interior, whole;
    for (int i = 0; i < n; ++i) {
      if (!liquid_half[static_cast<size_t>(i)]) continue;
      whole.push_back(cl.order.qbar6[static_cast<size_t>(i)]);
      const double x =
          wrap_position(joined.positions[static_cast<size_t>(i)], joined.cell)[spec.axis];
      if (x > half_length + calib.cutoff_A && x < length - calib.cutoff_A)
        interior.push_back(cl.order.qbar6[static_cast<size_t>(i)]);
    }
    const double median_q =
        detail::median(interior.size() >= 10 ? std::move(interior) : std::move(whole));
    if (median_q >= calib.threshold) {
      std::ostringstream os;
      os << "the liquid half failed to melt during preparation (interior median bond order "
         << median_q << " is on the solid side of the threshold " << calib.threshold
         << " after " << spec.liquid_equilibration_ps << " ps at "
         << spec.liquid_prep_temperature_K
         << " K); raise the liquid preparation temperature or extend the equilibration";
      throw ComputeError(os.str());
    }
  }

  BiphasicSystem system;
  system.config = std::move(joined);
  system.solid_half = std::move(solid_half);
  return system;
}

// Convenience overload that derives the classifier from the same model at the
// same density before building.
inline BiphasicSystem build_biphasic(const BiphasicSpec& spec, const PairModel& model) {
  CalibrationSettings cal;
  cal.density_amu_A3 = spec.density_amu_A3;
  cal.timestep_fs = spec.timestep_fs;
  cal.seed = spec.seed ^ 0x517cc1b727220a95ull;
  return build_biphasic(spec, model, calibrate_classifier(model, cal));
}

}  // namespace ffbench
