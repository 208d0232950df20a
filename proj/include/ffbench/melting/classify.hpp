#pragma once
#include <algorithm>
#include <cstdint>
#include <vector>

#include "ffbench/core/rng.hpp"
#include "ffbench/md/protocol.hpp"
#include "ffbench/melting/order_parameter.hpp"
#include "ffbench/solid/fcc.hpp"

namespace ffbench {

enum class PhaseLabel : std::uint8_t { liquid = 0, solid = 1 };

// Thresholding rule for the neighbor-averaged bond order, produced by
// calibrate_classifier against pure-phase reference runs of the same model.
struct ClassifierCalibration {
  double threshold = 0.0;      // qbar6 at or above this labels an atom solid
  double solid_median = 0.0;   // median qbar6 of the pure-solid reference
  double liquid_median = 0.0;  // median qbar6 of the pure-liquid reference
  double cutoff_A = 4.9;       // first-shell cutoff used for the bond order

  void validate() const {
    if (!(cutoff_A > 0.0)) throw ConfigError("classifier cutoff must be positive");
    if (!(threshold > 0.0) || !(threshold < 1.0))
      throw ConfigError("classifier threshold must lie strictly inside (0, 1)");
  }
};

struct Classification {
  std::vector<PhaseLabel> labels;
  std::vector<int> flagged;  // atoms with under 4 neighbors, labeled by vote
  BondOrder order;
  double threshold = 0.0;

  int natoms() const { return static_cast<int>(labels.size()); }
  int solid_count() const {
    return static_cast<int>(std::count(labels.begin(), labels.end(), PhaseLabel::solid));
  }
  double solid_fraction() const {
    return labels.empty() ? 0.0 : static_cast<double>(solid_count()) / natoms();
  }
};

// Label every atom solid or liquid by thresholding the neighbor-averaged q6.
// Atoms with fewer than 4 first-shell neighbors carry too little angular
// information for the invariant, so they adopt the majority label of their
// neighbors (liquid when isolated or tied) and are flagged.
inline Classification classify_atoms(const Configuration& config,
                                     const ClassifierCalibration& calib) {
  calib.validate();
  Classification cl;
  cl.order = bond_order_q6(config, calib.cutoff_A);
  cl.threshold = calib.threshold;

  const int n = cl.order.natoms();
  cl.labels.assign(static_cast<size_t>(n), PhaseLabel::liquid);
  for (int i = 0; i < n; ++i)
    if (cl.order.qbar6[static_cast<size_t>(i)] >= calib.threshold)
      cl.labels[static_cast<size_t>(i)] = PhaseLabel::solid;

  // Majority vote over the provisional labels so the outcome does not depend
  // on the order in which under-coordinated atoms are visited.
  std::vector<PhaseLabel> provisional = cl.labels;
  for (int i = 0; i < n; ++i) {
    if (cl.order.neighbor_counts[static_cast<size_t>(i)] >= 4) continue;
    int solid_votes = 0, votes = 0;
    for (int k = cl.order.offsets[static_cast<size_t>(i)];
         k < cl.order.offsets[static_cast<size_t>(i) + 1]; ++k) {
      ++votes;
      if (provisional[static_cast<size_t>(cl.order.partners[static_cast<size_t>(k)])] ==
          PhaseLabel::solid)
        ++solid_votes;
    }
    cl.labels[static_cast<size_t>(i)] =
        2 * solid_votes > votes ? PhaseLabel::solid : PhaseLabel::liquid;
    cl.flagged.push_back(i);
  }
  return cl;
}

inline Classification classify_atoms(const Configuration& config, double threshold,
                                     double cutoff_A = 4.9) {
  ClassifierCalibration calib;
  calib.threshold = threshold;
  calib.cutoff_A = cutoff_A;
  return classify_atoms(config, calib);
}

struct CalibrationSettings {
  int cells = 4;                   // FCC cells per edge of each reference box
  double density_amu_A3 = 0.858;
  double solid_temperature_K = 20.0;
  double liquid_temperature_K = 100.0;
  double equilibration_ps = 10.0;
  double timestep_fs = 10.78;
  double thermostat_frequency_per_ps = 2.0;
  double cutoff_A = 4.9;
  std::uint64_t seed = 1;

  void validate() const {
    if (cells < 2) throw ConfigError("calibration reference box needs at least 2 cells per edge");
    if (!(density_amu_A3 > 0.0)) throw ConfigError("calibration density must be positive");
    if (!(solid_temperature_K > 0.0) || !(liquid_temperature_K > 0.0))
      throw ConfigError("calibration temperatures must be positive");
    if (!(equilibration_ps > 0.0)) throw ConfigError("calibration equilibration must be positive");
    if (!(cutoff_A > 0.0)) throw ConfigError("classifier cutoff must be positive");
  }
};

namespace detail {

// Non-overlapping uniform placement, the standard disordered starting point
// that is guaranteed already molten.
inline std::vector<Vec3> random_pack(int natoms, const SimulationCell& cell, double min_sep_A,
                                     Rng& rng) {
  std::vector<Vec3> pos;
  pos.reserve(static_cast<size_t>(natoms));
  const double min_sep2 = min_sep_A * min_sep_A;
  long attempts = 0;
  const long max_attempts = 20000L * natoms;
  while (static_cast<int>(pos.size()) < natoms) {
    if (++attempts > max_attempts)
      throw ComputeError("random packing failed: density too high for the requested separation");
    const Vec3 p{rng.uniform() * cell.edge.x, rng.uniform() * cell.edge.y,
                 rng.uniform() * cell.edge.z};
    bool ok = true;
    for (const Vec3& q : pos)
      if (norm2(minimum_image(p - q, cell)) < min_sep2) {
        ok = false;
        break;
      }
    if (ok) pos.push_back(p);
  }
  return pos;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw ComputeError("median of an empty sample");
  const size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(h), v.end());
  double m = v[h];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(h));
    m = 0.5 * (m + lower);
  }
  return m;
}

inline Configuration equilibrated_reference(const PairModel& model, Configuration start,
                                            double temperature_K,
                                            const CalibrationSettings& s,
                                            std::uint64_t seed) {
  ProtocolStage stage;
  stage.ensemble = Ensemble::nvt;
  stage.duration_ps = s.equilibration_ps;
  stage.timestep_fs = s.timestep_fs;
  stage.t_start_K = temperature_K;
  stage.thermostat_frequency_per_ps = s.thermostat_frequency_per_ps;
  stage.sample_every_steps = stage.nsteps();  // one frame: the final state
  ProtocolSpec spec;
  spec.stages = {stage};
  spec.seed = seed;
  Trajectory traj = run_protocol(spec, model, std::move(start));
  return traj.frames.back();
}

}  // namespace detail

// Derive the solid/liquid threshold as the midpoint between the median
// neighbor-averaged q6 of a thermalized crystal and of a thermalized liquid
// at the common density, each prepared by a short reference run of the model
// under test.
inline ClassifierCalibration calibrate_classifier(const PairModel& model,
                                                  CalibrationSettings settings = {}) {
  settings.validate();

  Configuration solid_start = build_fcc(settings.cells, settings.density_amu_A3);
  const Configuration solid_ref = detail::equilibrated_reference(
      model, std::move(solid_start), settings.solid_temperature_K, settings, settings.seed);

  Configuration liquid_start = build_fcc(settings.cells, settings.density_amu_A3);
  {
    Rng rng(settings.seed ^ 0x9e3779b97f4a7c15ull);
    liquid_start.positions =
        detail::random_pack(liquid_start.natoms(), liquid_start.cell, 3.0, rng);
  }
  const Configuration liquid_ref =
      detail::equilibrated_reference(model, std::move(liquid_start),
                                     settings.liquid_temperature_K, settings, settings.seed + 1);

  ClassifierCalibration calib;
  calib.cutoff_A = settings.cutoff_A;
  calib.solid_median = detail::median(bond_order_q6(solid_ref, settings.cutoff_A).qbar6);
  calib.liquid_median = detail::median(bond_order_q6(liquid_ref, settings.cutoff_A).qbar6);
  if (!(calib.solid_median > calib.liquid_median + 0.05))
    throw ComputeError(
        "phase calibration failed: the crystal and liquid references do not separate in "
        "bond order; check temperatures and density");
  calib.threshold = 0.5 * (calib.solid_median + calib.liquid_median);
  calib.validate();
  return calib;
}

}  // namespace ffbench
