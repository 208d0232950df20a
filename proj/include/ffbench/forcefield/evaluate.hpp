#pragma once
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "ffbench/core/configuration.hpp"
#include "ffbench/forcefield/pair_model.hpp"
#include "ffbench/forcefield/spline_model.hpp"
#include "ffbench/md/neighbor_list.hpp"

namespace ffbench {

struct ForceEvaluation {
  std::vector<Vec3> forces;  // eV/A
  std::optional<double> potential_energy;  // eV
  double virial = 0.0;  // sum over pairs of f(r) * r, eV

  // Recomputed column sum; for any central pair model this vanishes to
  // round-off (Newton's third law).
  Vec3 net_force() const {
    Vec3 s{};
    for (const auto& f : forces) s += f;
    return s;
  }
};

namespace detail {

[[noreturn]] inline void throw_nonfinite_pair(double r) {
  std::ostringstream os;
  os << "non-finite pair force at separation r = " << r << " A";
  throw ComputeError(os.str());
}

// Shared kernel.  Model must expose cutoff(), force_over_r(r2) and
// energy_r2(r2); the caller guarantees the list covers the model cutoff.
template <class Model>
ForceEvaluation evaluate_pairs(const Model& model, const Configuration& config,
                               const NeighborList& list) {
  const int n = config.natoms();
  ForceEvaluation out;
  out.forces.assign(static_cast<size_t>(n), Vec3{});
  const double rc2 = model.cutoff() * model.cutoff();
  double energy = 0.0;
  double virial = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int k = list.offsets[static_cast<size_t>(i)]; k < list.offsets[static_cast<size_t>(i) + 1]; ++k) {
      const int j = list.partners[static_cast<size_t>(k)];
      const Vec3 d = minimum_image(config.positions[i] - config.positions[j], config.cell);
      const double r2 = norm2(d);
      if (r2 >= rc2) continue;
      const double f_over_r = model.force_over_r(r2);
      if (!std::isfinite(f_over_r)) throw_nonfinite_pair(std::sqrt(r2));
      const Vec3 f = f_over_r * d;
      out.forces[static_cast<size_t>(i)] += f;
      out.forces[static_cast<size_t>(j)] -= f;
      energy += model.energy_r2(r2);
      virial += f_over_r * r2;
    }
  }
  out.potential_energy = energy;
  out.virial = virial;
  return out;
}

}  // namespace detail

template <class Model>
ForceEvaluation evaluate_with(const Model& model, const Configuration& config,
                              const NeighborList& list) {
  if (list.natoms() != config.natoms())
    throw ComputeError("neighbor list does not match configuration size");
  if (list.cutoff < model.cutoff())
    throw ComputeError("neighbor list cutoff smaller than model cutoff");
  if (!list.valid(config))
    throw ComputeError("stale neighbor list: an atom moved more than skin/2 since build; rebuild required");
  return detail::evaluate_pairs(model, config, list);
}

namespace detail {

// Adapts the virtual interface to the hot-loop kernel API for model kinds
// without a dedicated fast path.
struct VirtualKernel {
  const PairModel& m;
  double cutoff() const { return m.cutoff(); }
  double force_over_r(double r2) const {
    const double r = std::sqrt(r2);
    return m.pair_force(r) / r;
  }
  double energy_r2(double r2) const { return m.pair_energy(std::sqrt(r2)); }
};

}  // namespace detail

inline ForceEvaluation evaluate(const PairModel& model, const Configuration& config,
                                const NeighborList& list) {
  switch (model.kind()) {
    case ModelKind::lennard_jones:
      return evaluate_with(static_cast<const LennardJonesModel&>(model), config, list);
    case ModelKind::spline:
      return evaluate_with(static_cast<const SplinePairModel&>(model), config, list);
    case ModelKind::zero:
      return evaluate_with(static_cast<const ZeroPairModel&>(model), config, list);
    default:
      return evaluate_with(detail::VirtualKernel{model}, config, list);
  }
}

// Instantaneous pressure in eV/A^3 from kinetic energy (eV) and the pair
// virial of a force evaluation.
inline double instantaneous_pressure(double kinetic_energy_ev, double virial_ev,
                                     double volume_A3) {
  return (2.0 * kinetic_energy_ev + virial_ev) / (3.0 * volume_A3);
}

}  // namespace ffbench
