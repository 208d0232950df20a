#pragma once
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ffbench/core/cell.hpp"
#include "ffbench/core/error.hpp"
#include "ffbench/core/units.hpp"
#include "ffbench/core/vec3.hpp"

namespace ffbench {

// Species table shared by every frame of a run: symbol and mass per species id.
struct AtomTypes {
  std::vector<std::string> names;
  std::vector<double> masses;  // amu

  static std::shared_ptr<const AtomTypes> single(std::string name, double mass_amu) {
    auto t = std::make_shared<AtomTypes>();
    t->names = {std::move(name)};
    t->masses = {mass_amu};
    return t;
  }
  static std::shared_ptr<const AtomTypes> argon() { return single("Ar", 39.948); }
};

// One snapshot of the system.  Positions in A, velocities in A/fs, time in fs.
struct Configuration {
  std::vector<Vec3> positions;
  std::vector<Vec3> velocities;
  std::vector<int> species;  // index into types->names / types->masses
  std::shared_ptr<const AtomTypes> types;
  SimulationCell cell;
  double time_fs = 0.0;

  int natoms() const { return static_cast<int>(positions.size()); }

  double mass(int i) const { return types->masses[static_cast<size_t>(species[i])]; }

  void validate() const {
    const size_t n = positions.size();
    if (velocities.size() != n || species.size() != n)
      throw ComputeError("configuration arrays must have equal length");
    if (!types) throw ComputeError("configuration has no species table");
    cell.validate();
    for (int s : species)
      if (s < 0 || static_cast<size_t>(s) >= types->masses.size())
        throw ComputeError("species id out of range");
  }

  void wrap() {
    for (auto& p : positions) p = wrap_position(p, cell);
  }

  // Total kinetic energy in eV.
  double kinetic_energy() const {
    double mv2 = 0.0;
    for (int i = 0; i < natoms(); ++i) mv2 += mass(i) * norm2(velocities[i]);
    return 0.5 * mv2 * units::mv2_to_ev;
  }

  Vec3 com_velocity() const {
    Vec3 p{};
    double m_tot = 0.0;
    for (int i = 0; i < natoms(); ++i) {
      p += mass(i) * velocities[i];
      m_tot += mass(i);
    }
    return p / m_tot;
  }

  void zero_com_momentum() {
    const Vec3 v = com_velocity();
    for (auto& vi : velocities) vi -= v;
  }

  // Instantaneous temperature in K from the centre-of-mass frame, with
  // 3N - 3 kinetic degrees of freedom.
  double temperature() const {
    const int n = natoms();
    if (n < 2) throw ComputeError("temperature undefined for fewer than two atoms");
    const Vec3 vc = com_velocity();
    double mv2 = 0.0;
    for (int i = 0; i < n; ++i) mv2 += mass(i) * norm2(velocities[i] - vc);
    const double ke = 0.5 * mv2 * units::mv2_to_ev;
    return 2.0 * ke / ((3.0 * n - 3.0) * units::k_boltzmann);
  }

  double mass_density() const {  // amu/A^3
    double m_tot = 0.0;
    for (int i = 0; i < natoms(); ++i) m_tot += mass(i);
    return m_tot / cell.volume();
  }
};

// Uniformly spaced sequence of frames from one run.
struct Trajectory {
  std::vector<Configuration> frames;
  double frame_interval_fs = 0.0;

  int nframes() const { return static_cast<int>(frames.size()); }

  void validate() const {
    if (frames.empty()) throw ComputeError("trajectory has no frames");
    const int n = frames.front().natoms();
    for (const auto& f : frames)
      if (f.natoms() != n) throw ComputeError("trajectory frames differ in atom count");
    if (frames.size() > 1) {
      if (!(frame_interval_fs > 0.0))
        throw ComputeError("trajectory frame interval must be positive");
      for (size_t k = 1; k < frames.size(); ++k) {
        const double dt = frames[k].time_fs - frames[k - 1].time_fs;
        if (std::abs(dt - frame_interval_fs) > 1e-9 * std::max(1.0, frame_interval_fs))
          throw ComputeError("trajectory frames are not uniformly spaced");
      }
    }
  }
};

}  // namespace ffbench
