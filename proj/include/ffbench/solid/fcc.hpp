#pragma once
#include <cmath>

#include "ffbench/core/configuration.hpp"

namespace ffbench {

// Conventional-cell lattice parameter of an FCC crystal of the given mass
// density: 4 atoms per cubic cell, a = (4 m / rho)^(1/3).
inline double fcc_lattice_constant(double density_amu_A3, double mass_amu) {
  if (!(density_amu_A3 > 0.0) || !(mass_amu > 0.0))
    throw ComputeError("FCC lattice constant requires positive density and mass");
  return std::cbrt(4.0 * mass_amu / density_amu_A3);
}

// nx x ny x nz conventional FCC cells at the requested density, zero
// velocities.  The 4-atom basis sits at (0,0,0), (1/2,1/2,0), (1/2,0,1/2),
// (0,1/2,1/2) in cell coordinates.
inline Configuration build_fcc_block(int nx, int ny, int nz, double density_amu_A3,
                                     std::shared_ptr<const AtomTypes> types) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw ComputeError("FCC block needs at least one cell per axis");
  if (!types || types->masses.size() != 1)
    throw ComputeError("FCC builder expects a single-species table");
  const double a = fcc_lattice_constant(density_amu_A3, types->masses[0]);

  Configuration c;
  c.types = std::move(types);
  c.cell = SimulationCell(nx * a, ny * a, nz * a);
  const int n_atoms = 4 * nx * ny * nz;
  c.positions.reserve(static_cast<size_t>(n_atoms));
  static constexpr double basis[4][3] = {
      {0.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}, {0.0, 0.5, 0.5}};
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      for (int iz = 0; iz < nz; ++iz)
        for (const auto& b : basis)
          c.positions.push_back(
              {(ix + b[0]) * a, (iy + b[1]) * a, (iz + b[2]) * a});
  c.velocities.assign(static_cast<size_t>(n_atoms), Vec3{});
  c.species.assign(static_cast<size_t>(n_atoms), 0);
  c.validate();
  return c;
}

// Cubic crystal with cells_per_axis conventional cells per axis (4 n^3 atoms).
inline Configuration build_fcc(int cells_per_axis, double density_amu_A3,
                               std::shared_ptr<const AtomTypes> types = AtomTypes::argon()) {
  if (cells_per_axis < 2)
    throw ComputeError("FCC crystal needs at least 2 cells per axis");
  return build_fcc_block(cells_per_axis, cells_per_axis, cells_per_axis,
                         density_amu_A3, std::move(types));
}

}  // namespace ffbench
