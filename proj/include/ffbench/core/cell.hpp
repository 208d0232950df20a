#pragma once
#include <cmath>

#include "ffbench/core/error.hpp"
#include "ffbench/core/vec3.hpp"

namespace ffbench {

// Orthorhombic, fully periodic simulation cell.
struct SimulationCell {
  Vec3 edge;  // box lengths along x, y, z in A; all > 0

  SimulationCell() = default;
  explicit SimulationCell(Vec3 e) : edge(e) { validate(); }
  SimulationCell(double lx, double ly, double lz) : edge{lx, ly, lz} { validate(); }
  static SimulationCell cubic(double l) { return SimulationCell(l, l, l); }

  void validate() const {
    if (!(edge.x > 0.0) || !(edge.y > 0.0) || !(edge.z > 0.0))
      throw ComputeError("simulation cell edges must be positive");
  }

  double volume() const { return edge.x * edge.y * edge.z; }

  // Uniform rescale of all edges by a factor (isotropic barostat moves).
  void scale(double factor) {
    edge *= factor;
    validate();
  }
};

// Nearest periodic image of the displacement d.  Valid for any d.
inline Vec3 minimum_image(Vec3 d, const SimulationCell& cell) {
  d.x -= cell.edge.x * std::round(d.x / cell.edge.x);
  d.y -= cell.edge.y * std::round(d.y / cell.edge.y);
  d.z -= cell.edge.z * std::round(d.z / cell.edge.z);
  return d;
}

// Map a position into [0, L) per axis.
inline Vec3 wrap_position(Vec3 p, const SimulationCell& cell) {
  for (int a = 0; a < 3; ++a) {
    const double l = cell.edge[a];
    p[a] -= l * std::floor(p[a] / l);
    if (p[a] >= l) p[a] -= l;  // floor rounding can land exactly on L
  }
  return p;
}

}  // namespace ffbench
