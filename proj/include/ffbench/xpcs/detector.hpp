#pragma once
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ffbench/core/cell.hpp"
#include "ffbench/core/error.hpp"
#include "ffbench/core/vec3.hpp"

namespace ffbench {

// Geometry of a detector patch on the Ewald sphere, before snapping.
//
// The incident beam travels along +z with wave number k_in. An outgoing
// direction is obtained by rotating +z by theta_x about the y axis and then by
// theta_y about the x axis, with the two angles on a square grid:
//   theta_x in [theta_center - span/2, theta_center + span/2]
//   theta_y in [-span/2, +span/2]
// Elastic scattering maps a direction u to the scattering vector
//   q = k_in * (u - z_hat),
// so the patch is a square angular slice of the Ewald sphere of radius k_in.
// The defaults put every requested |q| in [0.45, 1.96] 1/A, inside the
// declared coverage [0.4, 2.0] 1/A. The incident wave number is a free
// instrument parameter; 5.0 1/A keeps the whole coverage below the
// backscattering limit 2 k_in with ordinary scattering angles.
struct SliceGeometry {
  int npix_x = 81;
  int npix_y = 81;
  double k_in_inv_A = 5.0;
  double theta_center_deg = 13.16;
  double span_deg = 16.0;
  double coverage_lo_inv_A = 0.4;  // declared |q| coverage for requested pixels
  double coverage_hi_inv_A = 2.0;
  double dq_half_inv_A = 0.029;  // default q-bin half width
};

// A detector slice tied to one simulation cell: every pixel's scattering
// vector is snapped to the nearest reciprocal-lattice point of that cell
// (incommensurate q is meaningless under periodic boundaries). Both the
// requested and the snapped vector are recorded per pixel. Pixel (ix, iy)
// lives at flat index ix * npix_y + iy.
struct DetectorSlice {
  SliceGeometry geometry;
  Vec3 cell_edge{};  // box the pixels were snapped to
  std::vector<Vec3> q;  // snapped scattering vectors, 1/A
  std::vector<Vec3> q_requested;  // pre-snap vectors, same order
  std::vector<std::array<int, 3>> index;  // integer lattice coordinates of q

  int pixels() const { return static_cast<int>(q.size()); }
};

// Largest possible displacement of a snapped vector from its requested one:
// half the body diagonal of one reciprocal-lattice cell.
inline double snap_radius(const SimulationCell& cell) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double h = std::numbers::pi / cell.edge[a];
    s += h * h;
  }
  return std::sqrt(s);
}

inline DetectorSlice build_detector_slice(const SimulationCell& cell,
                                          const SliceGeometry& geom = {}) {
  cell.validate();
  if (geom.npix_x < 1 || geom.npix_y < 1)
    throw ConfigError("detector pixel counts must be at least 1");
  if (!(geom.k_in_inv_A > 0.0)) throw ConfigError("incident wave number must be positive");
  if (!(geom.span_deg >= 0.0)) throw ConfigError("angular span must be non-negative");
  if (!(geom.coverage_lo_inv_A >= 0.0) || !(geom.coverage_hi_inv_A > geom.coverage_lo_inv_A))
    throw ConfigError("declared q coverage must satisfy 0 <= lo < hi");
  if (geom.coverage_hi_inv_A > 2.0 * geom.k_in_inv_A + 1e-12)
    throw ConfigError("q coverage exceeds the backscattering limit 2 k_in");
  if (!(geom.dq_half_inv_A > 0.0)) throw ConfigError("q-bin half width must be positive");

  const double rad = std::numbers::pi / 180.0;
  const double span = geom.span_deg * rad;
  const double th0 = geom.theta_center_deg * rad;
  const double k = geom.k_in_inv_A;
  const double two_pi = 2.0 * std::numbers::pi;

  DetectorSlice slice;
  slice.geometry = geom;
  slice.cell_edge = cell.edge;
  const int nx = geom.npix_x, ny = geom.npix_y;
  slice.q.reserve(static_cast<size_t>(nx) * ny);
  slice.q_requested.reserve(static_cast<size_t>(nx) * ny);
  slice.index.reserve(static_cast<size_t>(nx) * ny);
  for (int ix = 0; ix < nx; ++ix) {
    const double tx = nx == 1 ? th0 : th0 - 0.5 * span + span * ix / (nx - 1);
    for (int iy = 0; iy < ny; ++iy) {
      const double ty = ny == 1 ? 0.0 : -0.5 * span + span * iy / (ny - 1);
      const Vec3 u{std::sin(tx), -std::cos(tx) * std::sin(ty), std::cos(tx) * std::cos(ty)};
      const Vec3 q_req = k * Vec3{u.x, u.y, u.z - 1.0};
      const double qn = norm(q_req);
      if (qn < geom.coverage_lo_inv_A - 1e-12 || qn > geom.coverage_hi_inv_A + 1e-12)
        throw ConfigError("slice geometry leaves the declared q coverage at pixel (" +
                          std::to_string(ix) + ", " + std::to_string(iy) +
                          "): |q| = " + std::to_string(qn) + " 1/A");
      std::array<int, 3> m{};
      Vec3 q_snap{};
      for (int a = 0; a < 3; ++a) {
        m[static_cast<size_t>(a)] = static_cast<int>(std::llround(q_req[a] * cell.edge[a] / two_pi));
        q_snap[a] = two_pi * m[static_cast<size_t>(a)] / cell.edge[a];
      }
      slice.q.push_back(q_snap);
      slice.q_requested.push_back(q_req);
      slice.index.push_back(m);
    }
  }
  return slice;
}

// Pixels whose snapped |q| falls in the half-open bin [center - half, center + half).
inline std::vector<int> pixels_in_bin(const DetectorSlice& slice, double q_center,
                                      double half_width) {
  if (!(q_center > 0.0)) throw ConfigError("q-bin center must be positive");
  if (!(half_width >= 0.0)) throw ConfigError("q-bin half width must be non-negative");
  std::vector<int> out;
  for (int p = 0; p < slice.pixels(); ++p) {
    const double qn = norm(slice.q[static_cast<size_t>(p)]);
    if (qn >= q_center - half_width && qn < q_center + half_width) out.push_back(p);
  }
  return out;
}

// Default isotropic q-bin centers: multiples of 0.461 1/A inside the coverage.
inline std::vector<double> default_bin_centers(const SliceGeometry& geom = {}) {
  std::vector<double> centers;
  for (int k = 1;; ++k) {
    const double q = 0.461 * k;
    if (q > geom.coverage_hi_inv_A + 1e-12) break;
    if (q >= geom.coverage_lo_inv_A - 1e-12) centers.push_back(q);
  }
  return centers;
}

}  // namespace ffbench
