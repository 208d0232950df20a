#pragma once
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ffbench/core/cell.hpp"
#include "ffbench/core/error.hpp"
#include "ffbench/core/vec3.hpp"

namespace ffbench {

// Integer lattice coordinates of a reciprocal vector: q = 2*pi*(n_x/L_x, n_y/L_y, n_z/L_z).
struct QIndex {
  int nx = 0, ny = 0, nz = 0;
};

inline Vec3 q_of_index(const QIndex& n, const SimulationCell& cell) {
  const double two_pi = 2.0 * std::numbers::pi;
  return {two_pi * n.nx / cell.edge.x, two_pi * n.ny / cell.edge.y, two_pi * n.nz / cell.edge.z};
}

// True when the index lies in the canonical half space used to deduplicate the
// +q/-q pair (|rho(q)|^2 is identical for both members).
inline bool q_half_space(const QIndex& n) {
  if (n.nz != 0) return n.nz > 0;
  if (n.ny != 0) return n.ny > 0;
  return n.nx > 0;
}

// All commensurate wave vectors with |q| in [q_center - half_width, q_center + half_width],
// one representative per +-q pair, sorted by |q| then by index for a deterministic
// order. max_count == 0 keeps every match; otherwise the list is truncated after
// sorting.
inline std::vector<Vec3> commensurate_ring(const SimulationCell& cell, double q_center,
                                           double half_width, int max_count = 0) {
  if (!(q_center > 0.0) || !(half_width >= 0.0))
    throw ComputeError("commensurate_ring requires q_center > 0 and half_width >= 0");
  const double q_lo = std::max(q_center - half_width, 0.0);
  const double q_hi = q_center + half_width;
  const double two_pi = 2.0 * std::numbers::pi;
  const int mx = static_cast<int>(std::ceil(q_hi * cell.edge.x / two_pi));
  const int my = static_cast<int>(std::ceil(q_hi * cell.edge.y / two_pi));
  const int mz = static_cast<int>(std::ceil(q_hi * cell.edge.z / two_pi));

  struct Hit {
    QIndex n;
    double q2;
  };
  std::vector<Hit> hits;
  for (int nz = -mz; nz <= mz; ++nz)
    for (int ny = -my; ny <= my; ++ny)
      for (int nx = -mx; nx <= mx; ++nx) {
        const QIndex n{nx, ny, nz};
        if (!q_half_space(n)) continue;
        const Vec3 q = q_of_index(n, cell);
        const double qn = norm(q);
        if (qn >= q_lo - 1e-12 && qn <= q_hi + 1e-12) hits.push_back({n, norm2(q)});
      }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.q2 != b.q2) return a.q2 < b.q2;
    if (a.n.nz != b.n.nz) return a.n.nz < b.n.nz;
    if (a.n.ny != b.n.ny) return a.n.ny < b.n.ny;
    return a.n.nx < b.n.nx;
  });
  if (max_count > 0 && static_cast<int>(hits.size()) > max_count)
    hits.resize(static_cast<size_t>(max_count));
  std::vector<Vec3> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(q_of_index(h.n, cell));
  return out;
}

}  // namespace ffbench
