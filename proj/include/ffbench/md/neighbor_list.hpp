#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "ffbench/core/configuration.hpp"

namespace ffbench {

// Half pair list: every pair with separation below cutoff (+skin at build
// time) appears exactly once.  Stored CSR-style keyed by the lower atom index.
struct NeighborList {
  double cutoff = 0.0;
  double skin = 0.0;
  std::vector<int> offsets;       // natoms + 1
  std::vector<int> partners;
  std::vector<Vec3> build_positions;
  Vec3 build_edge;

  int natoms() const { return static_cast<int>(offsets.empty() ? 0 : offsets.size() - 1); }
  int npairs() const { return static_cast<int>(partners.size()); }

  // True while every atom has moved less than skin/2 from its build position
  // and the cell is unchanged, which guarantees the list still covers every
  // pair inside cutoff.
  bool valid(const Configuration& config) const {
    if (config.natoms() != natoms()) return false;
    for (int a = 0; a < 3; ++a)
      if (std::abs(config.cell.edge[a] - build_edge[a]) >
          1e-12 * std::max(1.0, build_edge[a]))
        return false;
    const double limit2 = 0.25 * skin * skin;
    for (int i = 0; i < natoms(); ++i) {
      const Vec3 d = minimum_image(config.positions[i] - build_positions[i], config.cell);
      if (norm2(d) > limit2) return false;
    }
    return true;
  }
};

namespace detail {

inline void append_pairs_bruteforce(const Configuration& config, double reach2,
                                    std::vector<std::pair<int, int>>& pairs) {
  const int n = config.natoms();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec3 d = minimum_image(config.positions[i] - config.positions[j], config.cell);
      if (norm2(d) < reach2) pairs.emplace_back(i, j);
    }
}

}  // namespace detail

inline NeighborList build_neighbor_list(const Configuration& config, double cutoff,
                                        double skin) {
  if (!(cutoff > 0.0) || skin < 0.0)
    throw ComputeError("neighbor list requires cutoff > 0 and skin >= 0");
  const double reach = cutoff + skin;
  const double min_edge = std::min({config.cell.edge.x, config.cell.edge.y, config.cell.edge.z});
  if (!(min_edge > 2.0 * reach))
    throw ComputeError("cell too small for minimum-image neighbor search: need min edge > 2 (cutoff + skin)");

  const int n = config.natoms();
  const double reach2 = reach * reach;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(n) * 32);

  const int ncx = static_cast<int>(std::floor(config.cell.edge.x / reach));
  const int ncy = static_cast<int>(std::floor(config.cell.edge.y / reach));
  const int ncz = static_cast<int>(std::floor(config.cell.edge.z / reach));

  if (ncx < 3 || ncy < 3 || ncz < 3) {
    detail::append_pairs_bruteforce(config, reach2, pairs);
  } else {
    const int ncells = ncx * ncy * ncz;
    std::vector<int> head(static_cast<size_t>(ncells), -1), next(static_cast<size_t>(n), -1);
    std::vector<Vec3> wrapped(static_cast<size_t>(n));
    auto cell_of = [&](const Vec3& p) {
      int ix = std::min(static_cast<int>(p.x / config.cell.edge.x * ncx), ncx - 1);
      int iy = std::min(static_cast<int>(p.y / config.cell.edge.y * ncy), ncy - 1);
      int iz = std::min(static_cast<int>(p.z / config.cell.edge.z * ncz), ncz - 1);
      return (iz * ncy + iy) * ncx + ix;
    };
    for (int i = 0; i < n; ++i) {
      wrapped[static_cast<size_t>(i)] = wrap_position(config.positions[i], config.cell);
      const int c = cell_of(wrapped[static_cast<size_t>(i)]);
      next[static_cast<size_t>(i)] = head[static_cast<size_t>(c)];
      head[static_cast<size_t>(c)] = i;
    }

    // Half stencil: the cell itself plus 13 of the 26 neighbors, so each cell
    // pair is visited once.
    static constexpr int stencil[13][3] = {
        {1, 0, 0},  {0, 1, 0},   {1, 1, 0},  {-1, 1, 0}, {0, 0, 1},
        {1, 0, 1},  {-1, 0, 1},  {0, 1, 1},  {0, -1, 1}, {1, 1, 1},
        {-1, 1, 1}, {1, -1, 1},  {-1, -1, 1}};

    auto test_pair = [&](int i, int j) {
      const Vec3 d = minimum_image(wrapped[static_cast<size_t>(i)] - wrapped[static_cast<size_t>(j)],
                                   config.cell);
      if (norm2(d) < reach2)
        pairs.emplace_back(std::min(i, j), std::max(i, j));
    };

    for (int iz = 0; iz < ncz; ++iz)
      for (int iy = 0; iy < ncy; ++iy)
        for (int ix = 0; ix < ncx; ++ix) {
          const int c = (iz * ncy + iy) * ncx + ix;
          for (int i = head[static_cast<size_t>(c)]; i >= 0; i = next[static_cast<size_t>(i)]) {
            for (int j = next[static_cast<size_t>(i)]; j >= 0; j = next[static_cast<size_t>(j)])
              test_pair(i, j);
            for (const auto& s : stencil) {
              const int jx = (ix + s[0] + ncx) % ncx;
              const int jy = (iy + s[1] + ncy) % ncy;
              const int jz = (iz + s[2] + ncz) % ncz;
              const int c2 = (jz * ncy + jy) * ncx + jx;
              for (int j = head[static_cast<size_t>(c2)]; j >= 0; j = next[static_cast<size_t>(j)])
                test_pair(i, j);
            }
          }
        }
  }

  std::sort(pairs.begin(), pairs.end());

  NeighborList list;
  list.cutoff = cutoff;
  list.skin = skin;
  list.build_positions = config.positions;
  list.build_edge = config.cell.edge;
  list.offsets.assign(static_cast<size_t>(n) + 1, 0);
  list.partners.reserve(pairs.size());
  for (const auto& [i, j] : pairs) list.offsets[static_cast<size_t>(i) + 1]++;
  for (int i = 0; i < n; ++i) list.offsets[static_cast<size_t>(i) + 1] += list.offsets[static_cast<size_t>(i)];
  for (const auto& [i, j] : pairs) list.partners.push_back(j);
  return list;
}

}  // namespace ffbench
