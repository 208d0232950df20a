#pragma once
#include <cmath>
#include <complex>
#include <vector>

#include "ffbench/core/configuration.hpp"
#include "ffbench/md/neighbor_list.hpp"

namespace ffbench {

// Per-atom bond-orientational order: the l = 6 Steinhardt invariant with one
// round of neighbor averaging.  Averaging over the first shell separates
// thermal crystals from dense liquids far more cleanly than the bare
// invariant, whose distributions overlap at high density.
struct BondOrder {
  double cutoff_A = 0.0;
  std::vector<double> qbar6;         // neighbor-averaged invariant per atom
  std::vector<int> neighbor_counts;  // first-shell coordination per atom
  // Full adjacency in CSR form (both directions of every bond), kept so
  // downstream label smoothing can reuse the same shell definition.
  std::vector<int> offsets;  // natoms + 1
  std::vector<int> partners;

  int natoms() const { return static_cast<int>(qbar6.size()); }
};

// Complex q_lm accumulation tracks m >= 0 only: the l = 6 invariant needs
// |q_m| magnitudes, which negative m duplicates by conjugation whatever the
// phase convention of the spherical harmonics.
inline BondOrder bond_order_q6(const Configuration& config, double cutoff_A) {
  if (!(cutoff_A > 0.0)) throw ConfigError("bond-order cutoff must be positive");
  config.validate();

  const int n = config.natoms();
  const NeighborList list = build_neighbor_list(config, cutoff_A, 0.0);

  BondOrder bo;
  bo.cutoff_A = cutoff_A;
  bo.qbar6.assign(static_cast<size_t>(n), 0.0);
  bo.neighbor_counts.assign(static_cast<size_t>(n), 0);

  // Expand the half pair list into full adjacency.
  std::vector<int> degree(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int k = list.offsets[static_cast<size_t>(i)]; k < list.offsets[static_cast<size_t>(i) + 1]; ++k) {
      ++degree[static_cast<size_t>(i)];
      ++degree[static_cast<size_t>(list.partners[static_cast<size_t>(k)])];
    }
  bo.offsets.assign(static_cast<size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i)
    bo.offsets[static_cast<size_t>(i) + 1] = bo.offsets[static_cast<size_t>(i)] + degree[static_cast<size_t>(i)];
  bo.partners.assign(static_cast<size_t>(bo.offsets.back()), 0);
  std::vector<int> cursor(bo.offsets.begin(), bo.offsets.end() - 1);
  for (int i = 0; i < n; ++i)
    for (int k = list.offsets[static_cast<size_t>(i)]; k < list.offsets[static_cast<size_t>(i) + 1]; ++k) {
      const int j = list.partners[static_cast<size_t>(k)];
      bo.partners[static_cast<size_t>(cursor[static_cast<size_t>(i)]++)] = j;
      bo.partners[static_cast<size_t>(cursor[static_cast<size_t>(j)]++)] = i;
    }
  for (int i = 0; i < n; ++i)
    bo.neighbor_counts[static_cast<size_t>(i)] =
        bo.offsets[static_cast<size_t>(i) + 1] - bo.offsets[static_cast<size_t>(i)];

  constexpr int mmax = 6;
  constexpr int stride = mmax + 1;
  std::vector<std::complex<double>> qm(static_cast<size_t>(n) * stride, {0.0, 0.0});

  for (int i = 0; i < n; ++i) {
    const int count = bo.neighbor_counts[static_cast<size_t>(i)];
    if (count == 0) continue;
    for (int k = bo.offsets[static_cast<size_t>(i)]; k < bo.offsets[static_cast<size_t>(i) + 1]; ++k) {
      const int j = bo.partners[static_cast<size_t>(k)];
      const Vec3 d = minimum_image(config.positions[static_cast<size_t>(j)] -
                                       config.positions[static_cast<size_t>(i)],
                                   config.cell);
      const double r = norm(d);
      if (!(r > 1e-10))
        throw ComputeError("bond-order parameter found coincident atoms");
      double ct = d.z / r;
      if (ct > 1.0) ct = 1.0;
      if (ct < -1.0) ct = -1.0;
      const double theta = std::acos(ct);
      const double phi = std::atan2(d.y, d.x);
      for (int m = 0; m <= mmax; ++m) {
        const double leg = std::sph_legendre(6u, static_cast<unsigned>(m), theta);
        qm[static_cast<size_t>(i) * stride + static_cast<size_t>(m)] +=
            std::polar(leg, m * phi);
      }
    }
    for (int m = 0; m <= mmax; ++m)
      qm[static_cast<size_t>(i) * stride + static_cast<size_t>(m)] /= static_cast<double>(count);
  }

  // Neighbor-averaged vectors over the shell plus the atom itself, then the
  // rotation invariant sqrt(4 pi / (2l + 1) * sum_m |qbar_m|^2).
  const double four_pi_over_13 = 4.0 * std::acos(-1.0) / 13.0;
  for (int i = 0; i < n; ++i) {
    double sum_sq = 0.0;
    const double denom = 1.0 + bo.neighbor_counts[static_cast<size_t>(i)];
    for (int m = 0; m <= mmax; ++m) {
      std::complex<double> acc = qm[static_cast<size_t>(i) * stride + static_cast<size_t>(m)];
      for (int k = bo.offsets[static_cast<size_t>(i)]; k < bo.offsets[static_cast<size_t>(i) + 1]; ++k)
        acc += qm[static_cast<size_t>(bo.partners[static_cast<size_t>(k)]) * stride +
                  static_cast<size_t>(m)];
      acc /= denom;
      sum_sq += (m == 0 ? 1.0 : 2.0) * std::norm(acc);
    }
    bo.qbar6[static_cast<size_t>(i)] = std::sqrt(four_pi_over_13 * sum_sq);
  }
  return bo;
}

}  // namespace ffbench
