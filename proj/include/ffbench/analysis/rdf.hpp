#pragma once
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ffbench/core/configuration.hpp"

namespace ffbench {

struct RadialHistogram {
  std::vector<double> bin_edges;  // bins + 1, A
  std::vector<double> g;          // dimensionless
  int frames_used = 0;

  int bins() const { return static_cast<int>(g.size()); }
  double bin_center(int b) const {
    return 0.5 * (bin_edges[static_cast<size_t>(b)] + bin_edges[static_cast<size_t>(b) + 1]);
  }
  int bin_of(double r) const {
    const double dr = bin_edges[1] - bin_edges[0];
    const int b = static_cast<int>(r / dr);
    return std::clamp(b, 0, bins() - 1);
  }
};

// Pair distribution function: minimum-image pair histogram normalized by the
// uncorrelated expectation N(N-1)/2 * V_shell/V per frame, averaged over
// every stride-th frame.
inline RadialHistogram pair_distribution(const Trajectory& traj, double r_max, int bins,
                                         int stride = 1) {
  traj.validate();
  if (bins < 1) throw ComputeError("pair distribution needs at least one bin");
  if (stride < 1) throw ComputeError("stride must be >= 1");
  const auto& cell0 = traj.frames.front().cell;
  const double min_edge = std::min({cell0.edge.x, cell0.edge.y, cell0.edge.z});
  if (!(r_max > 0.0) || r_max > 0.5 * min_edge + 1e-12)
    throw ComputeError("pair distribution r_max must lie in (0, min cell edge / 2]");

  RadialHistogram hist;
  hist.bin_edges.resize(static_cast<size_t>(bins) + 1);
  const double dr = r_max / bins;
  for (int b = 0; b <= bins; ++b) hist.bin_edges[static_cast<size_t>(b)] = b * dr;
  std::vector<double> counts(static_cast<size_t>(bins), 0.0);

  for (int f = 0; f < traj.nframes(); f += stride) {
    const Configuration& c = traj.frames[static_cast<size_t>(f)];
    const int n = c.natoms();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double r =
            norm(minimum_image(c.positions[static_cast<size_t>(i)] - c.positions[static_cast<size_t>(j)], c.cell));
        if (r < r_max) counts[static_cast<size_t>(std::min(static_cast<int>(r / dr), bins - 1))] += 1.0;
      }
    ++hist.frames_used;
  }

  const Configuration& c0 = traj.frames.front();
  const double n = c0.natoms();
  const double volume = c0.cell.volume();
  hist.g.resize(static_cast<size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    const double r0 = hist.bin_edges[static_cast<size_t>(b)], r1 = hist.bin_edges[static_cast<size_t>(b) + 1];
    const double shell = 4.0 / 3.0 * std::numbers::pi * (r1 * r1 * r1 - r0 * r0 * r0);
    const double expected = hist.frames_used * 0.5 * n * (n - 1.0) * shell / volume;
    hist.g[static_cast<size_t>(b)] = counts[static_cast<size_t>(b)] / expected;
  }
  return hist;
}

}  // namespace ffbench
