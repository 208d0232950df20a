#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "ffbench/analysis/structure_factor.hpp"
#include "ffbench/core/configuration.hpp"
#include "ffbench/xpcs/detector.hpp"

namespace ffbench {

// Scattered intensity per detector pixel per saved frame. Intensities are the
// form-factor-weighted structure factor, so they are dimensionless and
// non-negative by construction.
struct SpeckleSeries {
  DetectorSlice slice;
  double frame_interval_fs = 0.0;
  std::vector<std::vector<double>> intensity;  // [frame][pixel]

  int nframes() const { return static_cast<int>(intensity.size()); }
  int npixels() const { return slice.pixels(); }

  void validate() const {
    if (intensity.empty()) throw ComputeError("speckle series has no frames");
    for (const auto& frame : intensity) {
      if (static_cast<int>(frame.size()) != slice.pixels())
        throw ComputeError("speckle frame size does not match the detector slice");
      for (double v : frame)
        if (!(v >= 0.0)) throw ComputeError("speckle intensity must be non-negative");
    }
    if (intensity.size() > 1 && !(frame_interval_fs > 0.0))
      throw ComputeError("speckle series frame interval must be positive");
  }
};

// Speckle stack: for every frame and pixel, the weighted structure factor
//   I = |sum_j f_j(|q|) e^{i q . r_j}|^2 / sum_j f_j^2
// at the pixel's snapped wave vector. Because every pixel q is a
// reciprocal-lattice point, the phase factor separates per axis:
//   e^{i q . r} = px[mx] * py[my] * pz[mz],  pa[m] = e^{i 2 pi m r_a / L_a},
// so each frame costs one small table of exponentials per atom plus two
// complex multiplies per (atom, pixel) instead of a sine per pair. Pixels are
// independent, which keeps the parallel loop deterministic.
inline SpeckleSeries compute_speckles(const Trajectory& traj, const DetectorSlice& slice,
                                      const FormFactorTable& table) {
  traj.validate();
  const int npix = slice.pixels();
  if (npix == 0) throw ConfigError("detector slice has no pixels");

  // Integer index ranges per axis across all pixels.
  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[static_cast<size_t>(a)] = hi[static_cast<size_t>(a)] = slice.index[0][static_cast<size_t>(a)];
  }
  for (const auto& m : slice.index)
    for (int a = 0; a < 3; ++a) {
      lo[static_cast<size_t>(a)] = std::min(lo[static_cast<size_t>(a)], m[static_cast<size_t>(a)]);
      hi[static_cast<size_t>(a)] = std::max(hi[static_cast<size_t>(a)], m[static_cast<size_t>(a)]);
    }
  const std::array<int, 3> width{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};

  const Configuration& first = traj.frames.front();
  first.validate();
  const int ntypes = static_cast<int>(first.types->names.size());

  // Form factors depend on the pixel only through its snapped |q|.
  std::vector<double> f_pixel_type(static_cast<size_t>(npix) * ntypes);
  for (int p = 0; p < npix; ++p) {
    const double qn = norm(slice.q[static_cast<size_t>(p)]);
    for (int t = 0; t < ntypes; ++t)
      f_pixel_type[static_cast<size_t>(p) * ntypes + t] =
          table.value(first.types->names[static_cast<size_t>(t)], qn);
  }

  SpeckleSeries series;
  series.slice = slice;
  series.frame_interval_fs = traj.frame_interval_fs;
  series.intensity.assign(static_cast<size_t>(traj.nframes()),
                          std::vector<double>(static_cast<size_t>(npix), 0.0));

  const double two_pi = 2.0 * std::numbers::pi;
  std::array<std::vector<std::complex<double>>, 3> tables;

  for (int fidx = 0; fidx < traj.nframes(); ++fidx) {
    const Configuration& c = traj.frames[static_cast<size_t>(fidx)];
    c.validate();
    for (int a = 0; a < 3; ++a)
      if (std::abs(c.cell.edge[a] - slice.cell_edge[a]) > 1e-9 * slice.cell_edge[a])
        throw ComputeError("trajectory cell does not match the cell the slice was snapped to");
    if (c.types->names != first.types->names)
      throw ComputeError("trajectory frames disagree on the species table");
    const int n = c.natoms();

    // Atoms grouped by species; per-species type counts set the normalization.
    std::vector<std::vector<int>> atoms_of(static_cast<size_t>(ntypes));
    for (int i = 0; i < n; ++i)
      atoms_of[static_cast<size_t>(c.species[static_cast<size_t>(i)])].push_back(i);

    for (int a = 0; a < 3; ++a) {
      auto& tab = tables[static_cast<size_t>(a)];
      tab.resize(static_cast<size_t>(n) * width[static_cast<size_t>(a)]);
      const double scale = two_pi / c.cell.edge[a];
      for (int i = 0; i < n; ++i) {
        const double x = c.positions[static_cast<size_t>(i)][a];
        for (int m = lo[static_cast<size_t>(a)]; m <= hi[static_cast<size_t>(a)]; ++m) {
          const double angle = scale * m * x;
          tab[static_cast<size_t>(i) * width[static_cast<size_t>(a)] +
              (m - lo[static_cast<size_t>(a)])] = {std::cos(angle), std::sin(angle)};
        }
      }
    }

    std::vector<double>& out = series.intensity[static_cast<size_t>(fidx)];
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (int p = 0; p < npix; ++p) {
      const auto& m = slice.index[static_cast<size_t>(p)];
      const size_t mx = static_cast<size_t>(m[0] - lo[0]);
      const size_t my = static_cast<size_t>(m[1] - lo[1]);
      const size_t mz = static_cast<size_t>(m[2] - lo[2]);
      std::complex<double> amplitude{0.0, 0.0};
      double norm_sq = 0.0;
      for (int t = 0; t < ntypes; ++t) {
        std::complex<double> acc{0.0, 0.0};
        for (int i : atoms_of[static_cast<size_t>(t)]) {
          const auto phase = tables[0][static_cast<size_t>(i) * width[0] + mx] *
                             tables[1][static_cast<size_t>(i) * width[1] + my] *
                             tables[2][static_cast<size_t>(i) * width[2] + mz];
          acc += phase;
        }
        const double f = f_pixel_type[static_cast<size_t>(p) * ntypes + t];
        amplitude += f * acc;
        norm_sq += f * f * static_cast<double>(atoms_of[static_cast<size_t>(t)].size());
      }
      if (!(norm_sq > 0.0))
        throw ComputeError("form factor weights vanish for every atom at pixel " +
                           std::to_string(p));
      out[static_cast<size_t>(p)] = std::norm(amplitude) / norm_sq;
    }
  }
  return series;
}

// Coarse-grain a speckle series over non-overlapping pulse windows: each
// output frame is the sum of the input frames in its window times the frame
// interval (the discrete form of integrating I over the pulse). The pulse
// width snaps to the nearest whole number of frames; leftover frames at the
// end are dropped.
inline SpeckleSeries pulse_integrate(const SpeckleSeries& series, double delta_ps) {
  series.validate();
  const double interval_fs = series.frame_interval_fs;
  if (series.nframes() < 2) throw ComputeError("pulse integration needs at least two frames");
  const double delta_fs = delta_ps * 1000.0;
  if (delta_fs < interval_fs * (1.0 - 1e-9))
    throw ConfigError("pulse width must be at least the frame interval");
  const long long m = std::llround(delta_fs / interval_fs);
  if (m > series.nframes()) throw ComputeError("pulse width exceeds the series span");

  const int nwin = static_cast<int>(series.nframes() / m);
  SpeckleSeries out;
  out.slice = series.slice;
  out.frame_interval_fs = static_cast<double>(m) * interval_fs;
  out.intensity.assign(static_cast<size_t>(nwin),
                       std::vector<double>(static_cast<size_t>(series.npixels()), 0.0));
  for (int w = 0; w < nwin; ++w) {
    auto& acc = out.intensity[static_cast<size_t>(w)];
    for (long long f = w * m; f < (w + 1) * m; ++f) {
      const auto& frame = series.intensity[static_cast<size_t>(f)];
      for (size_t p = 0; p < frame.size(); ++p) acc[p] += frame[p];
    }
    for (double& v : acc) v *= interval_fs;
  }
  return out;
}

}  // namespace ffbench
