#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "ffbench/core/configuration.hpp"

namespace ffbench {

// Remove periodic wrapping from a trajectory by accumulating minimum-image
// frame-to-frame displacements. Requires every per-frame displacement to be
// well inside the minimum-image window; a displacement magnitude reaching
// half the smallest cell edge means the frame interval is too coarse to
// reconstruct the continuous path.
inline Trajectory unwrap(const Trajectory& traj) {
  traj.validate();
  Trajectory out = traj;
  const int nf = traj.nframes();
  const int n = traj.frames.front().natoms();
  for (int f = 1; f < nf; ++f) {
    const Configuration& prev = traj.frames[static_cast<size_t>(f - 1)];
    const Configuration& cur = traj.frames[static_cast<size_t>(f)];
    const double limit = 0.5 * std::min({cur.cell.edge.x, cur.cell.edge.y, cur.cell.edge.z});
    for (int i = 0; i < n; ++i) {
      const Vec3 d = minimum_image(
          cur.positions[static_cast<size_t>(i)] - prev.positions[static_cast<size_t>(i)], cur.cell);
      if (norm(d) >= limit * (1.0 - 1e-12))
        throw ComputeError("cannot unwrap: atom " + std::to_string(i) + " moves " +
                           std::to_string(norm(d)) + " A between frames " + std::to_string(f - 1) +
                           " and " + std::to_string(f) +
                           ", at least half the smallest cell edge (frame interval too coarse)");
      out.frames[static_cast<size_t>(f)].positions[static_cast<size_t>(i)] =
          out.frames[static_cast<size_t>(f - 1)].positions[static_cast<size_t>(i)] + d;
    }
  }
  return out;
}

struct MsdCurve {
  std::vector<double> lag_ps;
  std::vector<double> msd;   // A^2
  std::vector<int> origins;  // time origins averaged at each lag
};

namespace detail {

// Direct O(F^2 N) multi-origin evaluation; reference path for the FFT route.
inline MsdCurve msd_direct(const Trajectory& traj, int max_lag_frames) {
  const int nf = traj.nframes();
  const int n = traj.frames.front().natoms();
  MsdCurve curve;
  for (int lag = 0; lag <= max_lag_frames; ++lag) {
    double acc = 0.0;
    const int norigins = nf - lag;
    for (int t0 = 0; t0 < norigins; ++t0) {
      const auto& a = traj.frames[static_cast<size_t>(t0)].positions;
      const auto& b = traj.frames[static_cast<size_t>(t0 + lag)].positions;
      for (int i = 0; i < n; ++i)
        acc += norm2(b[static_cast<size_t>(i)] - a[static_cast<size_t>(i)]);
    }
    curve.lag_ps.push_back(lag * traj.frame_interval_fs * 1e-3);
    curve.msd.push_back(acc / (static_cast<double>(norigins) * n));
    curve.origins.push_back(norigins);
  }
  return curve;
}

// FFT multi-origin evaluation (Wiener-Khinchin): for each atom and component,
//   sum_t |x(t+l) - x(t)|^2 = S1(l) - 2 * autocorr(l)
// with S1 built from prefix sums of x^2 and the autocorrelation evaluated by
// zero-padded FFT. O(N F log F).
inline MsdCurve msd_fft(const Trajectory& traj, int max_lag_frames) {
  const int nf = traj.nframes();
  const int n = traj.frames.front().natoms();
  size_t padded = 1;
  while (padded < 2 * static_cast<size_t>(nf)) padded *= 2;

  std::vector<double> sq_sum(static_cast<size_t>(nf), 0.0);  // sum over atoms of |r(t)|^2
  std::vector<double> corr(static_cast<size_t>(nf), 0.0);    // sum over atoms/components of autocorr
  Eigen::FFT<double> fft;
  std::vector<double> series(padded);
  std::vector<std::complex<double>> spec(padded);

  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) {
      std::fill(series.begin(), series.end(), 0.0);
      for (int t = 0; t < nf; ++t)
        series[static_cast<size_t>(t)] =
            traj.frames[static_cast<size_t>(t)].positions[static_cast<size_t>(i)][a];
      fft.fwd(spec, series);
      for (auto& z : spec) z *= std::conj(z);
      fft.inv(series, spec);
      for (int t = 0; t < nf; ++t) corr[static_cast<size_t>(t)] += series[static_cast<size_t>(t)];
    }
    for (int t = 0; t < nf; ++t)
      sq_sum[static_cast<size_t>(t)] +=
          norm2(traj.frames[static_cast<size_t>(t)].positions[static_cast<size_t>(i)]);
  }

  // Prefix sums of sq_sum for the S1 term.
  std::vector<double> prefix(static_cast<size_t>(nf) + 1, 0.0);
  for (int t = 0; t < nf; ++t) prefix[static_cast<size_t>(t) + 1] = prefix[static_cast<size_t>(t)] + sq_sum[static_cast<size_t>(t)];

  MsdCurve curve;
  for (int lag = 0; lag <= max_lag_frames; ++lag) {
    const int norigins = nf - lag;
    // sum_{t=0}^{norigins-1} (|r(t)|^2 + |r(t+lag)|^2)
    const double s1 = prefix[static_cast<size_t>(norigins)] +
                      (prefix[static_cast<size_t>(nf)] - prefix[static_cast<size_t>(lag)]);
    const double val = (s1 - 2.0 * corr[static_cast<size_t>(lag)]) / (static_cast<double>(norigins) * n);
    curve.lag_ps.push_back(lag * traj.frame_interval_fs * 1e-3);
    curve.msd.push_back(std::max(val, 0.0));
    curve.origins.push_back(norigins);
  }
  return curve;
}

}  // namespace detail

// Multi-origin mean squared displacement of an unwrapped trajectory, averaged
// over atoms and over every admissible time origin at unit frame stride.
// max_lag_ps <= 0 uses the full trajectory span.
inline MsdCurve msd(const Trajectory& traj, double max_lag_ps = 0.0) {
  traj.validate();
  if (traj.nframes() < 2) throw ComputeError("mean squared displacement needs at least two frames");
  const double interval_ps = traj.frame_interval_fs * 1e-3;
  const double span_ps = (traj.nframes() - 1) * interval_ps;
  int max_lag_frames = traj.nframes() - 1;
  if (max_lag_ps > 0.0) {
    if (max_lag_ps > span_ps * (1.0 + 1e-9))
      throw ComputeError("max lag exceeds the trajectory span");
    max_lag_frames = static_cast<int>(std::floor(max_lag_ps / interval_ps + 1e-9));
  }
  if (max_lag_frames < 1) throw ComputeError("max lag shorter than one frame interval");

  const double direct_cost = static_cast<double>(traj.nframes()) * max_lag_frames *
                             traj.frames.front().natoms();
  if (direct_cost < 2e7) return detail::msd_direct(traj, max_lag_frames);
  return detail::msd_fft(traj, max_lag_frames);
}

struct DiffusivityFit {
  double d_um2_s = 0.0;         // diffusion coefficient, um^2/s
  double d_stderr_um2_s = 0.0;  // standard error of the fitted slope, um^2/s
  double slope_A2_ps = 0.0;     // fitted MSD slope, A^2/ps
  double intercept_A2 = 0.0;
  double window_lo_ps = 0.0;
  double window_hi_ps = 0.0;
  int points = 0;
};

// Least-squares line through MSD(t) over a lag window, converted to a
// diffusion coefficient via MSD = 6 D t. The window must start at or after
// 1 ps so the ballistic regime never contaminates the fit.
// 1 A^2/ps = 1e4 um^2/s.
inline DiffusivityFit fit_diffusivity(const MsdCurve& curve, double window_lo_ps,
                                      double window_hi_ps) {
  if (window_lo_ps < 1.0 - 1e-9)
    throw ConfigError("diffusivity fit window must start at or after 1 ps");
  if (!(window_hi_ps > window_lo_ps)) throw ConfigError("diffusivity fit window is empty");

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (size_t k = 0; k < curve.lag_ps.size(); ++k) {
    const double t = curve.lag_ps[k];
    if (t < window_lo_ps - 1e-9 || t > window_hi_ps + 1e-9) continue;
    sx += t;
    sy += curve.msd[k];
    sxx += t * t;
    sxy += t * curve.msd[k];
    ++m;
  }
  if (m < 3) throw ComputeError("diffusivity fit window contains fewer than 3 MSD points");
  const double denom = m * sxx - sx * sx;
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;

  double ss_res = 0.0;
  for (size_t k = 0; k < curve.lag_ps.size(); ++k) {
    const double t = curve.lag_ps[k];
    if (t < window_lo_ps - 1e-9 || t > window_hi_ps + 1e-9) continue;
    const double r = curve.msd[k] - (slope * t + intercept);
    ss_res += r * r;
  }
  const double slope_var = m > 2 ? ss_res / (m - 2) * m / denom : 0.0;

  DiffusivityFit fit;
  fit.slope_A2_ps = slope;
  fit.intercept_A2 = intercept;
  fit.d_um2_s = slope / 6.0 * 1e4;
  fit.d_stderr_um2_s = std::sqrt(std::max(slope_var, 0.0)) / 6.0 * 1e4;
  fit.window_lo_ps = window_lo_ps;
  fit.window_hi_ps = window_hi_ps;
  fit.points = m;
  return fit;
}

}  // namespace ffbench
