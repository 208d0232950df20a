#pragma once
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ffbench/melting/classify.hpp"

namespace ffbench {

// Per-frame phase decomposition of a coexistence trajectory.
struct PhaseProfile {
  int axis = 2;
  std::vector<double> times_ps;
  std::vector<double> solid_fractions;
  std::vector<std::vector<PhaseLabel>> labels;
  // Two interface planes per frame (coordinates along the axis, within the
  // cell); NaN when a frame holds a single phase and no interface exists.
  std::vector<std::array<double, 2>> interface_positions_A;
};

namespace detail {

// Locate the two solid-liquid boundary planes from a slab-resolved solid
// fraction: the ends of the longest circular run of majority-solid slabs.
inline std::array<double, 2> interface_planes(const Configuration& config,
                                              const std::vector<PhaseLabel>& labels, int axis,
                                              double slab_width_A = 3.0) {
  const double length = config.cell.edge[axis];
  const int nbins = std::max(4, static_cast<int>(std::llround(length / slab_width_A)));
  const double width = length / nbins;

  std::vector<int> total(static_cast<size_t>(nbins), 0), solid(static_cast<size_t>(nbins), 0);
  for (int i = 0; i < config.natoms(); ++i) {
    const double x = wrap_position(config.positions[static_cast<size_t>(i)], config.cell)[axis];
    int b = static_cast<int>(x / width);
    if (b >= nbins) b = nbins - 1;
    if (b < 0) b = 0;
    ++total[static_cast<size_t>(b)];
    if (labels[static_cast<size_t>(i)] == PhaseLabel::solid) ++solid[static_cast<size_t>(b)];
  }

  std::vector<bool> is_solid(static_cast<size_t>(nbins), false);
  int solid_slabs = 0;
  for (int b = 0; b < nbins; ++b) {
    is_solid[static_cast<size_t>(b)] =
        total[static_cast<size_t>(b)] > 0 && 2 * solid[static_cast<size_t>(b)] >= total[static_cast<size_t>(b)];
    if (is_solid[static_cast<size_t>(b)]) ++solid_slabs;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (solid_slabs == 0 || solid_slabs == nbins) return {nan, nan};

  // Longest circular run of solid slabs.
  int best_start = 0, best_len = 0, run_start = -1, run_len = 0;
  for (int k = 0; k < 2 * nbins; ++k) {
    const int b = k % nbins;
    if (is_solid[static_cast<size_t>(b)]) {
      if (run_len == 0) run_start = k;
      if (++run_len > best_len && run_len <= nbins) {
        best_len = run_len;
        best_start = run_start;
      }
    } else {
      run_len = 0;
    }
  }
  const double low_edge = (best_start % nbins) * width;
  const double high_edge = ((best_start + best_len) % nbins) * width;
  return {low_edge, high_edge};
}

}  // namespace detail

inline PhaseProfile phase_profile(const Trajectory& traj, const ClassifierCalibration& calib,
                                  int axis = 2) {
  if (axis < 0 || axis > 2) throw ConfigError("interface axis must be 0, 1, or 2");
  traj.validate();
  PhaseProfile profile;
  profile.axis = axis;
  for (const Configuration& frame : traj.frames) {
    Classification cl = classify_atoms(frame, calib);
    profile.times_ps.push_back(frame.time_fs / 1000.0);
    profile.solid_fractions.push_back(cl.solid_fraction());
    profile.interface_positions_A.push_back(
        detail::interface_planes(frame, cl.labels, axis));
    profile.labels.push_back(std::move(cl.labels));
  }
  return profile;
}

struct InterfaceVelocity {
  double velocity_A_ps = 0.0;  // positive = the solid grows
  double stderr_A_ps = 0.0;
  PhaseProfile profile;
};

// Least-squares slope of the solid fraction converted to the speed of one
// interface plane.  The cell holds two planes under periodic boundaries, so
// the solid slab length s(t) * L changes at twice the single-interface speed.
inline std::pair<double, double> velocity_from_fractions(const std::vector<double>& times_ps,
                                                         const std::vector<double>& fractions,
                                                         double axis_length_A) {
  if (times_ps.size() != fractions.size())
    throw ConfigError("times and solid fractions must align");
  const int n = static_cast<int>(times_ps.size());
  if (n < 2) throw ConfigError("interface velocity needs at least two frames");
  if (!(axis_length_A > 0.0)) throw ConfigError("cell length along the axis must be positive");

  for (int k = 0; k < n; ++k) {
    const double f = fractions[static_cast<size_t>(k)];
    if (f < 0.1 || f > 0.9) {
      std::ostringstream os;
      os << "coexistence lost: the " << (f < 0.1 ? "solid" : "liquid")
         << " phase left the tracking window (solid fraction " << f << ") after "
         << times_ps[static_cast<size_t>(k)] - times_ps.front()
         << " ps; shorten the fit window or move the run closer to coexistence";
      throw ComputeError(os.str());
    }
  }

  double st = 0.0, sf = 0.0;
  for (int k = 0; k < n; ++k) {
    st += times_ps[static_cast<size_t>(k)];
    sf += fractions[static_cast<size_t>(k)];
  }
  const double t_mean = st / n, f_mean = sf / n;
  double sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < n; ++k) {
    const double dt = times_ps[static_cast<size_t>(k)] - t_mean;
    sxx += dt * dt;
    sxy += dt * (fractions[static_cast<size_t>(k)] - f_mean);
  }
  if (!(sxx > 0.0)) throw ConfigError("interface velocity needs at least two distinct times");
  const double slope = sxy / sxx;  // d(solid fraction)/dt, 1/ps

  double ss_res = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = fractions[static_cast<size_t>(k)] - f_mean -
                     slope * (times_ps[static_cast<size_t>(k)] - t_mean);
    ss_res += r * r;
  }
  const double slope_var = n > 2 ? ss_res / (n - 2) / sxx : 0.0;

  const double scale = 0.5 * axis_length_A;
  return {slope * scale, std::sqrt(slope_var) * scale};
}

inline InterfaceVelocity interface_velocity(const Trajectory& traj, int axis,
                                            const ClassifierCalibration& calib) {
  InterfaceVelocity result;
  result.profile = phase_profile(traj, calib, axis);
  const double length = traj.frames.front().cell.edge[axis];
  const auto [v, err] =
      velocity_from_fractions(result.profile.times_ps, result.profile.solid_fractions, length);
  result.velocity_A_ps = v;
  result.stderr_A_ps = err;
  return result;
}

struct VelocitySample {
  double temperature_K = 0.0;
  double velocity_A_ps = 0.0;
  double stderr_A_ps = 0.0;  // <= 0 means unknown; the fit then weighs evenly
};

struct MeltingFit {
  std::vector<VelocitySample> samples;
  double slope_A_ps_K = 0.0;   // d(velocity)/dT of the fitted line
  double intercept_A_ps = 0.0; // fitted velocity at T = 0
  double t_melt_K = 0.0;
  double stderr_K = 0.0;
  bool extrapolated = false;
  std::vector<std::string> warnings;
};

// Weighted straight-line fit of interface velocity against temperature; the
// melting point is the root.  With per-sample uncertainties the weights are
// 1/stderr^2 and the parameter covariance follows directly; without them the
// fit is ordinary least squares with the covariance scaled by the residual
// variance.
inline MeltingFit melting_point(std::vector<VelocitySample> samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw ConfigError("melting-point fit needs at least two temperatures");

  bool have_errors = true;
  for (const VelocitySample& s : samples)
    if (!(s.stderr_A_ps > 0.0)) have_errors = false;

  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const VelocitySample& s : samples) {
    const double w = have_errors ? 1.0 / (s.stderr_A_ps * s.stderr_A_ps) : 1.0;
    sw += w;
    sx += w * s.temperature_K;
    sy += w * s.velocity_A_ps;
    sxx += w * s.temperature_K * s.temperature_K;
    sxy += w * s.temperature_K * s.velocity_A_ps;
  }
  const double delta = sw * sxx - sx * sx;
  if (!(delta > 1e-12 * sw * sxx))
    throw ConfigError("melting-point fit needs at least two distinct temperatures");

  MeltingFit fit;
  fit.slope_A_ps_K = (sw * sxy - sx * sy) / delta;
  fit.intercept_A_ps = (sxx * sy - sx * sxy) / delta;
  if (fit.slope_A_ps_K == 0.0)
    throw ComputeError("interface velocity shows no temperature dependence; no root exists");
  fit.t_melt_K = -fit.intercept_A_ps / fit.slope_A_ps_K;

  // Parameter covariance of (intercept, slope).
  double var_a = sxx / delta, var_b = sw / delta, cov_ab = -sx / delta;
  if (!have_errors) {
    double ss_res = 0.0;
    for (const VelocitySample& s : samples) {
      const double r = s.velocity_A_ps - fit.intercept_A_ps - fit.slope_A_ps_K * s.temperature_K;
      ss_res += r * r;
    }
    const double s2 = n > 2 ? ss_res / (n - 2) : 0.0;
    var_a *= s2;
    var_b *= s2;
    cov_ab *= s2;
  }
  const double var_t = (var_a + fit.t_melt_K * fit.t_melt_K * var_b +
                        2.0 * fit.t_melt_K * cov_ab) /
                       (fit.slope_A_ps_K * fit.slope_A_ps_K);
  fit.stderr_K = var_t > 0.0 ? std::sqrt(var_t) : 0.0;

  double t_min = samples.front().temperature_K, t_max = t_min;
  double v_min = samples.front().velocity_A_ps, v_max = v_min;
  for (const VelocitySample& s : samples) {
    t_min = std::min(t_min, s.temperature_K);
    t_max = std::max(t_max, s.temperature_K);
    v_min = std::min(v_min, s.velocity_A_ps);
    v_max = std::max(v_max, s.velocity_A_ps);
  }
  if (!(v_min < 0.0 && v_max > 0.0)) {
    fit.extrapolated = true;
    fit.warnings.push_back(
        "interface velocities do not change sign over the sampled temperatures; the melting "
        "point is an extrapolation");
  }
  if (fit.t_melt_K < t_min || fit.t_melt_K > t_max) {
    fit.extrapolated = true;
    if (fit.warnings.empty())
      fit.warnings.push_back("the fitted melting point falls outside the sampled bracket");
  }

  fit.samples = std::move(samples);
  return fit;
}

}  // namespace ffbench
