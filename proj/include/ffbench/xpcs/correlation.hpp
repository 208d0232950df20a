#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ffbench/xpcs/speckle.hpp"

namespace ffbench {

// Intensity autocorrelation averaged over the pixels of one q bin. The
// underlying series is assumed stationary, so time averages stand in for
// ensemble averages; for an ergodic stationary series g2 >= 1 up to
// statistical error and g2(0) is the maximum.
struct G2Curve {
  double q_center = 0.0;  // 1/A
  double q_half_width = 0.0;  // 1/A
  std::vector<double> lag_ps;
  std::vector<double> g2;
  int pixels_used = 0;
};

// Optical contrast versus pulse width for one q bin, with the snapped pulse
// widths recorded. beta_stderr is the window-to-window scatter of the
// per-pattern contrast divided by sqrt(#windows).
struct ContrastCurve {
  double q_center = 0.0;
  double q_half_width = 0.0;
  std::vector<double> delta_ps;
  std::vector<double> beta;
  std::vector<double> beta_stderr;
  int pixels_used = 0;
};

struct DecayFit {
  double gamma_per_ps = 0.0;  // relaxation rate, positive for a liquid
  double q_center = 0.0;  // 1/A
  double window_lo_ps = 0.0;
  double window_hi_ps = 0.0;
  double r_squared = 0.0;  // goodness of the log-linear fit
  int points = 0;
};

struct CorrelationTime {
  double tau_ps = 0.0;
  double resolution_ps = 0.0;  // spacing of the bracketing grid interval
};

namespace detail {

// Bin pixels with a helpful error when the bin is too empty to correlate.
inline std::vector<int> require_bin_pixels(const DetectorSlice& slice, double q_center,
                                           double half_width) {
  std::vector<int> pix = pixels_in_bin(slice, q_center, half_width);
  if (pix.size() >= 2) return pix;
  const double lo = q_center - half_width, hi = q_center + half_width;
  double below = -1.0, above = -1.0;
  for (int p = 0; p < slice.pixels(); ++p) {
    const double qn = norm(slice.q[static_cast<size_t>(p)]);
    if (qn < lo && qn > below) below = qn;
    if (qn >= hi && (above < 0.0 || qn < above)) above = qn;
  }
  std::string msg = "q bin [" + std::to_string(lo) + ", " + std::to_string(hi) + ") 1/A holds " +
                    std::to_string(pix.size()) + " pixel(s), need at least 2; nearest pixel |q| " +
                    (below >= 0.0 ? std::to_string(below) : std::string("none")) + " below, " +
                    (above >= 0.0 ? std::to_string(above) : std::string("none")) + " above";
  throw ComputeError(msg);
}

inline double pixel_mean(const SpeckleSeries& series, int pixel) {
  double sum = 0.0;
  for (const auto& frame : series.intensity) sum += frame[static_cast<size_t>(pixel)];
  const double mean = sum / series.nframes();
  if (!(mean > 0.0))
    throw ComputeError("pixel " + std::to_string(pixel) +
                       " has zero mean intensity; its autocorrelation is undefined");
  return mean;
}

}  // namespace detail

// g2(q, tau): per-pixel time autocorrelation normalized by the squared
// per-pixel time mean, then averaged over the pixels of the bin
// [q_center - half, q_center + half).
inline G2Curve g2(const SpeckleSeries& series, double q_center, double half_width,
                  double max_lag_ps) {
  series.validate();
  const int nframes = series.nframes();
  if (nframes < 2) throw ComputeError("g2 needs at least two frames");
  if (!(max_lag_ps >= 0.0)) throw ConfigError("maximum lag must be non-negative");
  const double interval_ps = series.frame_interval_fs / 1000.0;
  const double span_ps = (nframes - 1) * interval_ps;
  if (max_lag_ps > span_ps * (1.0 + 1e-9))
    throw ComputeError("maximum lag exceeds the series span");
  const int max_lag = static_cast<int>(std::floor(max_lag_ps / interval_ps + 1e-9));

  const std::vector<int> pix = detail::require_bin_pixels(series.slice, q_center, half_width);

  G2Curve curve;
  curve.q_center = q_center;
  curve.q_half_width = half_width;
  curve.pixels_used = static_cast<int>(pix.size());
  curve.lag_ps.resize(static_cast<size_t>(max_lag) + 1);
  curve.g2.assign(static_cast<size_t>(max_lag) + 1, 0.0);
  for (int l = 0; l <= max_lag; ++l) curve.lag_ps[static_cast<size_t>(l)] = l * interval_ps;

  for (int p : pix) {
    const double mean = detail::pixel_mean(series, p);
    for (int l = 0; l <= max_lag; ++l) {
      double acc = 0.0;
      for (int t = 0; t + l < nframes; ++t)
        acc += series.intensity[static_cast<size_t>(t)][static_cast<size_t>(p)] *
               series.intensity[static_cast<size_t>(t + l)][static_cast<size_t>(p)];
      curve.g2[static_cast<size_t>(l)] += acc / (nframes - l) / (mean * mean);
    }
  }
  for (double& v : curve.g2) v /= static_cast<double>(pix.size());
  return curve;
}

// beta_0(q): g2(q, 0) - 1 averaged over the bin pixels, i.e. the contrast
// read off the time variation of each pixel separately.
inline double beta_zero(const SpeckleSeries& series, double q_center, double half_width) {
  series.validate();
  if (series.nframes() < 2) throw ComputeError("beta_zero needs at least two frames");
  const std::vector<int> pix = detail::require_bin_pixels(series.slice, q_center, half_width);
  double acc = 0.0;
  for (int p : pix) {
    const double mean = detail::pixel_mean(series, p);
    double sq = 0.0;
    for (const auto& frame : series.intensity) {
      const double v = frame[static_cast<size_t>(p)];
      sq += v * v;
    }
    acc += sq / series.nframes() / (mean * mean) - 1.0;
  }
  return acc / static_cast<double>(pix.size());
}

// beta_Delta(q): for each pulse width, coarse-grain the series over
// non-overlapping windows, then take the variance-over-squared-mean of the
// integrated intensity across the bin pixels per window (the unbiased pixel
// variance) and average over windows. Pulse widths are snapped to whole
// frames; duplicates after snapping are merged and the curve is ascending.
inline ContrastCurve beta_delta(const SpeckleSeries& series, double q_center, double half_width,
                                const std::vector<double>& deltas_ps) {
  series.validate();
  if (deltas_ps.empty()) throw ConfigError("beta_delta needs at least one pulse width");
  const std::vector<int> pix = detail::require_bin_pixels(series.slice, q_center, half_width);

  std::vector<long long> frames_per_pulse;
  for (double d : deltas_ps) {
    const double delta_fs = d * 1000.0;
    if (delta_fs < series.frame_interval_fs * (1.0 - 1e-9))
      throw ConfigError("pulse width must be at least the frame interval");
    frames_per_pulse.push_back(std::llround(delta_fs / series.frame_interval_fs));
  }
  std::sort(frames_per_pulse.begin(), frames_per_pulse.end());
  frames_per_pulse.erase(std::unique(frames_per_pulse.begin(), frames_per_pulse.end()),
                         frames_per_pulse.end());

  ContrastCurve curve;
  curve.q_center = q_center;
  curve.q_half_width = half_width;
  curve.pixels_used = static_cast<int>(pix.size());
  const double m = static_cast<double>(pix.size());
  for (long long frames : frames_per_pulse) {
    const SpeckleSeries coarse =
        pulse_integrate(series, static_cast<double>(frames) * series.frame_interval_fs / 1000.0);
    std::vector<double> per_window;
    per_window.reserve(static_cast<size_t>(coarse.nframes()));
    for (const auto& frame : coarse.intensity) {
      double mean = 0.0;
      for (int p : pix) mean += frame[static_cast<size_t>(p)];
      mean /= m;
      if (!(mean > 0.0))
        throw ComputeError("pulse window has zero mean intensity over the q bin");
      double var = 0.0;
      for (int p : pix) {
        const double d = frame[static_cast<size_t>(p)] - mean;
        var += d * d;
      }
      var /= (m - 1.0);
      per_window.push_back(var / (mean * mean));
    }
    double beta = 0.0;
    for (double b : per_window) beta += b;
    beta /= static_cast<double>(per_window.size());
    double scatter = 0.0;
    for (double b : per_window) scatter += (b - beta) * (b - beta);
    const double stderr_beta =
        per_window.size() > 1
            ? std::sqrt(scatter / (static_cast<double>(per_window.size()) - 1.0) /
                        static_cast<double>(per_window.size()))
            : 0.0;
    curve.delta_ps.push_back(coarse.frame_interval_fs / 1000.0);
    curve.beta.push_back(beta);
    curve.beta_stderr.push_back(stderr_beta);
  }
  return curve;
}

// Exponential decay rate of g2 - 1: weighted least squares on log(g2 - 1)
// versus lag over the window beyond the early-time exclusion,
// Gamma = -slope / 2.  The statistical error on g2 is roughly uniform in
// lag, so after taking the log it grows as 1 / (g2 - 1); weighting each
// point by (g2 - 1)^2 restores equal error footing and keeps the noisy
// low-signal tail from steering the slope.  Points with g2 - 1 <= 0 carry
// no signal above the noise floor and are excluded; at least five usable
// points are required.  r_squared is the weighted coefficient of
// determination of the log-linear fit.
inline DecayFit fit_decay(const G2Curve& curve, double early_exclusion_ps = 0.5) {
  if (!(early_exclusion_ps >= 0.0)) throw ConfigError("early-time exclusion must be non-negative");
  std::vector<double> tau, logg, weight;
  for (size_t i = 0; i < curve.lag_ps.size(); ++i) {
    if (curve.lag_ps[i] <= early_exclusion_ps * (1.0 + 1e-12)) continue;
    const double excess = curve.g2[i] - 1.0;
    if (!(excess > 0.0)) continue;
    tau.push_back(curve.lag_ps[i]);
    logg.push_back(std::log(excess));
    weight.push_back(excess * excess);
  }
  const int n = static_cast<int>(tau.size());
  if (n < 5)
    throw ComputeError("decay fit has " + std::to_string(n) +
                       " usable points beyond the exclusion window, need at least 5");
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = weight[static_cast<size_t>(i)];
    const double x = tau[static_cast<size_t>(i)];
    const double y = logg[static_cast<size_t>(i)];
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double denom = sw * sxx - sx * sx;
  if (!(denom > 0.0)) throw ComputeError("decay fit window has no lag spread");
  const double slope = (sw * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / sw;
  double ss_res = 0.0, ss_tot = 0.0;
  const double y_mean = sy / sw;
  for (int i = 0; i < n; ++i) {
    const double w = weight[static_cast<size_t>(i)];
    const double r = logg[static_cast<size_t>(i)] - (intercept + slope * tau[static_cast<size_t>(i)]);
    ss_res += w * r * r;
    const double d = logg[static_cast<size_t>(i)] - y_mean;
    ss_tot += w * d * d;
  }
  DecayFit fit;
  fit.gamma_per_ps = -0.5 * slope;
  fit.q_center = curve.q_center;
  fit.window_lo_ps = tau.front();
  fit.window_hi_ps = tau.back();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points = n;
  return fit;
}

// Pulse width at which the contrast drops to half its maximum: linear
// interpolation between the bracketing samples, scanning from the maximum
// towards longer pulses. The reported resolution is the width of the
// bracketing grid interval.
inline CorrelationTime correlation_time(const ContrastCurve& curve) {
  const size_t n = curve.delta_ps.size();
  if (n < 2) throw ComputeError("correlation time needs at least two contrast points");
  size_t imax = 0;
  for (size_t i = 1; i < n; ++i)
    if (curve.beta[i] > curve.beta[imax]) imax = i;
  const double beta_max = curve.beta[imax];
  if (!(beta_max > 0.0)) throw ComputeError("contrast curve has no positive maximum");
  for (size_t i = imax; i + 1 < n; ++i) {
    const double y0 = curve.beta[i] / beta_max;
    const double y1 = curve.beta[i + 1] / beta_max;
    if (y0 >= 0.5 && y1 < 0.5) {
      CorrelationTime out;
      out.resolution_ps = curve.delta_ps[i + 1] - curve.delta_ps[i];
      out.tau_ps = curve.delta_ps[i] +
                   (y0 - 0.5) * (curve.delta_ps[i + 1] - curve.delta_ps[i]) / (y0 - y1);
      return out;
    }
  }
  throw ComputeError("contrast does not drop to half its maximum within the pulse-width range");
}

}  // namespace ffbench
