#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ffbench/core/configuration.hpp"
#include "ffbench/core/error.hpp"
#include "ffbench/forcefield/evaluate.hpp"
#include "ffbench/forcefield/spline_model.hpp"
#include "ffbench/md/neighbor_list.hpp"

namespace ffbench {

// Training data for the surrogate: configurations paired with the reference
// forces acting on every atom.
struct ForceDataset {
  struct Sample {
    Configuration config;
    std::vector<Vec3> forces;  // eV/A, one per atom
  };
  std::vector<Sample> samples;

  void validate() const {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      samples[s].config.validate();
      if (samples[s].forces.size() != static_cast<std::size_t>(samples[s].config.natoms())) {
        std::ostringstream os;
        os << "force dataset sample " << s << " has " << samples[s].forces.size()
           << " force rows for " << samples[s].config.natoms() << " atoms";
        throw ConfigError(os.str());
      }
    }
  }
};

// Evaluate a model over strided trajectory frames to produce a dataset whose
// reference forces come from that model.
inline ForceDataset dataset_from_trajectory(const Trajectory& traj, const PairModel& model,
                                            std::size_t stride = 1) {
  if (stride == 0) throw ConfigError("dataset stride must be at least 1");
  ForceDataset out;
  for (std::size_t f = 0; f < traj.frames.size(); f += stride) {
    const Configuration& c = traj.frames[f];
    auto list = build_neighbor_list(c, model.cutoff(), 0.0);
    out.samples.push_back({c, evaluate(model, c, list).forces});
  }
  return out;
}

// Model predictions on every sample of a dataset.
inline std::vector<std::vector<Vec3>> predict_forces(const PairModel& model,
                                                     const ForceDataset& dataset) {
  std::vector<std::vector<Vec3>> out;
  out.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    auto list = build_neighbor_list(s.config, model.cutoff(), 0.0);
    out.push_back(evaluate(model, s.config, list).forces);
  }
  return out;
}

inline std::vector<std::vector<Vec3>> reference_forces(const ForceDataset& dataset) {
  std::vector<std::vector<Vec3>> out;
  out.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) out.push_back(s.forces);
  return out;
}

// Range of minimum-image pair distances below `cutoff_A` present in a dataset;
// the usual source of a data-driven fit window.
struct PairRange {
  double min_A = 0.0;
  double max_A = 0.0;
  std::size_t count = 0;
};

inline PairRange observed_pair_range(const ForceDataset& dataset, double cutoff_A) {
  if (!(cutoff_A > 0.0)) throw ConfigError("pair-range cutoff must be positive");
  PairRange range;
  range.min_A = std::numeric_limits<double>::infinity();
  for (const auto& s : dataset.samples) {
    const auto list = build_neighbor_list(s.config, cutoff_A, 0.0);
    for (int i = 0; i < list.natoms(); ++i)
      for (int k = list.offsets[static_cast<std::size_t>(i)];
           k < list.offsets[static_cast<std::size_t>(i) + 1]; ++k) {
        const int j = list.partners[static_cast<std::size_t>(k)];
        const double r =
            norm(minimum_image(s.config.positions[i] - s.config.positions[j], s.config.cell));
        if (r >= cutoff_A) continue;
        range.min_A = std::min(range.min_A, r);
        range.max_A = std::max(range.max_A, r);
        ++range.count;
      }
  }
  if (range.count == 0)
    throw ComputeError("the dataset contains no pair distances below the cutoff");
  return range;
}

struct FitOptions {
  int knot_count = 24;
  double window_lo_A = 0.0;
  double window_hi_A = 0.0;
  double lambda = 0.01;
  double cutoff_A = 0.0;  // 0 means the window top doubles as the cutoff
  SplineExtrapolation extrapolation = SplineExtrapolation::linear;
  int max_iterations = 200;
  double relative_tolerance = 1e-8;

  double effective_cutoff() const { return cutoff_A > 0.0 ? cutoff_A : window_hi_A; }

  void validate() const {
    if (knot_count < 4) throw ConfigError("the spline fit needs at least four knots");
    if (!(window_lo_A > 0.0) || !(window_hi_A > window_lo_A))
      throw ConfigError("the fit window must satisfy 0 < lo < hi");
    if (effective_cutoff() < window_hi_A - 1e-12)
      throw ConfigError("the fit window must lie within (0, cutoff]");
    if (lambda < 0.0) throw ConfigError("the net-force penalty weight must be non-negative");
    if (max_iterations < 1 || !(relative_tolerance > 0.0))
      throw ConfigError("fit iteration controls must be positive");
  }
};

struct FitReport {
  double loss_total = 0.0;
  double loss_l1 = 0.0;       // mean absolute force-component error
  double loss_penalty = 0.0;  // L1 norm of the mean predicted force
  double lambda = 0.0;
  double force_mae = 0.0;
  double force_stddev = 0.0;
  std::optional<double> r_squared;
  int iterations = 0;
  bool converged = false;
  std::size_t component_count = 0;
  std::size_t pairs_in_window = 0;
  std::size_t pairs_below_window = 0;
};

namespace detail {

// Cubic B-spline basis on a clamped knot vector over the given breakpoints.
// Evaluation follows the standard local triangular recursions for values and
// derivatives of the four active basis functions.
class CubicBsplineBasis {
 public:
  explicit CubicBsplineBasis(std::vector<double> breakpoints)
      : t_(std::move(breakpoints)) {
    const std::size_t K = t_.size();
    U_.resize(K + 6);
    for (std::size_t j = 0; j < U_.size(); ++j) {
      const std::size_t clamped = j < 3 ? 0 : std::min(j - 3, K - 1);
      U_[j] = t_[clamped];
    }
  }

  int nbasis() const { return static_cast<int>(t_.size()) + 2; }
  const std::vector<double>& breakpoints() const { return t_; }

  // Index of the breakpoint interval containing x (clamped at the ends).
  int interval_of(double x) const {
    const auto it = std::upper_bound(t_.begin(), t_.end(), x);
    const std::size_t idx = static_cast<std::size_t>(it - t_.begin());
    const std::size_t last = t_.size() - 2;
    return static_cast<int>(std::min(idx == 0 ? std::size_t{0} : idx - 1, last));
  }

  // Values of the four active basis functions at x; the first active basis
  // index equals the interval index.
  void values(double x, int interval, std::array<double, 4>& N) const {
    const int i = interval + 3;
    double left[4], right[4];
    N = {1.0, 0.0, 0.0, 0.0};
    for (int j = 1; j <= 3; ++j) {
      left[j] = x - U_[static_cast<std::size_t>(i + 1 - j)];
      right[j] = U_[static_cast<std::size_t>(i + j)] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double temp = N[static_cast<std::size_t>(r)] / (right[r + 1] + left[j - r]);
        N[static_cast<std::size_t>(r)] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      N[static_cast<std::size_t>(j)] = saved;
    }
  }

  // ders[m][j]: m-th derivative (m <= 3) of active basis j at x.
  void derivatives(double x, int interval, std::array<std::array<double, 4>, 4>& ders) const {
    const int i = interval + 3;
    const int p = 3;
    double left[4], right[4];
    double ndu[4][4];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
      left[j] = x - U_[static_cast<std::size_t>(i + 1 - j)];
      right[j] = U_[static_cast<std::size_t>(i + j)] - x;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        ndu[j][r] = right[r + 1] + left[j - r];
        const double temp = ndu[r][j - 1] / ndu[j][r];
        ndu[r][j] = saved + right[r + 1] * temp;
        saved = left[j - r] * temp;
      }
      ndu[j][j] = saved;
    }
    for (int j = 0; j <= p; ++j) ders[0][static_cast<std::size_t>(j)] = ndu[j][p];
    for (int r = 0; r <= p; ++r) {
      int s1 = 0, s2 = 1;
      double a[2][4];
      a[0][0] = 1.0;
      for (int k = 1; k <= 3; ++k) {
        double d = 0.0;
        const int rk = r - k, pk = p - k;
        if (r >= k) {
          a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
          d = a[s2][0] * ndu[rk][pk];
        }
        const int j1 = rk >= -1 ? 1 : -rk;
        const int j2 = r - 1 <= pk ? k - 1 : p - r;
        for (int j = j1; j <= j2; ++j) {
          a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
          d += a[s2][j] * ndu[rk + j][pk];
        }
        if (r <= pk) {
          a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
          d += a[s2][k] * ndu[r][pk];
        }
        ders[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = d;
        std::swap(s1, s2);
      }
    }
    double factor = p;
    for (int k = 1; k <= 3; ++k) {
      for (int j = 0; j <= p; ++j) ders[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *= factor;
      factor *= p - k;
    }
  }

 private:
  std::vector<double> t_;
  std::vector<double> U_;
};

// Cholesky solve of the (ridge-stabilized) normal equations, in place.
inline std::vector<double> solve_spd(std::vector<double> M, std::vector<double> b, int n) {
  for (int j = 0; j < n; ++j) {
    double pivot = M[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double l = M[static_cast<std::size_t>(j) * n + k];
      pivot -= l * l;
    }
    if (!(pivot > 0.0))
      throw ComputeError("the spline fit normal equations are not positive definite; "
                         "the pair-distance coverage is too thin for this knot count");
    pivot = std::sqrt(pivot);
    M[static_cast<std::size_t>(j) * n + j] = pivot;
    for (int i = j + 1; i < n; ++i) {
      double v = M[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        v -= M[static_cast<std::size_t>(i) * n + k] * M[static_cast<std::size_t>(j) * n + k];
      M[static_cast<std::size_t>(i) * n + j] = v / pivot;
    }
  }
  for (int i = 0; i < n; ++i) {
    double v = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) v -= M[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = v / M[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = b[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) v -= M[static_cast<std::size_t>(k) * n + i] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(i)] = v / M[static_cast<std::size_t>(i) * n + i];
  }
  return b;
}

}  // namespace detail

struct FitResult {
  SplinePairModel model;
  FitReport report;
};

// Fit the piecewise-cubic radial force to per-atom reference forces by
// minimizing the mean absolute force-component error plus lambda times the L1
// norm of the mean predicted force.  The L1 problem is solved by iteratively
// reweighted least squares, stopping once the objective is stationary to the
// requested relative tolerance.
inline FitResult fit_surrogate(const ForceDataset& dataset, const FitOptions& options) {
  options.validate();
  dataset.validate();
  if (dataset.samples.empty()) throw ConfigError("the force dataset is empty");

  const int K = options.knot_count;
  const double lo = options.window_lo_A, hi = options.window_hi_A;
  std::vector<double> breakpoints(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k)
    breakpoints[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (K - 1);
  breakpoints.back() = hi;
  const detail::CubicBsplineBasis basis(breakpoints);
  const int nb = basis.nbasis();

  // Basis values and slopes at the window bottom define the linear
  // continuation applied to pairs closer than the first knot.
  std::array<std::array<double, 4>, 4> ders0{};
  basis.derivatives(lo, 0, ders0);

  std::size_t total_atoms = 0;
  for (const auto& s : dataset.samples) total_atoms += static_cast<std::size_t>(s.config.natoms());
  const std::size_t rows = 3 * total_atoms;

  std::vector<double> A(rows * static_cast<std::size_t>(nb), 0.0);
  std::vector<double> y(rows, 0.0);
  std::vector<std::size_t> interval_samples(static_cast<std::size_t>(K - 1), 0);
  std::size_t pairs_in_window = 0, pairs_below_window = 0;

  std::size_t atom_base = 0;
  for (const auto& s : dataset.samples) {
    const Configuration& c = s.config;
    const int n = c.natoms();
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < 3; ++a)
        y[3 * (atom_base + static_cast<std::size_t>(i)) + static_cast<std::size_t>(a)] =
            s.forces[static_cast<std::size_t>(i)][a];

    const auto list = build_neighbor_list(c, hi, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = list.offsets[static_cast<std::size_t>(i)];
           k < list.offsets[static_cast<std::size_t>(i) + 1]; ++k) {
        const int j = list.partners[static_cast<std::size_t>(k)];
        const Vec3 d = minimum_image(c.positions[i] - c.positions[j], c.cell);
        const double r = norm(d);
        if (r >= hi) continue;
        std::array<double, 4> coeff{};
        int first_col = 0;
        if (r >= lo) {
          const int interval = basis.interval_of(r);
          basis.values(r, interval, coeff);
          first_col = interval;
          ++interval_samples[static_cast<std::size_t>(interval)];
          ++pairs_in_window;
        } else {
          ++pairs_below_window;
          if (options.extrapolation == SplineExtrapolation::clamp_to_zero) continue;
          for (int m = 0; m < 4; ++m)
            coeff[static_cast<std::size_t>(m)] =
                ders0[0][static_cast<std::size_t>(m)] + ders0[1][static_cast<std::size_t>(m)] * (r - lo);
        }
        const Vec3 u = (1.0 / r) * d;
        const std::size_t row_i = 3 * (atom_base + static_cast<std::size_t>(i));
        const std::size_t row_j = 3 * (atom_base + static_cast<std::size_t>(j));
        for (int a = 0; a < 3; ++a) {
          const double ua = u[a];
          double* arow_i = &A[(row_i + static_cast<std::size_t>(a)) * static_cast<std::size_t>(nb)];
          double* arow_j = &A[(row_j + static_cast<std::size_t>(a)) * static_cast<std::size_t>(nb)];
          for (int m = 0; m < 4; ++m) {
            arow_i[first_col + m] += ua * coeff[static_cast<std::size_t>(m)];
            arow_j[first_col + m] -= ua * coeff[static_cast<std::size_t>(m)];
          }
        }
      }
    atom_base += static_cast<std::size_t>(n);
  }

  std::vector<std::string> empty_intervals;
  for (int k = 0; k + 1 < K; ++k)
    if (interval_samples[static_cast<std::size_t>(k)] == 0) {
      std::ostringstream os;
      os.precision(4);
      os << std::fixed << "[" << breakpoints[static_cast<std::size_t>(k)] << ", "
         << breakpoints[static_cast<std::size_t>(k) + 1] << ")";
      empty_intervals.push_back(os.str());
    }
  if (!empty_intervals.empty()) {
    std::ostringstream os;
    os << "insufficient pair-distance coverage inside the fit window: no samples in ";
    for (std::size_t k = 0; k < empty_intervals.size(); ++k)
      os << (k ? ", " : "") << empty_intervals[k];
    os << " A; narrow the window or add configurations sampling these distances";
    throw ConfigError(os.str());
  }

  // Mean predicted force per component, for the net-force penalty.
  auto penalty_of = [&](const std::vector<double>& pred) {
    double mean[3] = {0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < rows; ++k) mean[k % 3] += pred[k];
    double p = 0.0;
    for (double m : mean) p += std::abs(m / static_cast<double>(total_atoms));
    return p;
  };

  std::vector<double> w(rows, 1.0);
  std::vector<double> coef;
  std::vector<double> best_coef;
  std::vector<double> pred(rows);
  double best_obj = std::numeric_limits<double>::infinity();
  double prev_obj = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    iterations = iter + 1;
    std::vector<double> M(static_cast<std::size_t>(nb) * static_cast<std::size_t>(nb), 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(nb), 0.0);
    for (std::size_t k = 0; k < rows; ++k) {
      const double* arow = &A[k * static_cast<std::size_t>(nb)];
      const double wk = w[k];
      for (int p = 0; p < nb; ++p) {
        const double wap = wk * arow[p];
        if (wap == 0.0) continue;
        rhs[static_cast<std::size_t>(p)] += wap * y[k];
        double* mrow = &M[static_cast<std::size_t>(p) * static_cast<std::size_t>(nb)];
        for (int q = p; q < nb; ++q) mrow[q] += wap * arow[q];
      }
    }
    for (int p = 0; p < nb; ++p)
      for (int q = 0; q < p; ++q)
        M[static_cast<std::size_t>(p) * nb + static_cast<std::size_t>(q)] =
            M[static_cast<std::size_t>(q) * nb + static_cast<std::size_t>(p)];
    double max_diag = 0.0;
    for (int p = 0; p < nb; ++p)
      max_diag = std::max(max_diag, M[static_cast<std::size_t>(p) * nb + static_cast<std::size_t>(p)]);
    const double ridge = 1e-12 * std::max(max_diag, 1e-300);
    for (int p = 0; p < nb; ++p) M[static_cast<std::size_t>(p) * nb + static_cast<std::size_t>(p)] += ridge;

    coef = detail::solve_spd(std::move(M), rhs, nb);

    double abs_sum = 0.0;
    for (std::size_t k = 0; k < rows; ++k) {
      const double* arow = &A[k * static_cast<std::size_t>(nb)];
      double v = 0.0;
      for (int p = 0; p < nb; ++p) v += arow[p] * coef[static_cast<std::size_t>(p)];
      pred[k] = v;
      abs_sum += std::abs(v - y[k]);
    }
    const double data_loss = abs_sum / static_cast<double>(rows);
    const double obj = data_loss + options.lambda * penalty_of(pred);

    if (obj < best_obj) {
      best_obj = obj;
      best_coef = coef;
    }
    if (obj == 0.0 ||
        (iter > 0 && std::abs(prev_obj - obj) <= options.relative_tolerance * std::max(obj, 1e-300))) {
      converged = true;
      break;
    }
    prev_obj = obj;

    const double floor = std::max(1e-14, 1e-4 * data_loss);
    for (std::size_t k = 0; k < rows; ++k)
      w[k] = 1.0 / std::max(std::abs(pred[k] - y[k]), floor);
  }

  // Final statistics from the best coefficients seen.
  coef = best_coef;
  double abs_sum = 0.0, err_sum = 0.0, err_sq = 0.0, y_sum = 0.0, y_sq = 0.0;
  for (std::size_t k = 0; k < rows; ++k) {
    const double* arow = &A[k * static_cast<std::size_t>(nb)];
    double v = 0.0;
    for (int p = 0; p < nb; ++p) v += arow[p] * coef[static_cast<std::size_t>(p)];
    pred[k] = v;
    const double e = v - y[k];
    abs_sum += std::abs(e);
    err_sum += e;
    err_sq += e * e;
    y_sum += y[k];
    y_sq += y[k] * y[k];
  }
  FitReport report;
  report.lambda = options.lambda;
  report.component_count = rows;
  report.pairs_in_window = pairs_in_window;
  report.pairs_below_window = pairs_below_window;
  report.iterations = iterations;
  report.converged = converged;
  report.loss_l1 = abs_sum / static_cast<double>(rows);
  report.loss_penalty = penalty_of(pred);
  report.loss_total = report.loss_l1 + options.lambda * report.loss_penalty;
  report.force_mae = report.loss_l1;
  const double mean_err = err_sum / static_cast<double>(rows);
  report.force_stddev =
      std::sqrt(std::max(0.0, err_sq / static_cast<double>(rows) - mean_err * mean_err));
  const double ss_tot = y_sq - y_sum * y_sum / static_cast<double>(rows);
  if (ss_tot > 0.0) report.r_squared = 1.0 - err_sq / ss_tot;

  // Convert the B-spline solution to per-interval power coefficients using
  // the curve's derivatives at each interval's left edge.
  std::vector<SplinePairModel::Piece> pieces(static_cast<std::size_t>(K - 1));
  for (int k = 0; k + 1 < K; ++k) {
    std::array<std::array<double, 4>, 4> ders{};
    basis.derivatives(breakpoints[static_cast<std::size_t>(k)], k, ders);
    double v[4] = {0.0, 0.0, 0.0, 0.0};
    for (int m = 0; m < 4; ++m)
      for (int j = 0; j < 4; ++j)
        v[m] += ders[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)] *
                coef[static_cast<std::size_t>(k + j)];
    pieces[static_cast<std::size_t>(k)] = {v[0], v[1], v[2] / 2.0, v[3] / 6.0};
  }

  SplinePairModel model(breakpoints, std::move(pieces), lo, hi, options.effective_cutoff(),
                        options.extrapolation);
  return {std::move(model), report};
}

inline FitResult fit_surrogate(const ForceDataset& dataset, int knot_count, double window_lo_A,
                               double window_hi_A, double lambda = 0.01) {
  FitOptions options;
  options.knot_count = knot_count;
  options.window_lo_A = window_lo_A;
  options.window_hi_A = window_hi_A;
  options.lambda = lambda;
  return fit_surrogate(dataset, options);
}

// Pooled force-accuracy statistics with a parity table for plotting.
struct ForceErrorStats {
  double mae = 0.0;
  double stddev = 0.0;  // spread of the error about its mean
  double bias = 0.0;    // mean signed error
  std::optional<double> r_squared;
  std::size_t count = 0;
  std::vector<std::array<double, 2>> parity;  // (reference, predicted)
};

inline ForceErrorStats force_error_stats(const std::vector<std::vector<Vec3>>& predicted,
                                         const std::vector<std::vector<Vec3>>& reference,
                                         std::size_t max_parity_points = 4096) {
  if (predicted.size() != reference.size())
    throw ConfigError("predicted and reference force sets have different numbers of configurations");
  std::size_t count = 0;
  for (std::size_t s = 0; s < predicted.size(); ++s) {
    if (predicted[s].size() != reference[s].size()) {
      std::ostringstream os;
      os << "configuration " << s << " has " << predicted[s].size() << " predicted vs "
         << reference[s].size() << " reference force rows";
      throw ConfigError(os.str());
    }
    count += 3 * predicted[s].size();
  }
  if (count == 0) throw ConfigError("force statistics need at least one force component");

  ForceErrorStats stats;
  stats.count = count;
  double abs_sum = 0.0, err_sum = 0.0, err_sq = 0.0, ref_sum = 0.0, ref_sq = 0.0;
  const std::size_t stride =
      max_parity_points == 0 ? 1 : std::max<std::size_t>(1, count / max_parity_points);
  std::size_t index = 0;
  for (std::size_t s = 0; s < predicted.size(); ++s)
    for (std::size_t i = 0; i < predicted[s].size(); ++i)
      for (int a = 0; a < 3; ++a, ++index) {
        const double p = predicted[s][i][a];
        const double r = reference[s][i][a];
        const double e = p - r;
        abs_sum += std::abs(e);
        err_sum += e;
        err_sq += e * e;
        ref_sum += r;
        ref_sq += r * r;
        if (index % stride == 0) stats.parity.push_back({r, p});
      }
  stats.mae = abs_sum / static_cast<double>(count);
  stats.bias = err_sum / static_cast<double>(count);
  stats.stddev =
      std::sqrt(std::max(0.0, err_sq / static_cast<double>(count) - stats.bias * stats.bias));
  const double ss_tot = ref_sq - ref_sum * ref_sum / static_cast<double>(count);
  if (ss_tot > 0.0) stats.r_squared = 1.0 - err_sq / ss_tot;
  return stats;
}

// Convenience: model predictions on a dataset scored against its references.
inline ForceErrorStats evaluate_force_errors(const PairModel& model, const ForceDataset& dataset,
                                             std::size_t max_parity_points = 4096) {
  return force_error_stats(predict_forces(model, dataset), reference_forces(dataset),
                           max_parity_points);
}

}  // namespace ffbench
