#pragma once
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ffbench/core/units.hpp"
#include "ffbench/solid/hessian.hpp"

#if defined(FFBENCH_HAVE_LAPACKE)
#include <lapacke.h>
#else
#include <Eigen/Dense>
#endif

namespace ffbench {

// Phonon density of states: normalized histogram of the eigenfrequencies
// nu_n = (1/2pi) sqrt(lambda_n / m) of the mass-reduced symmetrized Hessian.
// The near-zero translational modes are excluded from the histogram and
// counted; negative eigenvalues (imaginary frequencies) are counted
// separately and flagged — they signal an unstable configuration, never a
// frequency bin.
struct PdosHistogram {
  std::vector<double> bin_edges_THz;  // bins + 1 ascending edges from 0
  std::vector<double> density;        // per-THz, integrates to 1
  std::vector<double> frequencies_THz;  // all binned modes, ascending
  int zero_mode_count = 0;
  int imaginary_mode_count = 0;
  std::vector<std::string> warnings;  // instability signals, empty when clean

  void validate() const {
    if (bin_edges_THz.size() < 2 || density.size() + 1 != bin_edges_THz.size())
      throw ComputeError("pdos histogram shape is inconsistent");
    double integral = 0.0;
    for (size_t b = 0; b < density.size(); ++b) {
      if (bin_edges_THz[b + 1] <= bin_edges_THz[b])
        throw ComputeError("pdos bin edges must ascend");
      if (!(density[b] >= 0.0)) throw ComputeError("pdos density must be non-negative");
      integral += density[b] * (bin_edges_THz[b + 1] - bin_edges_THz[b]);
    }
    if (std::abs(integral - 1.0) > 1e-9)
      throw ComputeError("pdos histogram is not normalized");
  }
};

namespace detail {

// Eigenvalues of a symmetric matrix, ascending.  The input buffer is
// destroyed.  Symmetry makes the row-major storage self-transposed, so it
// feeds the column-major LAPACK route without a copy.
inline std::vector<double> symmetric_eigenvalues(std::vector<double>&& a, int n) {
  std::vector<double> w(static_cast<size_t>(n));
#if defined(FFBENCH_HAVE_LAPACKE)
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
  if (info != 0)
    throw ComputeError("symmetric eigenvalue solver failed (info = " + std::to_string(info) + ")");
#else
  Eigen::Map<const Eigen::MatrixXd> m(a.data(), n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ComputeError("symmetric eigenvalue solver failed");
  for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = solver.eigenvalues()[i];
#endif
  std::sort(w.begin(), w.end());
  return w;
}

// lambda in eV/A^2 over mass in amu -> frequency in THz.
inline double mode_frequency_THz(double lambda_ev_A2, double mass_amu) {
  const double omega_radfs = std::sqrt(lambda_ev_A2 / mass_amu * units::evA2amu_to_radfs2);
  return omega_radfs / (2.0 * std::numbers::pi) * 1e3;  // cycles/fs -> THz
}

}  // namespace detail

// Eigendecompose the symmetrized Hessian of a single-species crystal and bin
// the resulting frequencies.  Zero-mode tolerance is |lambda| < 1e-8 x the
// largest eigenvalue (scale-free); a healthy periodic crystal shows exactly
// the three translational zero modes and nothing negative, and departures
// are recorded as warnings rather than errors so reports can surface them.
inline PdosHistogram pdos(const HessianMatrix& h, double mass_amu, int bins) {
  h.validate();
  if (!h.symmetrized)
    throw ConfigError("pdos requires a symmetrized hessian; call symmetrize first");
  if (!(mass_amu > 0.0)) throw ConfigError("pdos requires a positive mass");
  if (bins < 1) throw ConfigError("pdos requires at least one bin");

  std::vector<double> lambda =
      detail::symmetric_eigenvalues(std::vector<double>(h.entries), h.dimension);
  const double lambda_max = lambda.back();
  if (!(lambda_max > 0.0))
    throw ComputeError("no positive eigenvalues: the configuration has no vibrational modes");
  const double tol = 1e-8 * lambda_max;

  PdosHistogram out;
  for (double v : lambda) {
    if (v < -tol)
      ++out.imaginary_mode_count;
    else if (v <= tol)
      ++out.zero_mode_count;
    else
      out.frequencies_THz.push_back(detail::mode_frequency_THz(v, mass_amu));
  }
  if (out.frequencies_THz.empty())
    throw ComputeError("no positive eigenvalues: the configuration has no vibrational modes");

  if (out.imaginary_mode_count > 0) {
    std::ostringstream os;
    os << "instability: " << out.imaginary_mode_count
       << " imaginary mode(s) (negative eigenvalues down to " << lambda.front() << " eV/A^2)";
    out.warnings.push_back(os.str());
  }
  if (out.zero_mode_count > 3) {
    std::ostringstream os;
    os << "instability: " << out.zero_mode_count
       << " near-zero modes, more than the 3 translations of a periodic crystal";
    out.warnings.push_back(os.str());
  }

  const double nu_max = out.frequencies_THz.back();
  const double hi = nu_max * (1.0 + 1e-9);
  const double width = hi / bins;
  std::vector<double> counts(static_cast<size_t>(bins), 0.0);
  for (double nu : out.frequencies_THz) {
    int b = static_cast<int>(nu / width);
    if (b >= bins) b = bins - 1;
    counts[static_cast<size_t>(b)] += 1.0;
  }
  const double total = static_cast<double>(out.frequencies_THz.size());
  out.bin_edges_THz.resize(static_cast<size_t>(bins) + 1);
  out.density.resize(static_cast<size_t>(bins));
  for (int b = 0; b <= bins; ++b) out.bin_edges_THz[static_cast<size_t>(b)] = b * width;
  for (int b = 0; b < bins; ++b)
    out.density[static_cast<size_t>(b)] = counts[static_cast<size_t>(b)] / (total * width);
  out.validate();
  return out;
}

// L1 distance between the probability masses of two equally-binned
// histograms: sum_b |p_a(b) - p_b(b)|, in [0, 2].  Robust to the tiny edge
// shifts different displacement choices induce.
inline double pdos_l1_distance(const PdosHistogram& a, const PdosHistogram& b) {
  a.validate();
  b.validate();
  if (a.density.size() != b.density.size())
    throw ComputeError("pdos L1 distance requires equal bin counts");
  double l1 = 0.0;
  for (size_t i = 0; i < a.density.size(); ++i) {
    const double pa = a.density[i] * (a.bin_edges_THz[i + 1] - a.bin_edges_THz[i]);
    const double pb = b.density[i] * (b.bin_edges_THz[i + 1] - b.bin_edges_THz[i]);
    l1 += std::abs(pa - pb);
  }
  return l1;
}

}  // namespace ffbench
