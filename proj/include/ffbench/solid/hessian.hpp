#pragma once
#include <atomic>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ffbench/core/configuration.hpp"
#include "ffbench/forcefield/evaluate.hpp"

namespace ffbench {

// Dense 3N x 3N second-derivative matrix of the potential energy, stored
// row-major in eV/A^2.  Entry (i, j) is built from forces alone as
// -d f_i / d x_j via central differences, so the operation stays valid for
// models that never expose an energy.  Provenance pins the model, the
// displacement, and a hash of the configuration it was built from.
struct HessianMatrix {
  int dimension = 0;  // 3N
  std::vector<double> entries;  // row-major, dimension * dimension
  std::string model_name;
  double delta_x_A = 0.0;
  std::string config_hash;
  bool symmetrized = false;

  double at(int i, int j) const {
    return entries[static_cast<size_t>(i) * static_cast<size_t>(dimension) +
                   static_cast<size_t>(j)];
  }
  double& at(int i, int j) {
    return entries[static_cast<size_t>(i) * static_cast<size_t>(dimension) +
                   static_cast<size_t>(j)];
  }

  void validate() const {
    if (dimension < 1) throw ComputeError("hessian has no degrees of freedom");
    if (entries.size() != static_cast<size_t>(dimension) * static_cast<size_t>(dimension))
      throw ComputeError("hessian storage does not match its dimension");
    for (double v : entries)
      if (!std::isfinite(v)) throw ComputeError("hessian holds a non-finite entry");
  }
};

namespace detail {

// FNV-1a over the raw bytes of the cell edge and positions: cheap, stable,
// and bit-exact, which is all provenance tracking needs.
inline std::string config_fingerprint(const Configuration& config) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t nbytes) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t b = 0; b < nbytes; ++b) {
      h ^= p[b];
      h *= 1099511628211ull;
    }
  };
  const int n = config.natoms();
  mix(&n, sizeof(n));
  mix(&config.cell.edge, sizeof(config.cell.edge));
  if (n > 0) mix(config.positions.data(), sizeof(Vec3) * static_cast<size_t>(n));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// Skin for the one neighbor list shared by every displaced evaluation: the
// probes move a single coordinate by delta_x, far below skin/2, so the list
// stays valid throughout; the skin must still fit the minimum-image bound
// min_edge > 2 (cutoff + skin).
inline double hessian_skin(const Configuration& config, double cutoff, double delta_x_A) {
  const double min_edge = std::min(config.cell.edge.x,
                                   std::min(config.cell.edge.y, config.cell.edge.z));
  const double headroom = 0.5 * min_edge - cutoff;
  double skin = std::min(0.3, 0.5 * headroom);
  if (!(skin > 4.0 * delta_x_A))
    throw ComputeError(
        "cell too close to the minimum-image limit to displace atoms safely: need min edge "
        "comfortably above 2 x cutoff");
  return skin;
}

}  // namespace detail

// Central-difference Hessian from forces: column j displaces one degree of
// freedom by +/- delta_x and records H_ij = [f_i(x_j - dx) - f_i(x_j + dx)] / (2 dx).
// Columns are independent pure probes (parallelized when OpenMP is enabled)
// and reproduce bitwise on recomputation.  The raw matrix is asymmetric only
// through arithmetic round-off for a conservative model.
inline HessianMatrix numeric_hessian(const Configuration& config, const PairModel& model,
                                     double delta_x_A = 3.405e-6) {
  if (!(delta_x_A > 0.0)) throw ConfigError("hessian displacement must be positive");
  config.validate();
  const int n = config.natoms();
  const int dim = 3 * n;
  const NeighborList list =
      build_neighbor_list(config, model.cutoff(), detail::hessian_skin(config, model.cutoff(), delta_x_A));

  HessianMatrix h;
  h.dimension = dim;
  h.entries.assign(static_cast<size_t>(dim) * static_cast<size_t>(dim), 0.0);
  h.model_name = model.name();
  h.delta_x_A = delta_x_A;
  h.config_hash = detail::config_fingerprint(config);

  std::atomic<bool> failed{false};
  std::string failure;

#if defined(_OPENMP)
#pragma omp parallel
#endif
  {
    Configuration local = config;
#if defined(_OPENMP)
#pragma omp for schedule(dynamic, 4)
#endif
    for (int j = 0; j < dim; ++j) {
      if (failed.load(std::memory_order_relaxed)) continue;
      const int atom = j / 3, axis = j % 3;
      const double base = config.positions[static_cast<size_t>(atom)][axis];
      try {
        local.positions[static_cast<size_t>(atom)][axis] = base + delta_x_A;
        const ForceEvaluation plus = evaluate(model, local, list);
        local.positions[static_cast<size_t>(atom)][axis] = base - delta_x_A;
        const ForceEvaluation minus = evaluate(model, local, list);
        local.positions[static_cast<size_t>(atom)][axis] = base;
        for (int i = 0; i < dim; ++i) {
          const double fp = plus.forces[static_cast<size_t>(i / 3)][i % 3];
          const double fm = minus.forces[static_cast<size_t>(i / 3)][i % 3];
          const double entry = (fm - fp) / (2.0 * delta_x_A);
          if (!std::isfinite(entry)) {
            std::ostringstream os;
            os << "non-finite hessian entry (" << i << ", " << j << ")";
            throw ComputeError(os.str());
          }
          h.at(i, j) = entry;
        }
      } catch (const std::exception& e) {
        local.positions[static_cast<size_t>(atom)][axis] = base;
        std::ostringstream os;
        os << "hessian column " << j << " (atom " << atom << ", axis " << axis
           << "): " << e.what();
#if defined(_OPENMP)
#pragma omp critical(ffbench_hessian_error)
#endif
        {
          if (!failed.load(std::memory_order_relaxed)) {
            failure = os.str();
            failed.store(true, std::memory_order_relaxed);
          }
        }
      }
    }
  }
  if (failed.load()) throw ComputeError(failure);
  return h;
}

// (H + H^T) / 2 with the symmetrized flag set; exactly symmetric because the
// mirrored entries are computed by the same commutative expression.
inline HessianMatrix symmetrize(const HessianMatrix& h) {
  if (h.dimension < 1 ||
      h.entries.size() != static_cast<size_t>(h.dimension) * static_cast<size_t>(h.dimension))
    throw ComputeError("symmetrize requires a square matrix");
  HessianMatrix out = h;
  for (int i = 0; i < h.dimension; ++i)
    for (int j = 0; j < h.dimension; ++j)
      out.at(i, j) = 0.5 * (h.at(i, j) + h.at(j, i));
  out.symmetrized = true;
  return out;
}

enum class MatrixNorm { spectral, frobenius };

struct SymmetricityScore {
  double value = 0.0;  // (|A_s| - |A_a|) / (|A_s| + |A_a|) in [-1, 1]
  std::string norm_name;  // "spectral" or "frobenius"
};

namespace detail {

// y = M x over row-major square storage.
inline void dense_matvec(const std::vector<double>& m, const std::vector<double>& x,
                         std::vector<double>& y, int n) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < n; ++i) {
    const double* row = m.data() + static_cast<size_t>(i) * static_cast<size_t>(n);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += row[j] * x[static_cast<size_t>(j)];
    y[static_cast<size_t>(i)] = s;
  }
}

// y = M^T x over row-major square storage (column gather, race-free per j).
inline void dense_matvec_t(const std::vector<double>& m, const std::vector<double>& x,
                           std::vector<double>& y, int n) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += m[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] *
           x[static_cast<size_t>(i)];
    y[static_cast<size_t>(j)] = s;
  }
}

// Largest singular value by power iteration on A^T A.  The value itself (a
// Rayleigh quotient) converges far faster than the iterate's direction,
// which is all the score needs.
inline double spectral_norm(const std::vector<double>& a, int n) {
  std::vector<double> v(static_cast<size_t>(n)), av(static_cast<size_t>(n)),
      atav(static_cast<size_t>(n));
  // Deterministic start with a dash of irrational structure so the iterate
  // is never orthogonal to the leading singular space by accident.
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] = 1.0 + 0.5 * std::cos(2.39996322972865332 * (i + 1));
  double prev = -1.0;
  for (int it = 0; it < 2000; ++it) {
    dense_matvec(a, v, av, n);
    dense_matvec_t(a, av, atav, n);
    double nrm = 0.0, rayleigh = 0.0, vv = 0.0;
    for (int i = 0; i < n; ++i) {
      nrm += atav[static_cast<size_t>(i)] * atav[static_cast<size_t>(i)];
      rayleigh += v[static_cast<size_t>(i)] * atav[static_cast<size_t>(i)];
      vv += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;  // A^T A annihilated the iterate: norm 0 matrix
    const double sigma2 = rayleigh / vv;
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = atav[static_cast<size_t>(i)] / nrm;
    const double sigma = std::sqrt(std::max(sigma2, 0.0));
    if (prev >= 0.0 && std::abs(sigma - prev) <= 3e-14 * std::max(1.0, sigma)) return sigma;
    prev = sigma;
  }
  return prev;
}

inline double frobenius_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

// Symmetricity score S(A) = (|A_s| - |A_a|) / (|A_s| + |A_a|) with A_s, A_a
// the symmetric and antisymmetric parts: exactly 1 for symmetric input, -1
// for antisymmetric input, scale-invariant in between.  The spectral norm is
// the default and is recorded on the score; Frobenius is available for
// sensitivity probes.
inline SymmetricityScore symmetricity(const std::vector<double>& a, int n,
                                      MatrixNorm norm = MatrixNorm::spectral) {
  if (n < 1 || a.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
    throw ComputeError("symmetricity requires a square matrix");
  std::vector<double> sym(a.size()), anti(a.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const size_t ij = static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j);
      const size_t ji = static_cast<size_t>(j) * static_cast<size_t>(n) + static_cast<size_t>(i);
      sym[ij] = 0.5 * (a[ij] + a[ji]);
      anti[ij] = 0.5 * (a[ij] - a[ji]);
    }
  double ns = 0.0, na = 0.0;
  SymmetricityScore score;
  if (norm == MatrixNorm::spectral) {
    ns = detail::spectral_norm(sym, n);
    na = detail::spectral_norm(anti, n);
    score.norm_name = "spectral";
  } else {
    ns = detail::frobenius_norm(sym);
    na = detail::frobenius_norm(anti);
    score.norm_name = "frobenius";
  }
  if (!(ns + na > 0.0))
    throw ComputeError("symmetricity of the zero matrix is undefined");
  score.value = (ns - na) / (ns + na);
  if (score.value > 1.0) score.value = 1.0;
  if (score.value < -1.0) score.value = -1.0;
  return score;
}

inline SymmetricityScore symmetricity(const HessianMatrix& h,
                                      MatrixNorm norm = MatrixNorm::spectral) {
  return symmetricity(h.entries, h.dimension, norm);
}

}  // namespace ffbench
