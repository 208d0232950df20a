#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "ffbench/core/error.hpp"
#include "ffbench/forcefield/pair_model.hpp"

namespace ffbench {

// Behaviour of the scalar force below the first knot, where the fit has no
// support: continue linearly with the boundary value and slope, or clamp to
// zero.  Linear continuation is the default because a zero-force core lets
// approaching atoms pass through each other.
enum class SplineExtrapolation { clamp_to_zero, linear };

inline const char* to_string(SplineExtrapolation e) {
  return e == SplineExtrapolation::linear ? "linear" : "clamp-to-zero";
}

inline SplineExtrapolation spline_extrapolation_from_string(const std::string& s) {
  if (s == "linear") return SplineExtrapolation::linear;
  if (s == "clamp-to-zero") return SplineExtrapolation::clamp_to_zero;
  throw ConfigError("unknown spline extrapolation policy \"" + s +
                    "\" (expected \"linear\" or \"clamp-to-zero\")");
}

// Piecewise-cubic surrogate for the scalar radial force f(r) = -dV/dr.
// Interval k spans [knot_k, knot_{k+1}) and stores power coefficients in the
// local variable s = r - knot_k:  f = a + b s + c s^2 + d s^3.  The force is
// zero beyond the last knot (and hence beyond the cutoff), and the pair
// energy is reconstructed as V(r) = integral of f from r to the cutoff, so
// forces and energy are consistent by construction.
class SplinePairModel final : public PairModel {
 public:
  using Piece = std::array<double, 4>;  // a, b, c, d

  SplinePairModel(std::vector<double> knots, std::vector<Piece> coefficients,
                  double window_lo_A, double window_hi_A, double cutoff_A,
                  SplineExtrapolation extrapolation = SplineExtrapolation::linear)
      : knots_(std::move(knots)),
        coef_(std::move(coefficients)),
        window_lo_(window_lo_A),
        window_hi_(window_hi_A),
        cutoff_(cutoff_A),
        extrapolation_(extrapolation) {
    validate_shape();
    validate_continuity();
    accumulate_energy();
  }

  ModelKind kind() const override { return ModelKind::spline; }
  std::string name() const override { return "cubic-spline"; }
  double cutoff() const override { return cutoff_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Piece>& coefficients() const { return coef_; }
  double window_lo() const { return window_lo_; }
  double window_hi() const { return window_hi_; }
  SplineExtrapolation extrapolation() const { return extrapolation_; }

  double pair_force(double r) const override {
    if (r <= 0.0) throw ComputeError("pair force undefined for r <= 0");
    if (r >= cutoff_) return 0.0;
    return force_unchecked(r);
  }

  double pair_energy(double r) const override {
    if (r <= 0.0) throw ComputeError("pair energy undefined for r <= 0");
    if (r >= cutoff_) return 0.0;
    return energy_unchecked(r);
  }

  // Analytic slope df/dr, used by validation and Hessian work.
  double force_derivative(double r) const {
    if (r <= 0.0) throw ComputeError("pair force undefined for r <= 0");
    if (r >= cutoff_ || r >= knots_.back()) return 0.0;
    if (r < knots_.front()) {
      return extrapolation_ == SplineExtrapolation::linear ? coef_.front()[1] : 0.0;
    }
    const std::size_t k = interval_of(r);
    const double s = r - knots_[k];
    const Piece& p = coef_[k];
    return p[1] + s * (2.0 * p[2] + s * 3.0 * p[3]);
  }

  // Hot-loop forms on squared distance; the caller guarantees r2 < cutoff^2.
  double force_over_r(double r2) const {
    const double r = std::sqrt(r2);
    return force_unchecked(r) / r;
  }
  double energy_r2(double r2) const { return energy_unchecked(std::sqrt(r2)); }

 private:
  void validate_shape() const {
    if (knots_.size() < 2)
      throw ConfigError("a spline force needs at least two knots");
    if (coef_.size() + 1 != knots_.size())
      throw ConfigError("spline coefficient count must be one less than the knot count");
    if (!(knots_.front() > 0.0))
      throw ConfigError("spline knots must be positive radii");
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k)
      if (!(knots_[k + 1] > knots_[k]))
        throw ConfigError("spline knots must be strictly ascending");
    if (!(cutoff_ > 0.0) || knots_.back() > cutoff_ + 1e-9)
      throw ConfigError("spline knots must lie at or below the cutoff");
    if (!(window_lo_ > 0.0) || !(window_hi_ > window_lo_) || window_hi_ > cutoff_ + 1e-9)
      throw ConfigError("spline fit window must satisfy 0 < lo < hi <= cutoff");
    for (const Piece& p : coef_)
      for (double v : p)
        if (!std::isfinite(v)) throw ConfigError("spline coefficients must be finite");
  }

  // The force must be continuous and once-differentiable at interior knots.
  // Pieces built from a smooth basis satisfy this exactly; the check guards
  // hand-edited or corrupted serialized models.
  void validate_continuity() const {
    for (std::size_t k = 0; k + 1 < coef_.size(); ++k) {
      const double h = knots_[k + 1] - knots_[k];
      const Piece& p = coef_[k];
      const double v_left = p[0] + h * (p[1] + h * (p[2] + h * p[3]));
      const double s_left = p[1] + h * (2.0 * p[2] + h * 3.0 * p[3]);
      const double v_right = coef_[k + 1][0];
      const double s_right = coef_[k + 1][1];
      const double v_tol = 1e-6 * std::max({1.0, std::abs(v_left), std::abs(v_right)});
      const double s_tol = 1e-6 * std::max({1.0, std::abs(s_left), std::abs(s_right)});
      if (std::abs(v_left - v_right) > v_tol || std::abs(s_left - s_right) > s_tol) {
        std::ostringstream os;
        os << "spline force is not C1 at the interior knot r = " << knots_[k + 1]
           << " A (value step " << v_left - v_right << ", slope step "
           << s_left - s_right << ")";
        throw ConfigError(os.str());
      }
    }
  }

  void accumulate_energy() {
    v_at_knot_.assign(knots_.size(), 0.0);
    for (std::size_t k = coef_.size(); k-- > 0;) {
      const double h = knots_[k + 1] - knots_[k];
      const Piece& p = coef_[k];
      const double integral =
          h * (p[0] + h * (p[1] / 2.0 + h * (p[2] / 3.0 + h * p[3] / 4.0)));
      v_at_knot_[k] = v_at_knot_[k + 1] + integral;
    }
  }

  std::size_t interval_of(double r) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
    const std::size_t idx = static_cast<std::size_t>(it - knots_.begin());
    return std::min(idx == 0 ? std::size_t{0} : idx - 1, coef_.size() - 1);
  }

  double force_unchecked(double r) const {
    if (r >= knots_.back()) return 0.0;
    if (r < knots_.front()) {
      if (extrapolation_ == SplineExtrapolation::clamp_to_zero) return 0.0;
      return coef_.front()[0] + coef_.front()[1] * (r - knots_.front());
    }
    const std::size_t k = interval_of(r);
    const double s = r - knots_[k];
    const Piece& p = coef_[k];
    return p[0] + s * (p[1] + s * (p[2] + s * p[3]));
  }

  double energy_unchecked(double r) const {
    if (r >= knots_.back()) return 0.0;
    if (r < knots_.front()) {
      const double u = knots_.front() - r;
      if (extrapolation_ == SplineExtrapolation::clamp_to_zero) return v_at_knot_.front();
      return v_at_knot_.front() + u * (coef_.front()[0] - u * coef_.front()[1] / 2.0);
    }
    const std::size_t k = interval_of(r);
    const double h = knots_[k + 1] - knots_[k];
    const double s = r - knots_[k];
    const Piece& p = coef_[k];
    auto antiderivative = [&](double x) {
      return x * (p[0] + x * (p[1] / 2.0 + x * (p[2] / 3.0 + x * p[3] / 4.0)));
    };
    return v_at_knot_[k + 1] + antiderivative(h) - antiderivative(s);
  }

  std::vector<double> knots_;
  std::vector<Piece> coef_;
  double window_lo_, window_hi_, cutoff_;
  SplineExtrapolation extrapolation_;
  std::vector<double> v_at_knot_;  // V(knot_k) = integral of f from knot_k up
};

}  // namespace ffbench
