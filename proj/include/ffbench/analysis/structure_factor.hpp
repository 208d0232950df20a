#pragma once
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffbench/analysis/qgrid.hpp"
#include "ffbench/core/configuration.hpp"

namespace ffbench {

// X-ray atomic form factor as a four-Gaussian fit:
//   f(q) = c + sum_i a_i * exp(-b_i * (q / 4π)^2)
// with q in 1/A. At q = 0 the value approaches the atomic number.
struct FormFactorEntry {
  std::array<double, 4> a{};
  std::array<double, 4> b{};
  double c = 0.0;

  double value(double q) const {
    const double s = q / (4.0 * std::numbers::pi);
    const double s2 = s * s;
    double f = c;
    for (int i = 0; i < 4; ++i) f += a[static_cast<size_t>(i)] * std::exp(-b[static_cast<size_t>(i)] * s2);
    return f;
  }
};

struct FormFactorTable {
  std::map<std::string, FormFactorEntry> entries;

  bool has(const std::string& species) const { return entries.count(species) != 0; }
  double value(const std::string& species, double q) const {
    auto it = entries.find(species);
    if (it == entries.end())
      throw ComputeError("form factor table has no entry for species '" + species + "'");
    return it->second.value(q);
  }

  // Argon, four-Gaussian X-ray form factor coefficients
  // (International Tables for Crystallography, Vol. C, Table 6.1.1.4).
  static FormFactorTable argon() {
    FormFactorTable t;
    t.entries["Ar"] = FormFactorEntry{{7.4845, 6.7723, 0.6539, 1.6442},
                                      {0.9072, 14.8407, 43.8983, 33.3929},
                                      1.4445};
    return t;
  }

  // Unit scattering power for every listed species (all atoms weighted equally).
  static FormFactorTable unit(const std::vector<std::string>& species) {
    FormFactorTable t;
    for (const auto& s : species) t.entries[s] = FormFactorEntry{{0, 0, 0, 0}, {0, 0, 0, 0}, 1.0};
    return t;
  }
};

inline FormFactorTable load_form_factor_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open form factor table: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed form factor table " + path + ": " + e.what());
  }
  FormFactorTable t;
  if (!j.contains("species") || !j["species"].is_object())
    throw ConfigError("form factor table " + path + " lacks a 'species' object");
  for (const auto& [name, entry] : j["species"].items()) {
    FormFactorEntry e;
    const auto a = entry.at("a").get<std::vector<double>>();
    const auto b = entry.at("b").get<std::vector<double>>();
    if (a.size() != 4 || b.size() != 4)
      throw ConfigError("form factor entry for '" + name + "' must list four Gaussians");
    std::copy(a.begin(), a.end(), e.a.begin());
    std::copy(b.begin(), b.end(), e.b.begin());
    e.c = entry.at("c").get<double>();
    t.entries[name] = e;
  }
  return t;
}

struct StructureFactorCurve {
  std::vector<double> q;  // 1/A
  std::vector<double> s;  // dimensionless
};

namespace detail {

inline void require_commensurate(const Vec3& q, const SimulationCell& cell) {
  const double two_pi = 2.0 * std::numbers::pi;
  for (int a = 0; a < 3; ++a) {
    const double n = q[a] * cell.edge[a] / two_pi;
    if (std::abs(n - std::round(n)) > 1e-9)
      throw ComputeError("wave vector component " + std::to_string(q[a]) +
                         " 1/A is not commensurate with cell edge " + std::to_string(cell.edge[a]) +
                         " A");
  }
}

}  // namespace detail

// Instantaneous static structure factor at one commensurate wave vector:
//   S(q) = |sum_j exp(-i q . r_j)|^2 / N.
inline double structure_factor_at(const Configuration& config, const Vec3& q) {
  config.validate();
  detail::require_commensurate(q, config.cell);
  double re = 0.0, im = 0.0;
  for (const auto& r : config.positions) {
    const double phase = dot(q, r);
    re += std::cos(phase);
    im += std::sin(phase);
  }
  return (re * re + im * im) / config.natoms();
}

// Form-factor-weighted variant:
//   S_w(q) = |sum_j f_j(q) exp(-i q . r_j)|^2 / sum_j f_j(q)^2.
// With f == 1 for every atom this reduces exactly to the unweighted form.
inline double structure_factor_weighted_at(const Configuration& config, const Vec3& q,
                                           const FormFactorTable& table) {
  config.validate();
  detail::require_commensurate(q, config.cell);
  const double qn = norm(q);
  std::vector<double> f_by_type;
  f_by_type.reserve(config.types->names.size());
  for (const auto& name : config.types->names) f_by_type.push_back(table.value(name, qn));
  double re = 0.0, im = 0.0, norm_sq = 0.0;
  for (int i = 0; i < config.natoms(); ++i) {
    const double f = f_by_type[static_cast<size_t>(config.species[static_cast<size_t>(i)])];
    const double phase = dot(q, config.positions[static_cast<size_t>(i)]);
    re += f * std::cos(phase);
    im += f * std::sin(phase);
    norm_sq += f * f;
  }
  if (!(norm_sq > 0.0)) throw ComputeError("form factor weights vanish for every atom");
  return (re * re + im * im) / norm_sq;
}

// Structure factor over a list of commensurate wave vectors; the curve lists
// |q| and S in input order.
inline StructureFactorCurve structure_factor_direct(const Configuration& config,
                                                    const std::vector<Vec3>& q_vectors) {
  StructureFactorCurve curve;
  curve.q.reserve(q_vectors.size());
  curve.s.reserve(q_vectors.size());
  for (const auto& q : q_vectors) {
    curve.q.push_back(norm(q));
    curve.s.push_back(structure_factor_at(config, q));
  }
  return curve;
}

inline StructureFactorCurve structure_factor_weighted(const Configuration& config,
                                                      const std::vector<Vec3>& q_vectors,
                                                      const FormFactorTable& table) {
  StructureFactorCurve curve;
  curve.q.reserve(q_vectors.size());
  curve.s.reserve(q_vectors.size());
  for (const auto& q : q_vectors) {
    curve.q.push_back(norm(q));
    curve.s.push_back(structure_factor_weighted_at(config, q, table));
  }
  return curve;
}

// Isotropic S(q) estimate: for each requested |q| bin center, average the
// (optionally weighted) structure factor over every commensurate vector within
// half_width of the center and over every stride-th frame. Centers that catch
// no commensurate vector are dropped from the curve.
inline StructureFactorCurve structure_factor_isotropic(const Trajectory& traj,
                                                       const std::vector<double>& centers,
                                                       double half_width, int stride = 1,
                                                       const FormFactorTable* table = nullptr) {
  traj.validate();
  if (stride < 1) throw ComputeError("stride must be >= 1");
  const SimulationCell& cell = traj.frames.front().cell;
  StructureFactorCurve curve;
  for (double qc : centers) {
    const auto ring = commensurate_ring(cell, qc, half_width);
    if (ring.empty()) continue;
    double acc = 0.0;
    int count = 0;
    for (int f = 0; f < traj.nframes(); f += stride) {
      const Configuration& c = traj.frames[static_cast<size_t>(f)];
      for (const auto& q : ring) {
        acc += table ? structure_factor_weighted_at(c, q, *table) : structure_factor_at(c, q);
        ++count;
      }
    }
    curve.q.push_back(qc);
    curve.s.push_back(acc / count);
  }
  return curve;
}

}  // namespace ffbench
