#pragma once
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffbench/core/error.hpp"
#include "ffbench/forcefield/fit.hpp"
#include "ffbench/forcefield/spline_model.hpp"

namespace ffbench {

// Where a serialized spline came from: a digest of the training data plus the
// fit settings and achieved loss.
struct SplineProvenance {
  std::string dataset_hash;
  double lambda = 0.0;
  double loss = 0.0;
};

namespace detail {

inline void fnv1a_accumulate(std::uint64_t& h, const void* data, std::size_t n) {
  const unsigned char* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
}

inline void fnv1a_accumulate_double(std::uint64_t& h, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  fnv1a_accumulate(h, &bits, sizeof(bits));
}

}  // namespace detail

// Order-sensitive digest of a force dataset: atom counts, cell edges,
// positions, and reference forces, hashed as raw doubles.
inline std::string dataset_hash(const ForceDataset& dataset) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& s : dataset.samples) {
    const std::int64_t n = s.config.natoms();
    detail::fnv1a_accumulate(h, &n, sizeof(n));
    for (int a = 0; a < 3; ++a) detail::fnv1a_accumulate_double(h, s.config.cell.edge(a));
    for (const auto& p : s.config.positions)
      for (int a = 0; a < 3; ++a) detail::fnv1a_accumulate_double(h, p[a]);
    for (const auto& f : s.forces)
      for (int a = 0; a < 3; ++a) detail::fnv1a_accumulate_double(h, f[a]);
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline nlohmann::json spline_to_json(const SplinePairModel& model,
                                     const std::optional<SplineProvenance>& provenance = {}) {
  nlohmann::json j;
  j["version"] = 1;
  j["knots"] = model.knots();
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& piece : model.coefficients())
    coeffs.push_back({piece[0], piece[1], piece[2], piece[3]});
  j["coefficients"] = std::move(coeffs);
  j["fit_window"] = {model.window_lo(), model.window_hi()};
  j["cutoff"] = model.cutoff();
  j["extrapolation"] = to_string(model.extrapolation());
  if (provenance) {
    j["provenance"] = {{"dataset_hash", provenance->dataset_hash},
                       {"lambda", provenance->lambda},
                       {"loss", provenance->loss}};
  }
  return j;
}

struct LoadedSpline {
  SplinePairModel model;
  std::optional<SplineProvenance> provenance;
};

inline LoadedSpline spline_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("version").get<int>();
    if (version != 1) {
      std::ostringstream os;
      os << "unsupported spline file version " << version << "; this build reads version 1";
      throw ConfigError(os.str());
    }
    const auto knots = j.at("knots").get<std::vector<double>>();
    const auto& raw_coeffs = j.at("coefficients");
    if (!raw_coeffs.is_array())
      throw ConfigError("the spline file coefficients entry must be an array");
    std::vector<SplinePairModel::Piece> coeffs;
    coeffs.reserve(raw_coeffs.size());
    for (const auto& row : raw_coeffs) {
      if (!row.is_array() || row.size() != 4)
        throw ConfigError("each spline coefficient row must hold exactly four numbers");
      coeffs.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                        row[3].get<double>()});
    }
    const auto window = j.at("fit_window").get<std::vector<double>>();
    if (window.size() != 2)
      throw ConfigError("the spline file fit_window entry must hold exactly two numbers");
    const double cutoff = j.at("cutoff").get<double>();
    const auto extrapolation = spline_extrapolation_from_string(j.at("extrapolation").get<std::string>());

    std::optional<SplineProvenance> provenance;
    if (j.contains("provenance")) {
      const auto& p = j.at("provenance");
      provenance = SplineProvenance{p.at("dataset_hash").get<std::string>(),
                                    p.at("lambda").get<double>(), p.at("loss").get<double>()};
    }
    return {SplinePairModel(knots, std::move(coeffs), window[0], window[1], cutoff, extrapolation),
            std::move(provenance)};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("the spline file is malformed: ") + e.what());
  }
}

inline void save_spline_json(const std::string& path, const SplinePairModel& model,
                             const std::optional<SplineProvenance>& provenance = {}) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open spline file for writing: " + path);
  out << spline_to_json(model, provenance).dump(2) << "\n";
  if (!out) throw ConfigError("failed while writing spline file: " + path);
}

inline LoadedSpline load_spline_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spline file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("the spline file " + path + " is not valid JSON: " + e.what());
  }
  return spline_from_json(j);
}

}  // namespace ffbench
