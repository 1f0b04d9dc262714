#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/fads/kinematics.hpp"

namespace hepflow::fads {

/// Piecewise-constant function of (pt, |eta|). values[i][j] covers
/// pt_edges[i] <= pt < pt_edges[i+1] and eta_edges[j] <= |eta| < eta_edges[j+1].
struct Table {
  std::vector<double> pt_edges{0.0, std::numeric_limits<double>::infinity()};
  std::vector<double> eta_edges{0.0, std::numeric_limits<double>::infinity()};
  std::vector<std::vector<double>> values{{0.0}};

  static Table constant(double v) {
    Table t;
    t.values = {{v}};
    return t;
  }

  void validate(const std::string& what) const {
    auto check_edges = [&](const std::vector<double>& e, const char* axis) {
      if (e.size() < 2) throw ConfigError(what + ": " + axis + " needs at least two edges");
      for (std::size_t i = 0; i + 1 < e.size(); ++i)
        if (!(e[i] < e[i + 1])) throw ConfigError(what + ": " + axis + " must be strictly increasing");
    };
    check_edges(pt_edges, "pt_edges");
    check_edges(eta_edges, "eta_edges");
    if (values.size() != pt_edges.size() - 1)
      throw ConfigError(what + ": values needs one row per pt bin");
    for (const auto& row : values)
      if (row.size() != eta_edges.size() - 1) throw ConfigError(what + ": values rows need one entry per eta bin");
  }

  // nullopt outside the tabulated domain.
  std::optional<double> lookup(double pt, double abs_eta) const {
    auto bin = [](const std::vector<double>& e, double x) -> std::optional<std::size_t> {
      if (!(x >= e.front()) || !(x < e.back())) return std::nullopt;
      return static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x) - e.begin()) - 1;
    };
    const auto i = bin(pt_edges, pt);
    const auto j = bin(eta_edges, abs_eta);
    if (!i || !j) return std::nullopt;
    return values[*i][*j];
  }

  double operator()(double pt, double abs_eta, double outside) const {
    return lookup(pt, abs_eta).value_or(outside);
  }
};

// sigma(E) = sqrt(S^2 E + N^2 + C^2 E^2)
struct Resolution {
  double S = 0, N = 0, C = 0;
  double sigma(double e) const { return std::sqrt(S * S * e + N * N + C * C * e * e); }
};

struct DetectorConfig {
  double B = 2.0;             // T, along z
  double radius = 1.29;       // m
  double half_length = 3.0;   // m
  double eta_max = 5.0;
  double deta = 0.1;
  double dphi = 2 * pi / 72;
  Resolution em{0.1, 0.3, 0.01};
  Resolution had{0.5, 1.0, 0.05};
  double tower_e_min = 0.5;   // GeV
  // (EM, HAD) energy fractions keyed by |pdg|; others use default_fraction
  std::map<int, std::array<double, 2>> fractions{{11, {1, 0}}, {22, {1, 0}}, {111, {1, 0}},
                                                 {12, {0, 0}}, {13, {0, 0}}, {14, {0, 0}}, {16, {0, 0}}};
  std::array<double, 2> default_fraction{0, 1};

  int n_eta() const { return static_cast<int>(std::lround(2 * eta_max / deta)); }
  int n_phi() const { return static_cast<int>(std::lround(2 * pi / dphi)); }

  std::array<double, 2> fraction(int pdg) const {
    const auto it = fractions.find(std::abs(pdg));
    return it == fractions.end() ? default_fraction : it->second;
  }

  void validate() const {
    if (!(B >= 0)) throw ConfigError("detector: B must be >= 0");
    if (!(radius > 0)) throw ConfigError("detector: radius must be > 0");
    if (!(half_length > 0)) throw ConfigError("detector: half_length must be > 0");
    if (!(eta_max > 0) || !(deta > 0) || !(dphi > 0)) throw ConfigError("detector: tower grid needs positive sizes");
    if (std::abs(n_eta() * deta - 2 * eta_max) > 1e-9 * eta_max)
      throw ConfigError("detector: deta must divide 2*eta_max");
    if (std::abs(n_phi() * dphi - 2 * pi) > 1e-9) throw ConfigError("detector: dphi must divide 2*pi");
  }
};

namespace detail {

inline double edge_value(const nlohmann::json& j, const std::string& what) {
  if (j.is_string() && (j == "inf" || j == "+inf")) return std::numeric_limits<double>::infinity();
  if (!j.is_number()) throw ConfigError(what + ": edges must be numbers or \"inf\"");
  return j.get<double>();
}

inline Resolution resolution_from(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + ": expected [S, N, C]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace detail

/// A table is either a bare number (constant everywhere) or
/// {"pt_edges": [...], "eta_edges": [...], "values": [[...], ...]}.
inline Table table_from_json(const nlohmann::json& j, const std::string& what) {
  if (j.is_number()) {
    Table t = Table::constant(j.get<double>());
    return t;
  }
  if (!j.is_object()) throw ConfigError(what + ": expected a number or a table object");
  Table t;
  try {
    t.pt_edges.clear();
    t.eta_edges.clear();
    for (const auto& e : j.at("pt_edges")) t.pt_edges.push_back(detail::edge_value(e, what));
    for (const auto& e : j.at("eta_edges")) t.eta_edges.push_back(detail::edge_value(e, what));
    t.values = j.at("values").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
  t.validate(what);
  return t;
}

inline DetectorConfig detector_from_json(const nlohmann::json& j) {
  DetectorConfig d;
  if (j.is_null()) return d;
  try {
    d.B = j.value("B", d.B);
    d.radius = j.value("radius", d.radius);
    d.half_length = j.value("half_length", d.half_length);
    if (j.contains("towers")) {
      const auto& t = j["towers"];
      d.eta_max = t.value("eta_max", d.eta_max);
      d.deta = t.value("deta", d.deta);
      d.dphi = t.value("dphi", d.dphi);
      d.tower_e_min = t.value("e_min", d.tower_e_min);
    }
    if (j.contains("em_resolution")) d.em = detail::resolution_from(j["em_resolution"], "detector.em_resolution");
    if (j.contains("had_resolution")) d.had = detail::resolution_from(j["had_resolution"], "detector.had_resolution");
    if (j.contains("fractions")) {
      d.fractions.clear();
      for (const auto& [k, v] : j["fractions"].items()) {
        const auto f = v.get<std::array<double, 2>>();
        if (k == "default") d.default_fraction = f;
        else d.fractions[std::abs(std::stoi(k))] = f;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("detector: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError("detector.fractions: keys must be pdg ids or \"default\"");
  }
  d.validate();
  return d;
}

}  // namespace hepflow::fads
