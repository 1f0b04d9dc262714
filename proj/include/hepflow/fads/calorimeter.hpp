#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <utility>

#include "hepflow/fads/candidate.hpp"
#include "hepflow/fads/detector.hpp"
#include "hepflow/fwk/rng.hpp"

namespace hepflow::fads {

struct TowerIndex {
  int ieta = 0, iphi = 0;
  friend bool operator==(const TowerIndex&, const TowerIndex&) = default;
};

// Cell containing (eta, phi); nullopt outside |eta| < eta_max.
inline std::optional<TowerIndex> tower_index(const DetectorConfig& det, double eta, double phi) {
  const double fe = std::floor((eta + det.eta_max) / det.deta);
  if (!(fe >= 0) || !(fe < det.n_eta())) return std::nullopt;
  int iphi = static_cast<int>(std::floor((wrap_phi(phi) + pi) / det.dphi));
  iphi = std::clamp(iphi, 0, det.n_phi() - 1);
  return TowerIndex{static_cast<int>(fe), iphi};
}

inline double tower_eta(const DetectorConfig& det, int ieta) { return -det.eta_max + (ieta + 0.5) * det.deta; }
inline double tower_phi(const DetectorConfig& det, int iphi) { return -pi + (iphi + 0.5) * det.dphi; }

// Energy a particle deposits (EM + HAD) if it lands in the grid.
inline std::array<double, 2> deposit(const DetectorConfig& det, const Candidate& c) {
  const auto f = det.fraction(c.pdg_id);
  return {c.momentum.e * f[0], c.momentum.e * f[1]};
}

/// Sums deposits per (eta, phi) cell, smears each non-empty compartment once
/// (cells in eta-major order, EM before HAD, one normal draw each), drops
/// towers below the threshold and returns massless towers pointing at the
/// cell centers. The cell is taken from the momentum direction.
inline Candidates calorimeter(const Candidates& particles, const DetectorConfig& det, fwk::CounterRng& rng) {
  std::map<int, std::array<double, 2>> cells;
  const int n_phi = det.n_phi();
  for (const auto& c : particles) {
    const auto dep = deposit(det, c);
    if (dep[0] == 0 && dep[1] == 0) continue;
    const auto idx = tower_index(det, c.momentum.eta(), c.momentum.phi());
    if (!idx) continue;
    auto& cell = cells[idx->ieta * n_phi + idx->iphi];
    cell[0] += dep[0];
    cell[1] += dep[1];
  }

  Candidates towers;
  for (const auto& [key, e] : cells) {
    double total = 0;
    for (int k = 0; k < 2; ++k) {
      if (e[k] <= 0) continue;
      const double sigma = (k == 0 ? det.em : det.had).sigma(e[k]);
      total += std::max(0.0, e[k] + sigma * rng.normal());
    }
    if (total < det.tower_e_min || total <= 0) continue;
    const double eta = tower_eta(det, key / n_phi), phi = tower_phi(det, key % n_phi);
    Candidate t;
    t.momentum = FourMomentum::from_pt_eta_phi_m(total / std::cosh(eta), eta, phi, 0.0);
    t.momentum.e = total;
    towers.push_back(std::move(t));
  }
  return towers;
}

}  // namespace hepflow::fads
