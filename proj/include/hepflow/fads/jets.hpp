#pragma once

// Generalized-kt sequential recombination, N^3 strategy: every iteration
// recomputes all pair and beam distances.

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/fads/kinematics.hpp"

namespace hepflow::fads {

struct JetDefinition {
  double p = -1;   // -1 anti-kt, 0 Cambridge/Aachen, 1 kt
  double R = 0.4;
};

struct PseudoJet {
  FourMomentum momentum;
  std::vector<int> constituents;  // input indices, in merge order
  int history_id = 0;
};

/// Clusters `inputs` (pt > 0 each). Inputs get history ids 0..n-1 and every
/// merge result takes the next id. Distance ties go to pairs over beams, then
/// to the smallest (i, j) position in the id-ordered active list; a merge
/// adds the higher-id momentum to the lower-id one. Returns jets with
/// pt >= pt_min, by descending pt.
inline std::vector<PseudoJet> cluster_jets(const std::vector<FourMomentum>& inputs, const JetDefinition& def,
                                           double pt_min) {
  if (!(def.R > 0)) throw ConfigError("jet definition needs R > 0");
  std::vector<PseudoJet> active;
  active.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i)
    active.push_back({inputs[i], {static_cast<int>(i)}, static_cast<int>(i)});
  int next_id = static_cast<int>(inputs.size());
  const double inv_r2 = 1.0 / (def.R * def.R);

  std::vector<PseudoJet> jets;
  std::vector<double> kt, eta, phi;
  while (!active.empty()) {
    const std::size_t n = active.size();
    kt.resize(n);
    eta.resize(n);
    phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      kt[i] = std::pow(active[i].momentum.pt2(), def.p);
      eta[i] = active[i].momentum.eta();
      phi[i] = active[i].momentum.phi();
    }
    // (distance, is_beam, i, j)
    std::tuple<double, int, std::size_t, std::size_t> best{kt[0], 1, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      best = std::min(best, std::tuple{kt[i], 1, i, i});
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = std::min(kt[i], kt[j]) * delta_r2(eta[i], phi[i], eta[j], phi[j]) * inv_r2;
        best = std::min(best, std::tuple{d, 0, i, j});
      }
    }
    const auto [d, beam, i, j] = best;
    (void)d;
    if (beam) {
      jets.push_back(std::move(active[i]));
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(i));
      continue;
    }
    PseudoJet merged;
    merged.momentum = active[i].momentum + active[j].momentum;
    merged.constituents = active[i].constituents;
    merged.constituents.insert(merged.constituents.end(), active[j].constituents.begin(),
                               active[j].constituents.end());
    merged.history_id = next_id++;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(j));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(i));
    active.push_back(std::move(merged));
  }

  std::erase_if(jets, [&](const PseudoJet& j) { return !(j.momentum.pt() >= pt_min); });
  std::stable_sort(jets.begin(), jets.end(),
                   [](const PseudoJet& a, const PseudoJet& b) { return a.momentum.pt2() > b.momentum.pt2(); });
  return jets;
}

}  // namespace hepflow::fads
