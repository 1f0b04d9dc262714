#pragma once

#include <cstdlib>

#include "hepflow/fads/candidate.hpp"
#include "hepflow/fwk/rng.hpp"

namespace hepflow::fads {

struct FlavorTagParams {
  double eff_b = 0.7;
  double eff_c = 0.2;
  double mistag = 0.01;
  double match_dr = 0.3;
};

struct TauTagParams {
  double eff = 0.6;
  double mistag = 0.01;
  double match_dr = 0.3;
};

// Highest-pt truth object within dr of the jet; first one wins pt ties.
inline const Candidate* best_match(const Candidate& jet, const Candidates& truth, double dr) {
  const Candidate* best = nullptr;
  for (const auto& t : truth) {
    if (!(delta_r(jet.momentum, t.momentum) < dr)) continue;
    if (!best || t.momentum.pt() > best->momentum.pt()) best = &t;
  }
  return best;
}

// Sets b_tagged on each jet; one uniform draw per jet, in jet order.
inline void flavor_tag(Candidates& jets, const Candidates& partons, const FlavorTagParams& par,
                       fwk::CounterRng& rng) {
  for (auto& jet : jets) {
    const auto* m = best_match(jet, partons, par.match_dr);
    const int flavor = m ? std::abs(m->pdg_id) : 0;
    const double p = flavor == 5 ? par.eff_b : flavor == 4 ? par.eff_c : par.mistag;
    jet.set(b_tagged, rng.uniform() < p);
  }
}

// Sets tau_tagged on each jet; one uniform draw per jet, in jet order.
inline void tau_tag(Candidates& jets, const Candidates& taus, const TauTagParams& par, fwk::CounterRng& rng) {
  for (auto& jet : jets) {
    const double p = best_match(jet, taus, par.match_dr) ? par.eff : par.mistag;
    jet.set(tau_tagged, rng.uniform() < p);
  }
}

}  // namespace hepflow::fads
