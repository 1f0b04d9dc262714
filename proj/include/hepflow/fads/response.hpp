#pragma once

// Efficiency, momentum smearing and energy scale.

#include <algorithm>
#include <cmath>

#include "hepflow/fads/candidate.hpp"
#include "hepflow/fads/detector.hpp"
#include "hepflow/fwk/rng.hpp"

namespace hepflow::fads {

inline constexpr double min_smeared_pt = 1e-6;  // GeV

// One uniform draw per call; probability 0 outside the table.
inline bool apply_efficiency(const Candidate& c, const Table& efficiency, fwk::CounterRng& rng) {
  const double p = efficiency(c.momentum.pt(), std::abs(c.momentum.eta()), 0.0);
  return rng.uniform() < p;
}

// pt' = pt (1 + g) with g ~ Normal(0, sigma(pt, |eta|)); eta, phi and mass
// kept. One normal draw per call; sigma is 0 outside the table.
inline Candidate smear_momentum(Candidate c, const Table& sigma, fwk::CounterRng& rng) {
  const auto& p = c.momentum;
  const double pt = p.pt();
  const double s = sigma(pt, std::abs(p.eta()), 0.0);
  const double g = rng.normal();
  if (s == 0 || pt == 0) return c;
  const double new_pt = std::max(min_smeared_pt, pt * (1 + s * g));
  c.momentum = FourMomentum::from_pt_eta_phi_m(new_pt, p.eta(), p.phi(), p.mass());
  return c;
}

// Multiplies the four-momentum by scale(pt, |eta|); 1 outside the table.
inline Candidate energy_rescale(Candidate c, const Table& scale) {
  const double k = scale(c.momentum.pt(), std::abs(c.momentum.eta()), 1.0);
  c.momentum *= k;
  return c;
}

}  // namespace hepflow::fads
