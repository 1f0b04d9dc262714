#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include "hepflow/fads/kinematics.hpp"
#include "hepflow/hepmc/event.hpp"

namespace hepflow::fads {

enum Flag : std::uint8_t {
  isolated = 1,
  b_tagged = 2,
  tau_tagged = 4,
  unpropagated = 8,
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Candidate {
  FourMomentum momentum;
  int charge = 0;  // units of e
  int pdg_id = 0;
  Vec3 position;   // m
  std::uint8_t flags = 0;
  int uid = 0;             // truth barcode, 0 for reconstructed objects
  double isolation = -1;   // set by the isolation task
  std::vector<int> constituents;  // jets: indices into the clustered input

  bool has(Flag f) const { return (flags & f) != 0; }
  void set(Flag f, bool on = true) {
    if (on) flags |= f;
    else flags &= static_cast<std::uint8_t>(~f);
  }
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

using Candidates = std::vector<Candidate>;

/// Three times the electric charge of a PDG id; 0 for unknown or nuclear ids.
inline int three_charge(int pdg) {
  // indexed by |id| - 1 for fundamental particles (quarks, leptons, bosons)
  static constexpr std::array<int, 40> fundamental = {
      -1, 2, -1, 2, -1, 2, -1, 2, 0, 0,   // 1-10 quarks
      -3, 0, -3, 0, -3, 0, -3, 0, 0, 0,   // 11-20 leptons
      0, 0, 0, 3, 0, 0, 0, 0, 0, 0,       // 21-30 g, gamma, Z, W+, h
      0, 0, 0, 3, 0, 0, 3, 0, 0, 0};      // 34 W'+, 37 H+
  const int a = std::abs(pdg);
  const int sign = pdg < 0 ? -1 : 1;
  if (a == 0) return 0;
  if (a <= 40) return sign * fundamental[a - 1];
  if (a >= 1000000000) return 0;
  const int nq3 = (a / 10) % 10, nq2 = (a / 100) % 10, nq1 = (a / 1000) % 10;
  auto q = [](int d) { return d >= 1 && d <= 8 ? fundamental[d - 1] : 0; };
  int c = 0;
  if (nq1 == 0) {
    if (nq2 == 0) return 0;
    // in meson ids the heavier quark comes first; for down-type s and b it is the antiquark
    c = (nq2 == 3 || nq2 == 5) ? q(nq3) - q(nq2) : q(nq2) - q(nq3);
  } else {
    c = q(nq1) + q(nq2) + q(nq3);
  }
  return sign * c;
}

// Integer charge; fractional (quark) charges give 0.
inline int charge_of(int pdg) { return three_charge(pdg) / 3; }

inline bool is_neutrino(int pdg) {
  const int a = std::abs(pdg);
  return a == 12 || a == 14 || a == 16;
}

inline Candidate from_particle(const hepmc::GenParticle& p, const hepmc::GenEvent& ev) {
  Candidate c;
  c.momentum = {p.momentum.x, p.momentum.y, p.momentum.z, p.momentum.t};
  c.pdg_id = p.pdg_id;
  c.charge = charge_of(p.pdg_id);
  c.uid = p.barcode;
  if (const auto* v = ev.vertex(p.production_vertex)) c.position = {v->position.x * 1e-3, v->position.y * 1e-3, v->position.z * 1e-3};
  return c;
}

}  // namespace hepflow::fads
