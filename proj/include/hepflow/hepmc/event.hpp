#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hepflow::hepmc {

struct FourVector {
  double x = 0, y = 0, z = 0, t = 0;  // (px, py, pz, E) or (x, y, z, ctau)
  friend bool operator==(const FourVector&, const FourVector&) = default;
};

struct GenParticle {
  int barcode = 0;
  int pdg_id = 0;
  FourVector momentum;  // GeV
  double generated_mass = 0;
  int status = 0;
  double pol_theta = 0, pol_phi = 0;
  int production_vertex = 0;  // 0 = none (orphan)
  int end_vertex = 0;         // 0 = none
  std::vector<std::array<int, 2>> flows;  // (code, index)
  friend bool operator==(const GenParticle&, const GenParticle&) = default;
};

struct GenVertex {
  int barcode = 0;
  int id = 0;
  FourVector position;  // mm
  std::vector<int> particles_in;
  std::vector<int> particles_out;
  // counts declared on the V line
  int declared_orphans = 0;
  int declared_out = 0;
  std::vector<double> weights;
  friend bool operator==(const GenVertex&, const GenVertex&) = default;
};

struct GenEvent {
  int event_number = 0;
  int n_mpi = -1;
  double event_scale = 0, alpha_qcd = 0, alpha_qed = 0;
  int signal_process_id = 0;
  int signal_vertex = 0;
  int beam1 = 0, beam2 = 0;
  std::vector<long> random_states;
  std::vector<double> weights;
  std::vector<std::string> weight_names;
  std::string momentum_unit = "GEV";
  std::string length_unit = "MM";
  std::vector<GenVertex> vertices;
  std::vector<GenParticle> particles;  // file order
  friend bool operator==(const GenEvent&, const GenEvent&) = default;

  const GenParticle* particle(int barcode) const {
    for (const auto& p : particles)
      if (p.barcode == barcode) return &p;
    return nullptr;
  }
  const GenVertex* vertex(int barcode) const {
    for (const auto& v : vertices)
      if (v.barcode == barcode) return &v;
    return nullptr;
  }
};

// Particles with status 1 and no end vertex.
inline std::vector<GenParticle> stable_final_state(const GenEvent& ev) {
  std::vector<GenParticle> out;
  for (const auto& p : ev.particles)
    if (p.status == 1 && p.end_vertex == 0) out.push_back(p);
  return out;
}

}  // namespace hepflow::hepmc
