#pragma once

// Toy event generator for fixtures and benchmarks. Produces pp-like events
// with beams, a hard vertex, fragmenting partons, optional taus, prompt
// leptons and photons, plus a soft underlying event. Not physics-accurate;
// the point is realistic record shapes and multiplicities.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "hepflow/fwk/rng.hpp"
#include "hepflow/hepmc/event.hpp"

namespace hepflow::hepmc {

struct GeneratorConfig {
  double sqrt_s = 13000.0;         // GeV
  int min_partons = 2, max_partons = 4;
  double tau_probability = 0.4;
  double lepton_probability = 0.5;
  double photon_probability = 0.3;
  int min_soft = 10, max_soft = 25;
};

namespace detail {

inline double mass_of(int pdg) {
  switch (std::abs(pdg)) {
    case 11: return 0.000511;
    case 13: return 0.10566;
    case 15: return 1.77686;
    case 211: return 0.13957;
    case 111: return 0.13498;
    case 321: return 0.49368;
    case 130: return 0.49761;
    case 2212: return 0.93827;
    case 2112: return 0.93957;
    case 4: return 1.27;
    case 5: return 4.18;
    default: return 0.0;
  }
}

inline FourVector from_pt_eta_phi(double pt, double eta, double phi, double m) {
  const double px = pt * std::cos(phi), py = pt * std::sin(phi), pz = pt * std::sinh(eta);
  return {px, py, pz, std::sqrt(px * px + py * py + pz * pz + m * m)};
}

inline double wrap_phi(double phi) {
  constexpr double pi = std::numbers::pi;
  phi = std::remainder(phi, 2 * pi);
  return phi <= -pi ? phi + 2 * pi : phi;
}

class EventBuilder {
 public:
  int add_vertex(FourVector pos) {
    GenVertex v;
    v.barcode = -static_cast<int>(vertices_.size()) - 1;
    v.position = pos;
    vertices_.push_back(std::move(v));
    outgoing_.emplace_back();
    orphans_.emplace_back();
    return vertices_.back().barcode;
  }

  // Particle produced at vertex `from` (0 = orphan entering `to`).
  int add_particle(int pdg, FourVector p, int status, int from, int to = 0) {
    GenParticle gp;
    gp.barcode = next_barcode_++;
    gp.pdg_id = pdg;
    gp.momentum = p;
    gp.generated_mass = mass_of(pdg);
    gp.status = status;
    gp.production_vertex = from;
    gp.end_vertex = to;
    if (from != 0) outgoing_[slot(from)].push_back(gp);
    else orphans_[slot(to)].push_back(gp);
    return gp.barcode;
  }

  void set_end(int barcode, int vertex) {
    for (auto& list : outgoing_)
      for (auto& p : list)
        if (p.barcode == barcode) p.end_vertex = vertex;
  }

  // Flattens to file order: per vertex, orphans then outgoing.
  void finish(GenEvent& ev) {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      auto& v = vertices_[i];
      v.declared_orphans = static_cast<int>(orphans_[i].size());
      v.declared_out = static_cast<int>(outgoing_[i].size());
      for (auto& p : orphans_[i]) ev.particles.push_back(p);
      for (auto& p : outgoing_[i]) {
        v.particles_out.push_back(p.barcode);
        ev.particles.push_back(p);
      }
    }
    for (auto& v : vertices_)
      for (const auto& p : ev.particles)
        if (p.end_vertex == v.barcode) v.particles_in.push_back(p.barcode);
    ev.vertices = std::move(vertices_);
  }

 private:
  static std::size_t slot(int vertex) { return static_cast<std::size_t>(-vertex - 1); }
  std::vector<GenVertex> vertices_;
  std::vector<std::vector<GenParticle>> outgoing_, orphans_;
  int next_barcode_ = 1;
};

}  // namespace detail

/// Event number `index` of the stream defined by `seed`.
inline GenEvent generate_event(std::uint64_t seed, std::uint64_t index, const GeneratorConfig& cfg = {}) {
  fwk::CounterRng rng(fwk::task_event_seed(seed, fwk::fnv1a64("hepmc-toy-generator"), index));
  constexpr double two_pi = 2 * std::numbers::pi;
  auto uniform_int = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); };
  auto exponential = [&](double mean) { return -mean * std::log1p(-rng.uniform()); };

  GenEvent ev;
  ev.event_number = static_cast<int>(index);
  ev.n_mpi = 1;
  ev.alpha_qcd = 0.118;
  ev.alpha_qed = 1.0 / 128.0;
  ev.signal_process_id = 10;
  ev.weights = {1.0};

  detail::EventBuilder b;
  const FourVector pv{rng.normal(0, 0.015), rng.normal(0, 0.015), rng.normal(0, 45.0), 0.0};
  const int hard = b.add_vertex(pv);
  const double ebeam = cfg.sqrt_s / 2;
  const double mp = detail::mass_of(2212);
  const double pzb = std::sqrt(ebeam * ebeam - mp * mp);
  ev.beam1 = b.add_particle(2212, {0, 0, pzb, ebeam}, 4, 0, hard);
  ev.beam2 = b.add_particle(2212, {0, 0, -pzb, ebeam}, 4, 0, hard);
  ev.signal_vertex = hard;

  // fragmenting partons: a parton line ends at its own vertex and showers
  // into collimated stable hadrons and photons
  static constexpr int parton_ids[] = {1, 2, 3, 4, 5, 21, 21, 21};
  static constexpr int hadron_ids[] = {211, -211, 211, -211, 22, 22, 321, -321, 130, 2112, 2212};
  const int n_partons = uniform_int(cfg.min_partons, cfg.max_partons);
  double scale = 0;
  for (int i = 0; i < n_partons; ++i) {
    int pdg = parton_ids[uniform_int(0, 7)];
    if (pdg != 21 && rng.bernoulli(0.5)) pdg = -pdg;
    const double pt = 20.0 + exponential(40.0);
    const double eta = rng.uniform(-2.5, 2.5);
    const double phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
    scale += pt;
    const int bc = b.add_particle(pdg, detail::from_pt_eta_phi(pt, eta, phi, detail::mass_of(pdg)), 2, hard);
    const int frag = b.add_vertex(pv);
    b.set_end(bc, frag);
    const int n_had = uniform_int(4, 12);
    std::vector<double> z(n_had);
    double zsum = 0;
    for (auto& zi : z) zsum += (zi = exponential(1.0));
    for (int h = 0; h < n_had; ++h) {
      const int hid = hadron_ids[uniform_int(0, 10)];
      const double hpt = std::max(0.05, pt * z[h] / zsum);
      b.add_particle(hid,
                     detail::from_pt_eta_phi(hpt, eta + rng.normal(0, 0.08),
                                             detail::wrap_phi(phi + rng.normal(0, 0.08)), detail::mass_of(hid)),
                     1, frag);
    }
  }
  ev.event_scale = scale / n_partons;

  if (rng.bernoulli(cfg.tau_probability)) {
    const int q = rng.bernoulli(0.5) ? 1 : -1;
    const double pt = 20.0 + exponential(25.0);
    const double eta = rng.uniform(-2.3, 2.3);
    const double phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const auto p = detail::from_pt_eta_phi(pt, eta, phi, detail::mass_of(15));
    const int bc = b.add_particle(15 * -q, p, 2, hard);  // pdg 15 is tau-
    // flight length from gamma*beta*c*tau with c*tau = 0.087 mm
    const double pmag = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    const double flight = exponential(0.087 * pmag / detail::mass_of(15));
    const FourVector dv{pv.x + flight * p.x / pmag, pv.y + flight * p.y / pmag, pv.z + flight * p.z / pmag,
                        flight * p.t / pmag};
    const int decay = b.add_vertex(dv);
    b.set_end(bc, decay);
    const double fnu = rng.uniform(0.05, 0.4);
    b.add_particle(16 * -q, detail::from_pt_eta_phi(pt * fnu, eta + rng.normal(0, 0.02), phi, 0), 1, decay);
    const int prongs = rng.bernoulli(0.75) ? 1 : 3;
    const double rest = pt * (1 - fnu);
    for (int k = 0; k < prongs; ++k) {
      const int charge = prongs == 1 ? q : (k == 2 ? -q : q);
      b.add_particle(211 * charge,
                     detail::from_pt_eta_phi(rest / prongs, eta + rng.normal(0, 0.03),
                                             detail::wrap_phi(phi + rng.normal(0, 0.03)), detail::mass_of(211)),
                     1, decay);
    }
  }

  if (rng.bernoulli(cfg.lepton_probability)) {
    const int flavor = rng.bernoulli(0.5) ? 11 : 13;
    const int pdg = rng.bernoulli(0.5) ? flavor : -flavor;
    b.add_particle(pdg,
                   detail::from_pt_eta_phi(10.0 + exponential(30.0), rng.uniform(-2.5, 2.5),
                                           rng.uniform(-std::numbers::pi, std::numbers::pi), detail::mass_of(pdg)),
                   1, hard);
  }
  if (rng.bernoulli(cfg.photon_probability)) {
    b.add_particle(22,
                   detail::from_pt_eta_phi(15.0 + exponential(25.0), rng.uniform(-2.4, 2.4),
                                           rng.uniform(-std::numbers::pi, std::numbers::pi), 0),
                   1, hard);
  }

  const int n_soft = uniform_int(cfg.min_soft, cfg.max_soft);
  for (int i = 0; i < n_soft; ++i) {
    const int pdg = hadron_ids[uniform_int(0, 5)];
    b.add_particle(pdg,
                   detail::from_pt_eta_phi(0.1 + exponential(0.7), rng.uniform(-4.5, 4.5),
                                           rng.uniform(0.0, two_pi) - std::numbers::pi, detail::mass_of(pdg)),
                   1, hard);
  }

  b.finish(ev);
  return ev;
}

}  // namespace hepflow::hepmc
