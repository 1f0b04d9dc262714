#pragma once

// JSON dump of a parsed event, the format of the golden fixture files.
// Vertices are listed -1, -2, ... and particles by ascending barcode.

#include <algorithm>
#include <nlohmann/json.hpp>

#include "hepflow/hepmc/event.hpp"

namespace hepflow::hepmc {

inline nlohmann::json to_json(const GenEvent& ev) {
  using nlohmann::json;
  auto sorted = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  json j;
  j["event_number"] = ev.event_number;
  j["n_mpi"] = ev.n_mpi;
  j["event_scale"] = ev.event_scale;
  j["alpha_qcd"] = ev.alpha_qcd;
  j["alpha_qed"] = ev.alpha_qed;
  j["signal_process_id"] = ev.signal_process_id;
  j["signal_vertex"] = ev.signal_vertex;
  j["weights"] = ev.weights;
  j["momentum_unit"] = ev.momentum_unit;
  j["length_unit"] = ev.length_unit;
  std::vector<const GenVertex*> vlist;
  for (const auto& v : ev.vertices) vlist.push_back(&v);
  std::sort(vlist.begin(), vlist.end(), [](auto* a, auto* b) { return a->barcode > b->barcode; });
  std::vector<const GenParticle*> plist;
  for (const auto& p : ev.particles) plist.push_back(&p);
  std::sort(plist.begin(), plist.end(), [](auto* a, auto* b) { return a->barcode < b->barcode; });
  json vs = json::array();
  for (const auto* vp : vlist) {
    const auto& v = *vp;
    vs.push_back({{"barcode", v.barcode},
                  {"id", v.id},
                  {"position", {v.position.x, v.position.y, v.position.z, v.position.t}},
                  {"particles_in", sorted(v.particles_in)},
                  {"particles_out", sorted(v.particles_out)}});
  }
  j["vertices"] = std::move(vs);
  json ps = json::array();
  for (const auto* pp : plist) {
    const auto& p = *pp;
    ps.push_back({{"barcode", p.barcode},
                  {"pdg_id", p.pdg_id},
                  {"momentum", {p.momentum.x, p.momentum.y, p.momentum.z, p.momentum.t}},
                  {"generated_mass", p.generated_mass},
                  {"status", p.status},
                  {"production_vertex", p.production_vertex},
                  {"end_vertex", p.end_vertex}});
  }
  j["particles"] = std::move(ps);
  return j;
}

}  // namespace hepflow::hepmc
