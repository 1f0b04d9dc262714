#pragma once

// Minimal HepMC2 IO_GenEvent writer, used to produce test fixtures.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "hepflow/hepmc/event.hpp"
#include "hepflow/hepmc/reader.hpp"

namespace hepflow::hepmc {

namespace detail {

inline void put_real(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, " %.16e", v);
  out += buf;
}

inline void put_int(std::string& out, long v) {
  out += ' ';
  out += std::to_string(v);
}

inline void put_particle(std::string& out, const GenParticle& p) {
  out += 'P';
  put_int(out, p.barcode);
  put_int(out, p.pdg_id);
  put_real(out, p.momentum.x);
  put_real(out, p.momentum.y);
  put_real(out, p.momentum.z);
  put_real(out, p.momentum.t);
  put_real(out, p.generated_mass);
  put_int(out, p.status);
  put_real(out, p.pol_theta);
  put_real(out, p.pol_phi);
  put_int(out, p.end_vertex);
  put_int(out, static_cast<long>(p.flows.size()));
  for (const auto& f : p.flows) {
    put_int(out, f[0]);
    put_int(out, f[1]);
  }
  out += '\n';
}

}  // namespace detail

inline std::string header() { return "\nHepMC::Version 2.06.09\n" + std::string(start_listing) + "\n"; }
inline std::string footer() { return std::string(end_listing) + "\n"; }

// One event block (E line through the last P line).
inline std::string format_event(const GenEvent& ev) {
  std::string out;
  out += 'E';
  detail::put_int(out, ev.event_number);
  detail::put_int(out, ev.n_mpi);
  detail::put_real(out, ev.event_scale);
  detail::put_real(out, ev.alpha_qcd);
  detail::put_real(out, ev.alpha_qed);
  detail::put_int(out, ev.signal_process_id);
  detail::put_int(out, ev.signal_vertex);
  detail::put_int(out, static_cast<long>(ev.vertices.size()));
  detail::put_int(out, ev.beam1);
  detail::put_int(out, ev.beam2);
  detail::put_int(out, static_cast<long>(ev.random_states.size()));
  for (long r : ev.random_states) detail::put_int(out, r);
  detail::put_int(out, static_cast<long>(ev.weights.size()));
  for (double w : ev.weights) detail::put_real(out, w);
  out += '\n';
  if (!ev.weight_names.empty()) {
    out += "N";
    detail::put_int(out, static_cast<long>(ev.weight_names.size()));
    for (const auto& n : ev.weight_names) out += " \"" + n + "\"";
    out += '\n';
  }
  out += "U " + ev.momentum_unit + " " + ev.length_unit + "\n";

  for (const auto& v : ev.vertices) {
    std::vector<const GenParticle*> orphans;
    for (const auto& p : ev.particles)
      if (p.end_vertex == v.barcode && p.production_vertex == 0) orphans.push_back(&p);
    out += 'V';
    detail::put_int(out, v.barcode);
    detail::put_int(out, v.id);
    detail::put_real(out, v.position.x);
    detail::put_real(out, v.position.y);
    detail::put_real(out, v.position.z);
    detail::put_real(out, v.position.t);
    detail::put_int(out, static_cast<long>(orphans.size()));
    detail::put_int(out, static_cast<long>(v.particles_out.size()));
    detail::put_int(out, static_cast<long>(v.weights.size()));
    for (double w : v.weights) detail::put_real(out, w);
    out += '\n';
    for (const auto* p : orphans) detail::put_particle(out, *p);
    for (int bc : v.particles_out)
      if (const auto* p = ev.particle(bc)) detail::put_particle(out, *p);
  }
  return out;
}

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) { os_ << header(); }
  ~Writer() { close(); }
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void write(const GenEvent& ev) { os_ << format_event(ev); }
  void close() {
    if (open_) os_ << footer();
    open_ = false;
  }

 private:
  std::ostream& os_;
  bool open_ = true;
};

}  // namespace hepflow::hepmc
