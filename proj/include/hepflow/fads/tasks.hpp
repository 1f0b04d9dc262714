#pragma once

// Framework tasks wrapping the simulation operations. Each task is built
// from a TaskConfig: an id, JSON params, and role -> store key maps for its
// inputs and outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hepflow/fads/calorimeter.hpp"
#include "hepflow/fads/candidate.hpp"
#include "hepflow/fads/detector.hpp"
#include "hepflow/fads/isolation.hpp"
#include "hepflow/fads/jets.hpp"
#include "hepflow/fads/propagate.hpp"
#include "hepflow/fads/response.hpp"
#include "hepflow/fads/tagging.hpp"
#include "hepflow/fwk/task.hpp"
#include "hepflow/hepmc/event.hpp"

namespace hepflow::fads {

// store type tags
inline const std::string genevent_tag = "GenEvent";
inline const std::string candidates_tag = "Candidates";
inline const std::string tick_tag = "Tick";
inline const std::string scalar_tag = "Scalar";

// Payload of the synthetic source: only the event index.
struct Tick {
  std::uint64_t index = 0;
};

struct TaskConfig {
  std::string id;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  std::map<std::string, std::string> inputs;   // role -> key
  std::map<std::string, std::string> outputs;  // role -> key
  std::optional<std::uint64_t> seed_salt;
};

namespace detail {

struct Role {
  std::string name;
  std::string tag;
  bool required = true;
};

// TaskSpec from the roles a kind accepts. Unknown roles and missing
// required roles are configuration errors naming the task.
inline fwk::TaskSpec describe(const TaskConfig& cfg, const std::vector<Role>& in, const std::vector<Role>& out) {
  fwk::TaskSpec spec;
  spec.id = cfg.id;
  spec.seed_salt = cfg.seed_salt;
  auto bind = [&](const std::map<std::string, std::string>& given, const std::vector<Role>& roles, bool is_input) {
    const char* what = is_input ? "input" : "output";
    for (const auto& [role, key] : given) {
      const bool known = std::any_of(roles.begin(), roles.end(), [&](const Role& r) { return r.name == role; });
      if (!known) throw ConfigError("task '" + cfg.id + "': unknown " + what + " role '" + role + "'");
      if (key.empty()) throw ConfigError("task '" + cfg.id + "': empty key for " + what + " '" + role + "'");
    }
    for (const auto& r : roles) {
      const auto it = given.find(r.name);
      if (it == given.end()) {
        if (r.required) throw ConfigError("task '" + cfg.id + "': missing " + what + " '" + r.name + "'");
        continue;
      }
      (is_input ? spec.inputs : spec.outputs)
          .push_back(is_input ? fwk::input(it->second, r.tag) : fwk::output(it->second, r.tag));
    }
  };
  bind(cfg.inputs, in, true);
  bind(cfg.outputs, out, false);
  return spec;
}

inline std::string key(const std::map<std::string, std::string>& m, const std::string& role) {
  const auto it = m.find(role);
  return it == m.end() ? std::string() : it->second;
}

template <class T>
T param(const TaskConfig& cfg, const std::string& name, T fallback) {
  if (!cfg.params.contains(name)) return fallback;
  try {
    return cfg.params.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("task '" + cfg.id + "': parameter '" + name + "': " + e.what());
  }
}

inline Table table_param(const TaskConfig& cfg, const std::string& name, double fallback) {
  if (!cfg.params.contains(name)) return Table::constant(fallback);
  return table_from_json(cfg.params.at(name), "task '" + cfg.id + "' parameter '" + name + "'");
}

}  // namespace detail

/// Stable final-state generator particles as Candidates.
class StableParticlesTask : public fwk::Task {
 public:
  StableParticlesTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"event", genevent_tag}}, {{"particles", candidates_tag}})),
        in_(detail::key(cfg.inputs, "event")),
        out_(detail::key(cfg.outputs, "particles")) {}

  void process(fwk::EventContext& ctx) override {
    const auto& ev = ctx.get<hepmc::GenEvent>(in_);
    Candidates out;
    for (const auto& p : hepmc::stable_final_state(ev)) out.push_back(from_particle(p, ev));
    ctx.put(out_, std::move(out));
  }

 private:
  std::string in_, out_;
};

/// Generator particles selected by |pdg| and status (any status when the
/// list is empty), e.g. the partons used for flavour tagging.
class TruthFilterTask : public fwk::Task {
 public:
  TruthFilterTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"event", genevent_tag}}, {{"particles", candidates_tag}})),
        in_(detail::key(cfg.inputs, "event")),
        out_(detail::key(cfg.outputs, "particles")),
        pdg_(detail::param<std::set<int>>(cfg, "abs_pdg", {1, 2, 3, 4, 5, 21})),
        status_(detail::param<std::set<int>>(cfg, "status", {})),
        min_pt_(detail::param(cfg, "min_pt", 0.0)) {}

  void process(fwk::EventContext& ctx) override {
    const auto& ev = ctx.get<hepmc::GenEvent>(in_);
    Candidates out;
    for (const auto& p : ev.particles) {
      if (!pdg_.count(std::abs(p.pdg_id))) continue;
      if (!status_.empty() && !status_.count(p.status)) continue;
      auto c = from_particle(p, ev);
      if (c.momentum.pt() >= min_pt_) out.push_back(std::move(c));
    }
    ctx.put(out_, std::move(out));
  }

 private:
  std::string in_, out_;
  std::set<int> pdg_, status_;
  double min_pt_;
};

/// Visible part of each decayed tau: the sum of its non-neutrino daughters.
class VisibleTausTask : public fwk::Task {
 public:
  VisibleTausTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"event", genevent_tag}}, {{"taus", candidates_tag}})),
        in_(detail::key(cfg.inputs, "event")),
        out_(detail::key(cfg.outputs, "taus")) {}

  void process(fwk::EventContext& ctx) override {
    const auto& ev = ctx.get<hepmc::GenEvent>(in_);
    Candidates out;
    for (const auto& p : ev.particles) {
      if (std::abs(p.pdg_id) != 15 || p.end_vertex == 0) continue;
      const auto* v = ev.vertex(p.end_vertex);
      if (!v) continue;
      Candidate tau = from_particle(p, ev);
      tau.momentum = {};
      for (int bc : v->particles_out) {
        const auto* d = ev.particle(bc);
        if (!d || is_neutrino(d->pdg_id) || std::abs(d->pdg_id) == 15) continue;
        tau.momentum += FourMomentum{d->momentum.x, d->momentum.y, d->momentum.z, d->momentum.t};
      }
      if (tau.momentum.pt() > 0) out.push_back(std::move(tau));
    }
    ctx.put(out_, std::move(out));
  }

 private:
  std::string in_, out_;
};

/// Propagates particles to the tracker boundary and splits them by species.
/// Particles that never leave the tracker are dropped.
class PropagatorTask : public fwk::Task {
 public:
  PropagatorTask(const TaskConfig& cfg, const DetectorConfig& det)
      : Task(detail::describe(cfg, {{"particles", candidates_tag}},
                              {{"all", candidates_tag, false},
                               {"charged", candidates_tag, false},
                               {"electrons", candidates_tag, false},
                               {"muons", candidates_tag, false},
                               {"photons", candidates_tag, false}})),
        det_(det),
        in_(detail::key(cfg.inputs, "particles")) {
    for (const char* role : {"all", "charged", "electrons", "muons", "photons"}) out_[role] = detail::key(cfg.outputs, role);
  }

  void process(fwk::EventContext& ctx) override {
    std::map<std::string, Candidates> bins;
    for (const auto& p : ctx.get<Candidates>(in_)) {
      auto c = propagate(p, det_);
      if (c.has(unpropagated)) continue;
      const int a = std::abs(c.pdg_id);
      if (a == 11) bins["electrons"].push_back(c);
      else if (a == 13) bins["muons"].push_back(c);
      else if (a == 22) bins["photons"].push_back(c);
      else if (c.charge != 0) bins["charged"].push_back(c);
      bins["all"].push_back(std::move(c));
    }
    for (const auto& [role, key] : out_)
      if (!key.empty()) ctx.put(key, std::move(bins[role]));
  }

 private:
  DetectorConfig det_;
  std::string in_;
  std::map<std::string, std::string> out_;
};

class CalorimeterTask : public fwk::Task {
 public:
  CalorimeterTask(const TaskConfig& cfg, const DetectorConfig& det)
      : Task(detail::describe(cfg, {{"particles", candidates_tag}}, {{"towers", candidates_tag}})),
        det_(det),
        in_(detail::key(cfg.inputs, "particles")),
        out_(detail::key(cfg.outputs, "towers")) {}

  void process(fwk::EventContext& ctx) override {
    ctx.put(out_, calorimeter(ctx.get<Candidates>(in_), det_, ctx.rng()));
  }

 private:
  DetectorConfig det_;
  std::string in_, out_;
};

/// Keeps each candidate with probability efficiency(pt, |eta|).
class EfficiencyTask : public fwk::Task {
 public:
  EfficiencyTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"particles", candidates_tag}}, {{"particles", candidates_tag}})),
        in_(detail::key(cfg.inputs, "particles")),
        out_(detail::key(cfg.outputs, "particles")),
        table_(detail::table_param(cfg, "efficiency", 1.0)) {}

  void process(fwk::EventContext& ctx) override {
    Candidates out;
    for (const auto& c : ctx.get<Candidates>(in_))
      if (apply_efficiency(c, table_, ctx.rng())) out.push_back(c);
    ctx.put(out_, std::move(out));
  }

 private:
  std::string in_, out_;
  Table table_;
};

class MomentumSmearingTask : public fwk::Task {
 public:
  MomentumSmearingTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"particles", candidates_tag}}, {{"particles", candidates_tag}})),
        in_(detail::key(cfg.inputs, "particles")),
        out_(detail::key(cfg.outputs, "particles")),
        sigma_(detail::table_param(cfg, "sigma", 0.0)) {}

  void process(fwk::EventContext& ctx) override {
    Candidates out;
    for (const auto& c : ctx.get<Candidates>(in_)) out.push_back(smear_momentum(c, sigma_, ctx.rng()));
    ctx.put(out_, std::move(out));
  }

 private:
  std::string in_, out_;
  Table sigma_;
};

class EnergyScaleTask : public fwk::Task {
 public:
  EnergyScaleTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"particles", candidates_tag}}, {{"particles", candidates_tag}})),
        in_(detail::key(cfg.inputs, "particles")),
        out_(detail::key(cfg.outputs, "particles")),
        scale_(detail::table_param(cfg, "scale", 1.0)) {}

  void process(fwk::EventContext& ctx) override {
    Candidates out;
    for (const auto& c : ctx.get<Candidates>(in_)) out.push_back(energy_rescale(c, scale_));
    ctx.put(out_, std::move(out));
  }

 private:
  std::string in_, out_;
  Table scale_;
};

/// Relative isolation of `candidates` against `others`. Outputs the
/// isolated ones, or all of them with the flag set when keep_all is true.
class IsolationTask : public fwk::Task {
 public:
  IsolationTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"candidates", candidates_tag}, {"others", candidates_tag}},
                              {{"candidates", candidates_tag}})),
        in_(detail::key(cfg.inputs, "candidates")),
        others_(detail::key(cfg.inputs, "others")),
        out_(detail::key(cfg.outputs, "candidates")),
        dr_max_(detail::param(cfg, "dr_max", 0.5)),
        threshold_(detail::param(cfg, "threshold", 0.1)),
        min_pt_(detail::param(cfg, "min_pt", 0.0)),
        keep_all_(detail::param(cfg, "keep_all", false)) {}

  void process(fwk::EventContext& ctx) override {
    const auto& others = ctx.get<Candidates>(others_);
    Candidates out;
    for (auto c : ctx.get<Candidates>(in_)) {
      if (!(c.momentum.pt() > 0) || c.momentum.pt() < min_pt_) continue;
      c.isolation = isolation_value(others, c, dr_max_);
      c.set(isolated, c.isolation < threshold_);
      if (keep_all_ || c.has(isolated)) out.push_back(std::move(c));
    }
    ctx.put(out_, std::move(out));
  }

 private:
  std::string in_, others_, out_;
  double dr_max_, threshold_, min_pt_;
  bool keep_all_;
};

class JetFinderTask : public fwk::Task {
 public:
  JetFinderTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"particles", candidates_tag}}, {{"jets", candidates_tag}})),
        in_(detail::key(cfg.inputs, "particles")),
        out_(detail::key(cfg.outputs, "jets")),
        def_{detail::param(cfg, "p", -1.0), detail::param(cfg, "R", 0.4)},
        pt_min_(detail::param(cfg, "pt_min", 20.0)) {
    if (!(def_.R > 0)) throw ConfigError("task '" + cfg.id + "': R must be > 0");
  }

  void process(fwk::EventContext& ctx) override {
    std::vector<FourMomentum> in;
    for (const auto& c : ctx.get<Candidates>(in_))
      if (c.momentum.pt() > 0) in.push_back(c.momentum);
    Candidates jets;
    for (auto& pj : cluster_jets(in, def_, pt_min_)) {
      Candidate j;
      j.momentum = pj.momentum;
      j.constituents = std::move(pj.constituents);
      jets.push_back(std::move(j));
    }
    ctx.put(out_, std::move(jets));
  }

 private:
  std::string in_, out_;
  JetDefinition def_;
  double pt_min_;
};

class BTaggingTask : public fwk::Task {
 public:
  BTaggingTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"jets", candidates_tag}, {"partons", candidates_tag}},
                              {{"jets", candidates_tag}})),
        jets_(detail::key(cfg.inputs, "jets")),
        partons_(detail::key(cfg.inputs, "partons")),
        out_(detail::key(cfg.outputs, "jets")),
        par_{detail::param(cfg, "eff_b", 0.7), detail::param(cfg, "eff_c", 0.2),
             detail::param(cfg, "mistag", 0.01), detail::param(cfg, "match_dr", 0.3)} {}

  void process(fwk::EventContext& ctx) override {
    Candidates jets = ctx.get<Candidates>(jets_);
    flavor_tag(jets, ctx.get<Candidates>(partons_), par_, ctx.rng());
    ctx.put(out_, std::move(jets));
  }

 private:
  std::string jets_, partons_, out_;
  FlavorTagParams par_;
};

class TauTaggingTask : public fwk::Task {
 public:
  TauTaggingTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"jets", candidates_tag}, {"taus", candidates_tag}},
                              {{"jets", candidates_tag}})),
        jets_(detail::key(cfg.inputs, "jets")),
        taus_(detail::key(cfg.inputs, "taus")),
        out_(detail::key(cfg.outputs, "jets")),
        par_{detail::param(cfg, "eff", 0.6), detail::param(cfg, "mistag", 0.01),
             detail::param(cfg, "match_dr", 0.3)} {}

  void process(fwk::EventContext& ctx) override {
    Candidates jets = ctx.get<Candidates>(jets_);
    tau_tag(jets, ctx.get<Candidates>(taus_), par_, ctx.rng());
    ctx.put(out_, std::move(jets));
  }

 private:
  std::string jets_, taus_, out_;
  TauTagParams par_;
};

/// Vetoes events with fewer than min_count candidates.
class MinCountTask : public fwk::Task {
 public:
  MinCountTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"candidates", candidates_tag}}, {})),
        in_(detail::key(cfg.inputs, "candidates")),
        min_(detail::param<std::size_t>(cfg, "min_count", 1)) {}

  void process(fwk::EventContext& ctx) override {
    if (ctx.get<Candidates>(in_).size() < min_) ctx.skip();
  }

 private:
  std::string in_;
  std::size_t min_;
};

/// Booked as <name>_n, <name>_pt, <name>_eta, <name>_phi and <name>_eta_phi.
class CandidateHistosTask : public fwk::Task {
 public:
  CandidateHistosTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"candidates", candidates_tag}}, {})),
        in_(detail::key(cfg.inputs, "candidates")),
        name_(detail::param<std::string>(cfg, "name", cfg.id)),
        pt_max_(detail::param(cfg, "pt_max", 200.0)) {}

  void configure(fwk::Services& s) override {
    n_ = s.hists.book_h1(name_ + "_n", 50, 0, 50);
    pt_ = s.hists.book_h1(name_ + "_pt", 100, 0, pt_max_);
    eta_ = s.hists.book_h1(name_ + "_eta", 100, -5, 5);
    phi_ = s.hists.book_h1(name_ + "_phi", 64, -pi, pi);
    eta_phi_ = s.hists.book_h2(name_ + "_eta_phi", 50, -5, 5, 32, -pi, pi);
  }

  void process(fwk::EventContext& ctx) override {
    const auto& cands = ctx.get<Candidates>(in_);
    ctx.fill(n_, static_cast<double>(cands.size()));
    for (const auto& c : cands) {
      const double eta = c.momentum.eta(), phi = c.momentum.phi();
      ctx.fill(pt_, c.momentum.pt());
      ctx.fill(eta_, eta);
      ctx.fill(phi_, phi);
      ctx.fill(eta_phi_, eta, phi);
    }
  }

 private:
  std::string in_, name_;
  double pt_max_;
  fwk::H1 n_{}, pt_{}, eta_{}, phi_{};
  fwk::H2 eta_phi_{};
};

/// One n-tuple row per jet.
class JetNtupleTask : public fwk::Task {
 public:
  JetNtupleTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"jets", candidates_tag}}, {})),
        in_(detail::key(cfg.inputs, "jets")),
        name_(detail::param<std::string>(cfg, "name", cfg.id)) {}

  void configure(fwk::Services& s) override {
    using hbook::ColumnType;
    nt_ = s.hists.book_ntuple(name_, {{"event", ColumnType::int64},
                                      {"index", ColumnType::int64},
                                      {"pt", ColumnType::float64},
                                      {"eta", ColumnType::float64},
                                      {"phi", ColumnType::float64},
                                      {"mass", ColumnType::float64},
                                      {"n_constituents", ColumnType::int64},
                                      {"label", ColumnType::string}});
  }

  void process(fwk::EventContext& ctx) override {
    const auto& jets = ctx.get<Candidates>(in_);
    for (std::size_t i = 0; i < jets.size(); ++i) {
      const auto& j = jets[i];
      std::string label = j.has(b_tagged) ? (j.has(tau_tagged) ? "b+tau" : "b") : j.has(tau_tagged) ? "tau" : "jet";
      ctx.append(nt_, {static_cast<std::int64_t>(ctx.event_index()), static_cast<std::int64_t>(i), j.momentum.pt(),
                       j.momentum.eta(), j.momentum.phi(), j.momentum.mass(),
                       static_cast<std::int64_t>(j.constituents.size()), std::move(label)});
    }
  }

 private:
  std::string in_, name_;
  fwk::NT nt_{};
};

/// Synthetic CPU load: `iterations` rounds of mixing seeded from the task's
/// event stream. Publishes the result as a Scalar and histograms it.
class BusyTask : public fwk::Task {
 public:
  BusyTask(const TaskConfig& cfg, const DetectorConfig&)
      : Task(detail::describe(cfg, {{"tick", tick_tag, false}, {"value", scalar_tag, false}},
                              {{"value", scalar_tag, false}})),
        out_(detail::key(cfg.outputs, "value")),
        iterations_(detail::param<std::uint64_t>(cfg, "iterations", 200000)),
        alloc_bytes_(detail::param<std::size_t>(cfg, "alloc_bytes", 0)),
        hist_(detail::param<std::string>(cfg, "hist", "")) {}

  void configure(fwk::Services& s) override {
    if (!hist_.empty()) h_ = s.hists.book_h1(hist_, 100, 0, 1);
  }

  void process(fwk::EventContext& ctx) override {
    std::vector<unsigned char> scratch(alloc_bytes_);
    std::uint64_t z = ctx.rng()();
    for (std::uint64_t i = 0; i < iterations_; ++i) {
      z = fwk::splitmix64_mix(z + i);
      if (!scratch.empty()) scratch[z % scratch.size()] ^= static_cast<unsigned char>(z);
    }
    const double value = static_cast<double>(z >> 11) * 0x1.0p-53;
    if (!hist_.empty()) ctx.fill(h_, value);
    if (!out_.empty()) ctx.put(out_, value);
  }

 private:
  std::string out_;
  std::uint64_t iterations_;
  std::size_t alloc_bytes_;
  std::string hist_;
  fwk::H1 h_{};
};

}  // namespace hepflow::fads
