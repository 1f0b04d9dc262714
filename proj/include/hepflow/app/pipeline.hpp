#pragma once

// Pipeline configuration: a JSON document naming the event source, the
// detector and the list of tasks with their wiring.
//
//   {
//     "global_seed": 42,
//     "source": {"kind": "hepmc", "path": "events.hepmc", "key": "event"},
//     "detector": {...},
//     "tasks": [{"id": "stable", "kind": "stable_particles",
//                "inputs": {"event": "event"}, "outputs": {"particles": "gen"},
//                "params": {...}}, ...]
//   }

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/fads/detector.hpp"
#include "hepflow/fads/tasks.hpp"
#include "hepflow/fwk/runner.hpp"
#include "hepflow/hepmc/generator.hpp"
#include "hepflow/hepmc/reader.hpp"

namespace hepflow::app {

struct SourceConfig {
  std::string kind = "hepmc";  // hepmc | toy | synthetic
  std::string path;            // hepmc
  std::uint64_t n_events = 0;  // toy, synthetic
  std::uint64_t seed = 0;      // toy
  std::string key = "event";
};

struct PipelineConfig {
  std::uint64_t global_seed = 0;
  SourceConfig source;
  fads::DetectorConfig detector;
  std::vector<fads::TaskConfig> tasks;
};

namespace detail {

inline std::map<std::string, std::string> string_map(const nlohmann::json& j, const std::string& what) {
  std::map<std::string, std::string> out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw ConfigError(what + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw ConfigError(what + "." + k + " must be a string");
    out[k] = v.get<std::string>();
  }
  return out;
}

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed, const std::string& what) {
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError(what + ": unknown key '" + k + "'");
}

}  // namespace detail

inline PipelineConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  detail::check_keys(j, {"global_seed", "source", "detector", "tasks", "description"}, "config");
  PipelineConfig cfg;
  try {
    cfg.global_seed = j.value("global_seed", std::uint64_t{0});
    if (j.contains("source")) {
      const auto& s = j.at("source");
      detail::check_keys(s, {"kind", "path", "n_events", "seed", "key"}, "source");
      cfg.source.kind = s.value("kind", cfg.source.kind);
      cfg.source.path = s.value("path", cfg.source.path);
      cfg.source.n_events = s.value("n_events", cfg.source.n_events);
      cfg.source.seed = s.value("seed", cfg.source.seed);
      cfg.source.key = s.value("key", cfg.source.key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.source.kind != "hepmc" && cfg.source.kind != "toy" && cfg.source.kind != "synthetic")
    throw ConfigError("source: unknown kind '" + cfg.source.kind + "'");
  if (cfg.source.key.empty()) throw ConfigError("source: empty key");
  if (j.contains("detector")) cfg.detector = fads::detector_from_json(j.at("detector"));

  if (!j.contains("tasks") || !j.at("tasks").is_array()) throw ConfigError("config: 'tasks' must be an array");
  for (const auto& t : j.at("tasks")) {
    if (!t.is_object() || !t.contains("id") || !t.at("id").is_string())
      throw ConfigError("config: every task needs a string 'id'");
    fads::TaskConfig tc;
    tc.id = t.at("id").get<std::string>();
    const std::string what = "task '" + tc.id + "'";
    detail::check_keys(t, {"id", "kind", "params", "inputs", "outputs", "seed_salt"}, what);
    if (!t.contains("kind") || !t.at("kind").is_string()) throw ConfigError(what + ": missing 'kind'");
    tc.kind = t.at("kind").get<std::string>();
    if (t.contains("params")) {
      if (!t.at("params").is_object()) throw ConfigError(what + ": 'params' must be an object");
      tc.params = t.at("params");
    }
    tc.inputs = detail::string_map(t.value("inputs", nlohmann::json()), what + " inputs");
    tc.outputs = detail::string_map(t.value("outputs", nlohmann::json()), what + " outputs");
    if (t.contains("seed_salt")) {
      if (!t.at("seed_salt").is_number_unsigned()) throw ConfigError(what + ": 'seed_salt' must be unsigned");
      tc.seed_salt = t.at("seed_salt").get<std::uint64_t>();
    }
    cfg.tasks.push_back(std::move(tc));
  }
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  auto cfg = parse_config(j);
  // relative input paths are taken from the config's directory
  if (!cfg.source.path.empty() && std::filesystem::path(cfg.source.path).is_relative())
    cfg.source.path = (std::filesystem::path(path).parent_path() / cfg.source.path).string();
  return cfg;
}

using TaskFactory =
    std::function<std::unique_ptr<fwk::Task>(const fads::TaskConfig&, const fads::DetectorConfig&)>;

template <class T>
TaskFactory factory_of() {
  return [](const fads::TaskConfig& c, const fads::DetectorConfig& d) { return std::make_unique<T>(c, d); };
}

inline const std::map<std::string, TaskFactory>& task_registry() {
  using namespace fads;
  static const std::map<std::string, TaskFactory> reg = {
      {"stable_particles", factory_of<StableParticlesTask>()},
      {"truth_filter", factory_of<TruthFilterTask>()},
      {"visible_taus", factory_of<VisibleTausTask>()},
      {"propagator", factory_of<PropagatorTask>()},
      {"calorimeter", factory_of<CalorimeterTask>()},
      {"efficiency", factory_of<EfficiencyTask>()},
      {"momentum_smearing", factory_of<MomentumSmearingTask>()},
      {"energy_scale", factory_of<EnergyScaleTask>()},
      {"isolation", factory_of<IsolationTask>()},
      {"jet_finder", factory_of<JetFinderTask>()},
      {"btagging", factory_of<BTaggingTask>()},
      {"tautagging", factory_of<TauTaggingTask>()},
      {"min_count", factory_of<MinCountTask>()},
      {"candidate_histos", factory_of<CandidateHistosTask>()},
      {"jet_ntuple", factory_of<JetNtupleTask>()},
      {"busy", factory_of<BusyTask>()},
  };
  return reg;
}

inline std::vector<std::unique_ptr<fwk::Task>> make_tasks(const PipelineConfig& cfg) {
  std::vector<std::unique_ptr<fwk::Task>> out;
  for (const auto& t : cfg.tasks) {
    const auto it = task_registry().find(t.kind);
    if (it == task_registry().end()) throw ConfigError("task '" + t.id + "': unknown kind '" + t.kind + "'");
    out.push_back(it->second(t, cfg.detector));
  }
  return out;
}

/// Reads GenEvents from a HepMC file (plain or gzip). Parser warnings go to
/// the logger.
class HepmcSource : public fwk::EventSource {
 public:
  HepmcSource(const std::string& path, std::string key, fwk::Logger* logger)
      : reader_(hepmc::Reader::open(path,
                                    [logger, path](std::size_t line, const std::string& msg) {
                                      if (logger)
                                        logger->log(fwk::Level::warning, "hepmc",
                                                    path + ":" + std::to_string(line) + ": " + msg);
                                    })),
        key_(std::move(key)) {}

  bool next(fwk::EventStore& store) override {
    auto ev = reader_.next_event();
    if (!ev) return false;
    store.put(key_, std::move(*ev));
    return true;
  }

 private:
  hepmc::Reader reader_;
  std::string key_;
};

/// Events from the built-in toy generator, event i from (seed, i).
class ToySource : public fwk::EventSource {
 public:
  ToySource(std::uint64_t n_events, std::uint64_t seed, std::string key)
      : n_(n_events), seed_(seed), key_(std::move(key)) {}

  bool next(fwk::EventStore& store) override {
    if (i_ >= n_) return false;
    store.put(key_, hepmc::generate_event(seed_, i_++));
    return true;
  }

 private:
  std::uint64_t n_, seed_, i_ = 0;
  std::string key_;
};

/// Empty Tick events for CPU-bound benchmark pipelines.
class SyntheticSource : public fwk::EventSource {
 public:
  SyntheticSource(std::uint64_t n_events, std::string key) : n_(n_events), key_(std::move(key)) {}

  bool next(fwk::EventStore& store) override {
    if (i_ >= n_) return false;
    store.put(key_, fads::Tick{i_++});
    return true;
  }

 private:
  std::uint64_t n_, i_ = 0;
  std::string key_;
};

inline std::unique_ptr<fwk::EventSource> make_source(const SourceConfig& s, fwk::Logger* logger) {
  if (s.kind == "hepmc") {
    if (s.path.empty()) throw ConfigError("source: hepmc needs a path");
    return std::make_unique<HepmcSource>(s.path, s.key, logger);
  }
  if (s.kind == "toy") return std::make_unique<ToySource>(s.n_events, s.seed, s.key);
  return std::make_unique<SyntheticSource>(s.n_events, s.key);
}

/// Tasks and graph built from a config; build_graph errors propagate.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, fwk::Logger* logger = nullptr)
      : cfg_(std::move(cfg)), logger_(logger), fw_(make_tasks(cfg_), {cfg_.source.key}, logger) {}

  const PipelineConfig& config() const { return cfg_; }
  fwk::Framework& framework() { return fw_; }

  fwk::RunStats run(fwk::RunOptions opts) {
    auto src = make_source(cfg_.source, logger_);
    return fw_.run(*src, opts);
  }

 private:
  PipelineConfig cfg_;
  fwk::Logger* logger_;
  fwk::Framework fw_;
};

}  // namespace hepflow::app
