#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "hepflow/fwk/graph.hpp"
#include "hepflow/fwk/log.hpp"
#include "hepflow/fwk/rng.hpp"
#include "hepflow/fwk/services.hpp"
#include "hepflow/fwk/store.hpp"

namespace hepflow::fwk {

class EventContext;

/// A processing stage. Per run the framework calls configure and start once,
/// process once per event (possibly concurrently for different events) and
/// stop once.
class Task {
 public:
  explicit Task(TaskSpec spec) : spec_(std::move(spec)) {}
  virtual ~Task() = default;
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;

  const TaskSpec& spec() const { return spec_; }
  const std::string& id() const { return spec_.id; }

  virtual void configure(Services&) {}
  virtual void start(Services&) {}
  virtual void process(EventContext& ctx) = 0;
  virtual void stop(Services&) {}

 protected:
  TaskSpec spec_;
};

/// What a task sees while processing one event: guarded access to the
/// store, its private random stream, staged sinks and the logger.
class EventContext {
 public:
  EventContext(const TaskSpec& spec, EventStore& store, SinkBuffer& sinks, const HistService& hists,
               Logger* logger, std::uint64_t global_seed)
      : spec_(spec), store_(store), sinks_(sinks), hists_(hists), logger_(logger),
        global_seed_(global_seed) {}

  std::uint64_t event_index() const { return store_.event_index(); }
  const std::string& task_id() const { return spec_.id; }

  template <class T>
  const T& get(const std::string& key) const {
    if (!spec_.declares_input(key)) throw UndeclaredInput(key, spec_.id);
    return store_.get<T>(key);
  }

  template <class T>
  void put(const std::string& key, T value) {
    if (!spec_.declares_output(key)) throw UndeclaredOutput(key, spec_.id);
    store_.put(key, std::move(value));
  }

  // Private stream seeded by task_event_seed(global, salt, event_index).
  CounterRng& rng() {
    if (!rng_) rng_.emplace(task_event_seed(global_seed_, spec_.salt(), event_index()));
    return *rng_;
  }

  void fill(H1 h, double x, double w = 1.0) { sinks_.fill(h, x, w); }
  void fill(H2 h, double x, double y, double w = 1.0) { sinks_.fill(h, x, y, w); }
  void append(NT nt, hbook::Row row) {
    hists_.ntuple(nt).validate(row);
    sinks_.append(nt, std::move(row));
  }

  void log(Level level, std::string_view message) const {
    if (logger_) logger_->log(level, spec_.id, event_index(), message);
  }

  // Vetoes the event: downstream tasks do not run and nothing is recorded.
  void skip() { skipped_ = true; }
  bool skipped() const { return skipped_; }

 private:
  const TaskSpec& spec_;
  EventStore& store_;
  SinkBuffer& sinks_;
  const HistService& hists_;
  Logger* logger_;
  std::uint64_t global_seed_;
  std::optional<CounterRng> rng_;
  bool skipped_ = false;
};

}  // namespace hepflow::fwk
