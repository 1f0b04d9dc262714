#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "hepflow/fwk/runner.hpp"

namespace testing_util {

using hepflow::fwk::EventContext;
using hepflow::fwk::Services;
using hepflow::fwk::TaskSpec;

// Task whose process body is a callable; counts lifecycle calls.
class FnTask : public hepflow::fwk::Task {
 public:
  using Body = std::function<void(EventContext&)>;
  using Hook = std::function<void(Services&)>;

  FnTask(TaskSpec spec, Body body, Hook on_configure = {})
      : Task(std::move(spec)), body_(std::move(body)), on_configure_(std::move(on_configure)) {}

  void configure(Services& s) override {
    ++configured;
    if (on_configure_) on_configure_(s);
  }
  void start(Services&) override { ++started; }
  void process(EventContext& ctx) override {
    ++processed;
    if (body_) body_(ctx);
  }
  void stop(Services&) override { ++stopped; }

  std::atomic<int> configured{0}, started{0}, processed{0}, stopped{0};

 private:
  Body body_;
  Hook on_configure_;
};

// Emits n events, publishing the event index under each key.
class IndexSource : public hepflow::fwk::EventSource {
 public:
  IndexSource(std::uint64_t n, std::vector<std::string> keys = {"tick"}) : n_(n), keys_(std::move(keys)) {}
  bool next(hepflow::fwk::EventStore& store) override {
    if (emitted_ == n_) return false;
    for (const auto& k : keys_) store.put(k, emitted_);
    ++emitted_;
    return true;
  }
  std::uint64_t emitted() const { return emitted_; }

 private:
  std::uint64_t n_;
  std::vector<std::string> keys_;
  std::uint64_t emitted_ = 0;
};

}  // namespace testing_util
