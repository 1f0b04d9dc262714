#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/fwk/graph.hpp"
#include "hepflow/fwk/log.hpp"
#include "hepflow/fwk/services.hpp"
#include "hepflow/fwk/store.hpp"
#include "hepflow/fwk/task.hpp"

namespace hepflow::fwk {

/// Failure of a task (or of the event source) during a run. The original
/// exception is kept in nested().
class TaskFailure : public Error {
 public:
  TaskFailure(std::string task, std::uint64_t event_index, std::string stage, std::exception_ptr cause)
      : Error(render(task, event_index, stage, cause)),
        task_(std::move(task)), event_index_(event_index), stage_(std::move(stage)),
        cause_(std::move(cause)) {}

  const std::string& task() const { return task_; }
  std::uint64_t event_index() const { return event_index_; }
  const std::string& stage() const { return stage_; }
  std::exception_ptr nested() const { return cause_; }

 private:
  static std::string render(const std::string& task, std::uint64_t ev, const std::string& stage,
                            const std::exception_ptr& cause) {
    std::string msg = "task '" + task + "' failed in " + stage;
    if (ev != no_event) msg += " (event " + std::to_string(ev) + ")";
    try {
      if (cause) std::rethrow_exception(cause);
    } catch (const std::exception& e) {
      msg += ": " + std::string(e.what());
    } catch (...) {
      msg += ": unknown exception";
    }
    return msg;
  }

  std::string task_;
  std::uint64_t event_index_;
  std::string stage_;
  std::exception_ptr cause_;
};

/// Supplies events. next() fills the store with the source collections and
/// returns false once the input is exhausted. Always called from one thread.
class EventSource {
 public:
  virtual ~EventSource() = default;
  virtual bool next(EventStore& store) = 0;
};

struct RunOptions {
  std::size_t n_workers = 1;
  std::uint64_t global_seed = 0;
  std::uint64_t max_events = 0;  // 0 = all
  bool sequential = false;       // single-context loop, no worker threads
};

struct RunStats {
  std::uint64_t events_processed = 0;
  std::uint64_t events_skipped = 0;
  double wall_time = 0;
  std::map<std::string, double> per_task_time;
  std::size_t max_in_flight = 0;
};

/// Owns a validated task graph and runs it over an event source.
///
/// Up to n_workers events are in flight; an event counts as in flight from
/// admission until its sink operations are committed. Each (task, event)
/// pair is a separate job on a pool of n_workers threads, released once all
/// of the task's producers finished for that event. Sink operations are
/// committed by the calling thread in event order, and within an event in
/// topological task order, so aggregated output does not depend on
/// n_workers.
class Framework {
 public:
  Framework(std::vector<std::unique_ptr<Task>> tasks, std::vector<std::string> sources,
            Logger* logger = nullptr)
      : tasks_(std::move(tasks)), logger_(logger) {
    std::vector<TaskSpec> specs;
    for (const auto& t : tasks_) specs.push_back(t->spec());
    graph_ = build_graph(std::move(specs), std::move(sources));
    ready_sets_ = topo_schedule(graph_);
    for (const auto& s : ready_sets_) order_.insert(order_.end(), s.begin(), s.end());
  }

  const DataflowGraph& graph() const { return graph_; }
  const std::vector<std::vector<std::size_t>>& ready_sets() const { return ready_sets_; }
  const std::vector<std::size_t>& order() const { return order_; }
  Task& task(std::size_t i) { return *tasks_.at(i); }

  // Results of the last run.
  const Services& services() const { return services_; }
  const HistService& hists() const { return services_.hists; }

  RunStats run(EventSource& source, const RunOptions& opts) {
    if (opts.n_workers < 1) throw ConfigError("n_workers must be >= 1");
    services_ = {};
    services_.logger = logger_;
    services_.global_seed = opts.global_seed;
    global_seed_ = opts.global_seed;
    failure_.reset();
    cancelled_ = false;
    task_ns_ = std::vector<std::atomic<std::int64_t>>(tasks_.size());

    for (auto t : order_) {
      try {
        tasks_[t]->configure(services_);
      } catch (...) {
        throw TaskFailure(tasks_[t]->id(), no_event, "configure", std::current_exception());
      }
    }
    std::vector<std::size_t> started;
    for (auto t : order_) {
      try {
        tasks_[t]->start(services_);
        started.push_back(t);
      } catch (...) {
        auto err = TaskFailure(tasks_[t]->id(), no_event, "start", std::current_exception());
        stop_all(started);
        throw err;
      }
    }

    RunStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    if (opts.sequential) {
      run_sequential(source, opts, stats);
    } else {
      run_parallel(source, opts, stats);
    }
    stats.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t i = 0; i < tasks_.size(); ++i)
      stats.per_task_time[tasks_[i]->id()] = double(task_ns_[i].load()) * 1e-9;

    auto stop_error = stop_all(started);
    if (failure_) throw *failure_;
    if (stop_error) throw *stop_error;
    return stats;
  }

 private:
  struct InFlight {
    InFlight(std::uint64_t idx, std::size_t n) : store(idx), missing(n), sinks(n), remaining(n) {}
    EventStore store;
    std::vector<std::size_t> missing;
    std::vector<SinkBuffer> sinks;
    std::size_t remaining;
    std::atomic<bool> skipped{false};
  };
  struct Job {
    InFlight* ev;
    std::size_t task;
  };

  std::optional<TaskFailure> stop_all(const std::vector<std::size_t>& started) {
    std::optional<TaskFailure> first;
    for (auto t : started) {
      try {
        tasks_[t]->stop(services_);
      } catch (...) {
        if (!first) first.emplace(tasks_[t]->id(), no_event, "stop", std::current_exception());
      }
    }
    return first;
  }

  void record_failure(const std::string& who, std::uint64_t ev, std::exception_ptr e) {
    std::lock_guard lock(failure_mu_);
    if (!failure_) failure_.emplace(who, ev, "process", std::move(e));
    cancelled_ = true;
  }

  void execute(InFlight& ev, std::size_t t) {
    EventContext ctx(tasks_[t]->spec(), ev.store, ev.sinks[t], services_.hists, logger_, global_seed_);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      tasks_[t]->process(ctx);
    } catch (...) {
      record_failure(tasks_[t]->id(), ev.store.event_index(), std::current_exception());
    }
    task_ns_[t] += std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    if (ctx.skipped()) ev.skipped = true;
  }

  void commit(InFlight& ev, RunStats& stats) {
    if (cancelled_) return;
    if (ev.skipped) {
      ++stats.events_skipped;
      return;
    }
    for (auto t : order_) services_.hists.commit(ev.sinks[t], ev.store.event_index());
    ++stats.events_processed;
  }

  bool next_event(EventSource& source, InFlight& ev) {
    try {
      return source.next(ev.store);
    } catch (...) {
      record_failure("<source>", ev.store.event_index(), std::current_exception());
      return false;
    }
  }

  void run_sequential(EventSource& source, const RunOptions& opts, RunStats& stats) {
    for (std::uint64_t idx = 0; opts.max_events == 0 || idx < opts.max_events; ++idx) {
      InFlight ev(idx, tasks_.size());
      if (!next_event(source, ev)) break;
      stats.max_in_flight = 1;
      for (auto t : order_) {
        if (ev.skipped || cancelled_) break;
        execute(ev, t);
      }
      if (cancelled_) break;
      commit(ev, stats);
    }
  }

  void run_parallel(EventSource& source, const RunOptions& opts, RunStats& stats) {
    const std::size_t n_tasks = tasks_.size();
    std::mutex mu;
    std::condition_variable work_cv, done_cv;
    std::deque<Job> queue;
    std::vector<InFlight*> done;
    bool shutdown = false;

    auto worker = [&] {
      for (;;) {
        Job job{};
        {
          std::unique_lock lock(mu);
          work_cv.wait(lock, [&] { return shutdown || !queue.empty(); });
          if (queue.empty()) return;
          job = queue.front();
          queue.pop_front();
        }
        if (!cancelled_ && !job.ev->skipped) execute(*job.ev, job.task);
        std::lock_guard lock(mu);
        for (auto c : graph_.consumers(job.task)) {
          if (--job.ev->missing[c] == 0) {
            queue.push_back({job.ev, c});
            work_cv.notify_one();
          }
        }
        if (--job.ev->remaining == 0) {
          done.push_back(job.ev);
          done_cv.notify_one();
        }
      }
    };

    std::vector<std::thread> pool;
    pool.reserve(opts.n_workers);
    for (std::size_t i = 0; i < opts.n_workers; ++i) pool.emplace_back(worker);

    std::map<std::uint64_t, std::unique_ptr<InFlight>> live;
    std::set<std::uint64_t> finished;
    std::uint64_t next_index = 0, next_commit = 0;
    std::size_t in_flight = 0;
    bool exhausted = false;

    std::unique_lock lock(mu);
    for (;;) {
      while (!exhausted && !cancelled_ && in_flight < opts.n_workers) {
        if (opts.max_events != 0 && next_index >= opts.max_events) {
          exhausted = true;
          break;
        }
        lock.unlock();
        auto ev = std::make_unique<InFlight>(next_index, n_tasks);
        const bool got = next_event(source, *ev);
        lock.lock();
        if (!got) {
          exhausted = true;
          break;
        }
        for (std::size_t t = 0; t < n_tasks; ++t) {
          ev->missing[t] = graph_.producers(t).size();
          if (ev->missing[t] == 0) {
            queue.push_back({ev.get(), t});
            work_cv.notify_one();
          }
        }
        if (n_tasks == 0) done.push_back(ev.get());
        ++in_flight;
        stats.max_in_flight = std::max(stats.max_in_flight, in_flight);
        live.emplace(next_index++, std::move(ev));
      }

      for (auto* ev : done) finished.insert(ev->store.event_index());
      done.clear();
      while (finished.count(next_commit)) {
        finished.erase(next_commit);
        auto node = live.extract(next_commit);
        commit(*node.mapped(), stats);
        --in_flight;
        ++next_commit;
      }

      if ((exhausted || cancelled_) && in_flight == 0) break;
      if (!exhausted && !cancelled_ && in_flight < opts.n_workers) continue;
      done_cv.wait(lock, [&] { return !done.empty(); });
    }
    shutdown = true;
    lock.unlock();
    work_cv.notify_all();
    for (auto& th : pool) th.join();
  }

  std::vector<std::unique_ptr<Task>> tasks_;
  Logger* logger_;
  DataflowGraph graph_;
  std::vector<std::vector<std::size_t>> ready_sets_;
  std::vector<std::size_t> order_;
  Services services_;
  std::uint64_t global_seed_ = 0;
  std::vector<std::atomic<std::int64_t>> task_ns_;
  std::mutex failure_mu_;
  std::optional<TaskFailure> failure_;
  std::atomic<bool> cancelled_{false};
};

}  // namespace hepflow::fwk
