#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/fwk/rng.hpp"

namespace hepflow::fwk {

class GraphError : public Error {
 public:
  using Error::Error;
};

class CycleError : public GraphError {
 public:
  explicit CycleError(std::vector<std::string> cycle)
      : GraphError("dataflow cycle: " + render(cycle)), cycle_(std::move(cycle)) {}
  // Task ids along the cycle; the first id is repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  static std::string render(const std::vector<std::string>& c) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? " -> " : "") + c[i];
    return s;
  }
  std::vector<std::string> cycle_;
};

class MissingProducer : public GraphError {
 public:
  MissingProducer(const std::string& key, const std::string& consumer)
      : GraphError("no producer for collection '" + key + "' consumed by task '" + consumer + "'"),
        key_(key), consumer_(consumer) {}
  const std::string& key() const { return key_; }
  const std::string& consumer() const { return consumer_; }

 private:
  std::string key_, consumer_;
};

class DuplicateProducer : public GraphError {
 public:
  DuplicateProducer(const std::string& key, const std::string& first, const std::string& second)
      : GraphError("collection '" + key + "' produced by both '" + first + "' and '" + second + "'"),
        key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class TypeMismatch : public GraphError {
 public:
  explicit TypeMismatch(const std::string& key, const std::string& detail = {})
      : GraphError("type mismatch on collection '" + key + "'" + (detail.empty() ? "" : ": " + detail)),
        key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class PortKind { input, output };

// A declared port; name is the collection key in the event store.
struct PortDecl {
  std::string name;
  PortKind kind = PortKind::input;
  std::string type_tag;
  friend bool operator==(const PortDecl&, const PortDecl&) = default;
};

inline PortDecl input(std::string key, std::string type_tag) {
  return {std::move(key), PortKind::input, std::move(type_tag)};
}
inline PortDecl output(std::string key, std::string type_tag) {
  return {std::move(key), PortKind::output, std::move(type_tag)};
}

struct TaskSpec {
  std::string id;
  std::vector<PortDecl> inputs;
  std::vector<PortDecl> outputs;
  std::optional<std::uint64_t> seed_salt;  // defaults to fnv1a64(id)

  std::uint64_t salt() const { return seed_salt ? *seed_salt : fnv1a64(id); }

  bool declares_input(const std::string& key) const {
    return std::any_of(inputs.begin(), inputs.end(), [&](const auto& p) { return p.name == key; });
  }
  bool declares_output(const std::string& key) const {
    return std::any_of(outputs.begin(), outputs.end(), [&](const auto& p) { return p.name == key; });
  }
};

struct Edge {
  std::size_t producer;
  std::size_t consumer;
  std::string key;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Validated, acyclic wiring between tasks. Built only by build_graph.
class DataflowGraph {
 public:
  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& sources() const { return sources_; }
  std::size_t size() const { return tasks_.size(); }

  // Distinct upstream / downstream task indices.
  const std::vector<std::size_t>& producers(std::size_t task) const { return producers_.at(task); }
  const std::vector<std::size_t>& consumers(std::size_t task) const { return consumers_.at(task); }

  std::optional<std::size_t> index_of(const std::string& id) const {
    for (std::size_t i = 0; i < tasks_.size(); ++i)
      if (tasks_[i].id == id) return i;
    return std::nullopt;
  }

 private:
  friend DataflowGraph build_graph(std::vector<TaskSpec>, std::vector<std::string>);

  std::vector<TaskSpec> tasks_;
  std::vector<Edge> edges_;
  std::vector<std::string> sources_;
  std::vector<std::vector<std::size_t>> producers_;
  std::vector<std::vector<std::size_t>> consumers_;
};

namespace detail {

inline void check_ports(const TaskSpec& t) {
  for (const auto* ports : {&t.inputs, &t.outputs}) {
    std::set<std::string> seen;
    for (const auto& p : *ports) {
      if (p.name.empty()) throw GraphError("task '" + t.id + "' declares a port with an empty key");
      if (!seen.insert(p.name).second)
        throw GraphError("task '" + t.id + "' declares port '" + p.name + "' twice");
    }
  }
}

// Iterative DFS; returns one cycle as task indices (first repeated last).
inline std::optional<std::vector<std::size_t>> find_cycle(
    const std::vector<std::vector<std::size_t>>& succ) {
  enum : char { white, grey, black };
  const std::size_t n = succ.size();
  std::vector<char> color(n, white);
  std::vector<std::size_t> parent(n, n);
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != white) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = grey;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next == succ[u].size()) {
        color[u] = black;
        stack.pop_back();
        continue;
      }
      const std::size_t v = succ[u][next++];
      if (color[v] == grey) {
        std::vector<std::size_t> cyc{v};
        for (std::size_t w = u; w != v; w = parent[w]) cyc.push_back(w);
        cyc.push_back(v);
        std::reverse(cyc.begin(), cyc.end());
        return cyc;
      }
      if (color[v] == white) {
        color[v] = grey;
        parent[v] = u;
        stack.emplace_back(v, 0);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Validates declared ports and derives the producer -> consumer edges.
/// Checks run in this order: port sanity, duplicate producers, missing
/// producers, type tags, acyclicity.
inline DataflowGraph build_graph(std::vector<TaskSpec> tasks, std::vector<std::string> sources) {
  DataflowGraph g;
  {
    std::set<std::string> ids;
    for (const auto& t : tasks) {
      if (t.id.empty()) throw GraphError("task with empty id");
      if (!ids.insert(t.id).second) throw GraphError("duplicate task id '" + t.id + "'");
      detail::check_ports(t);
    }
  }

  const std::string source_label = "<source>";
  std::map<std::string, std::pair<std::size_t, const PortDecl*>> producer_of;
  std::set<std::string> source_keys;
  for (const auto& s : sources) {
    if (!source_keys.insert(s).second) throw DuplicateProducer(s, source_label, source_label);
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (const auto& p : tasks[i].outputs) {
      if (source_keys.count(p.name)) throw DuplicateProducer(p.name, source_label, tasks[i].id);
      auto [it, fresh] = producer_of.try_emplace(p.name, i, &p);
      if (!fresh) throw DuplicateProducer(p.name, tasks[it->second.first].id, tasks[i].id);
    }
  }

  const std::size_t n = tasks.size();
  g.producers_.resize(n);
  g.consumers_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : tasks[i].inputs) {
      if (source_keys.count(p.name)) continue;
      auto it = producer_of.find(p.name);
      if (it == producer_of.end()) throw MissingProducer(p.name, tasks[i].id);
      const auto& [prod, decl] = it->second;
      if (decl->type_tag != p.type_tag)
        throw TypeMismatch(p.name, "'" + tasks[prod].id + "' produces " + decl->type_tag + ", '" +
                                       tasks[i].id + "' expects " + p.type_tag);
      g.edges_.push_back({prod, i, p.name});
      g.producers_[i].push_back(prod);
      g.consumers_[prod].push_back(i);
    }
  }
  for (auto* lists : {&g.producers_, &g.consumers_})
    for (auto& l : *lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }

  if (auto cyc = detail::find_cycle(g.consumers_)) {
    std::vector<std::string> ids;
    for (auto i : *cyc) ids.push_back(tasks[i].id);
    throw CycleError(std::move(ids));
  }

  g.tasks_ = std::move(tasks);
  g.sources_ = std::move(sources);
  return g;
}

/// Ready sets: set k holds the tasks whose producers all sit in sets < k,
/// with k minimal. Within a set, tasks are ordered by id.
inline std::vector<std::vector<std::size_t>> topo_schedule(const DataflowGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> missing(n);
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    missing[i] = g.producers(i).size();
    if (missing[i] == 0) current.push_back(i);
  }
  std::vector<std::vector<std::size_t>> sets;
  const auto by_id = [&](std::size_t a, std::size_t b) { return g.tasks()[a].id < g.tasks()[b].id; };
  while (!current.empty()) {
    std::sort(current.begin(), current.end(), by_id);
    std::vector<std::size_t> next;
    for (auto u : current)
      for (auto v : g.consumers(u))
        if (--missing[v] == 0) next.push_back(v);
    sets.push_back(std::move(current));
    current = std::move(next);
  }
  return sets;
}

// Concatenation of the ready sets.
inline std::vector<std::size_t> topo_order(const DataflowGraph& g) {
  std::vector<std::size_t> order;
  for (auto& s : topo_schedule(g)) order.insert(order.end(), s.begin(), s.end());
  return order;
}

}  // namespace hepflow::fwk
