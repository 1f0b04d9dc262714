#pragma once

#include <any>
#include <cstdint>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <typeinfo>
#include <utility>

#include "hepflow/error.hpp"
#include "hepflow/fwk/graph.hpp"

namespace hepflow::fwk {

class StoreError : public Error {
 public:
  using Error::Error;
};

class DoubleWrite : public StoreError {
 public:
  DoubleWrite(const std::string& key, std::uint64_t event_index)
      : StoreError("double write of '" + key + "' in event " + std::to_string(event_index)) {}
};

class UndeclaredOutput : public StoreError {
 public:
  UndeclaredOutput(const std::string& key, const std::string& task)
      : StoreError("task '" + task + "' wrote undeclared output '" + key + "'") {}
};

class UndeclaredInput : public StoreError {
 public:
  UndeclaredInput(const std::string& key, const std::string& task)
      : StoreError("task '" + task + "' read undeclared input '" + key + "'") {}
};

class MissingValue : public StoreError {
 public:
  MissingValue(const std::string& key, std::uint64_t event_index)
      : StoreError("no value for '" + key + "' in event " + std::to_string(event_index)) {}
};

/// Per-event single-assignment store. Values never move or change once
/// published, so references returned by get stay valid for the lifetime of
/// the store and may be read from any thread.
class EventStore {
 public:
  explicit EventStore(std::uint64_t event_index = 0) : event_index_(event_index) {}
  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  std::uint64_t event_index() const { return event_index_; }

  template <class T>
  void put(const std::string& key, T value) {
    std::unique_lock lock(mu_);
    auto [it, fresh] = slots_.try_emplace(key);
    if (!fresh) throw DoubleWrite(key, event_index_);
    it->second.emplace<std::decay_t<T>>(std::move(value));
  }

  template <class T>
  const T& get(const std::string& key) const {
    std::shared_lock lock(mu_);
    auto it = slots_.find(key);
    if (it == slots_.end()) throw MissingValue(key, event_index_);
    const T* v = std::any_cast<T>(&it->second);
    if (!v)
      throw TypeMismatch(key, std::string("stored ") + it->second.type().name() + ", requested " +
                                  typeid(T).name());
    return *v;
  }

  bool contains(const std::string& key) const {
    std::shared_lock lock(mu_);
    return slots_.count(key) != 0;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return slots_.size();
  }

 private:
  std::uint64_t event_index_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::any> slots_;
};

}  // namespace hepflow::fwk
