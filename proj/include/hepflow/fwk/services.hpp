#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/fwk/log.hpp"
#include "hepflow/hbook/hist1d.hpp"
#include "hepflow/hbook/hist2d.hpp"
#include "hepflow/hbook/ntuple.hpp"
#include "hepflow/rio/rio.hpp"

namespace hepflow::fwk {

struct H1 {
  std::size_t index;
};
struct H2 {
  std::size_t index;
};
struct NT {
  std::size_t index;
};

// Fill operations staged by one task while processing one event.
class SinkBuffer {
 public:
  struct Fill1 {
    std::size_t h;
    double x, w;
  };
  struct Fill2 {
    std::size_t h;
    double x, y, w;
  };
  struct Append {
    std::size_t nt;
    hbook::Row row;
  };
  using Op = std::variant<Fill1, Fill2, Append>;

  void fill(H1 h, double x, double w) { ops_.push_back(Fill1{h.index, x, w}); }
  void fill(H2 h, double x, double y, double w) { ops_.push_back(Fill2{h.index, x, y, w}); }
  void append(NT nt, hbook::Row row) { ops_.push_back(Append{nt.index, std::move(row)}); }

  const std::vector<Op>& ops() const { return ops_; }
  bool empty() const { return ops_.empty(); }
  void clear() { ops_.clear(); }

 private:
  std::vector<Op> ops_;
};

/// Histogram and n-tuple booking. Objects are booked during configure and
/// only mutated by the framework's single committing thread afterwards.
class HistService {
 public:
  H1 book_h1(const std::string& name, std::uint32_t n_bins, double lo, double hi) {
    claim(name);
    h1_.push_back({name, hbook::Hist1D(n_bins, lo, hi)});
    return {h1_.size() - 1};
  }
  H2 book_h2(const std::string& name, std::uint32_t nx, double xlo, double xhi, std::uint32_t ny,
             double ylo, double yhi) {
    claim(name);
    h2_.push_back({name, hbook::Hist2D(nx, xlo, xhi, ny, ylo, yhi)});
    return {h2_.size() - 1};
  }
  NT book_ntuple(const std::string& name, std::vector<hbook::Column> schema) {
    claim(name);
    nt_.push_back({name, hbook::NTuple(std::move(schema))});
    return {nt_.size() - 1};
  }

  const hbook::Hist1D& h1(H1 h) const { return h1_.at(h.index).second; }
  const hbook::Hist2D& h2(H2 h) const { return h2_.at(h.index).second; }
  const hbook::NTuple& ntuple(NT n) const { return nt_.at(n.index).second; }
  hbook::Hist1D& h1(H1 h) { return h1_.at(h.index).second; }
  hbook::Hist2D& h2(H2 h) { return h2_.at(h.index).second; }
  hbook::NTuple& ntuple(NT n) { return nt_.at(n.index).second; }

  // Applies staged operations in order, tagging n-tuple rows with event_index.
  void commit(const SinkBuffer& buf, std::uint64_t event_index) {
    for (const auto& op : buf.ops()) {
      if (auto* f1 = std::get_if<SinkBuffer::Fill1>(&op)) {
        h1_.at(f1->h).second.fill(f1->x, f1->w);
      } else if (auto* f2 = std::get_if<SinkBuffer::Fill2>(&op)) {
        h2_.at(f2->h).second.fill(f2->x, f2->y, f2->w);
      } else {
        const auto& a = std::get<SinkBuffer::Append>(op);
        nt_.at(a.nt).second.append(event_index, a.row);
      }
    }
  }

  // Every booked object ordered by name.
  std::map<std::string, rio::Object> snapshot() const {
    std::map<std::string, rio::Object> out;
    for (const auto& [n, h] : h1_) out.emplace(n, h);
    for (const auto& [n, h] : h2_) out.emplace(n, h);
    for (const auto& [n, t] : nt_) out.emplace(n, t);
    return out;
  }

  rio::Writer to_rio() const {
    rio::Writer w;
    for (const auto& [name, obj] : snapshot()) w.write(name, obj);
    return w;
  }

  bool empty() const { return names_.empty(); }

 private:
  void claim(const std::string& name) {
    if (name.empty()) throw ConfigError("cannot book an object with an empty name");
    if (std::find(names_.begin(), names_.end(), name) != names_.end())
      throw ConfigError("object '" + name + "' booked twice");
    names_.push_back(name);
  }

  std::vector<std::string> names_;
  std::vector<std::pair<std::string, hbook::Hist1D>> h1_;
  std::vector<std::pair<std::string, hbook::Hist2D>> h2_;
  std::vector<std::pair<std::string, hbook::NTuple>> nt_;
};

// Shared services handed to configure/start/stop.
struct Services {
  Logger* logger = nullptr;
  HistService hists;
  std::uint64_t global_seed = 0;
};

}  // namespace hepflow::fwk
