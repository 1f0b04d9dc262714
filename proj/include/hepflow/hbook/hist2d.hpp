#pragma once

#include <cstdint>
#include <vector>

#include "hepflow/hbook/hist1d.hpp"

namespace hepflow::hbook {

struct CellStats {
  std::uint64_t entries = 0;
  double sum_w = 0;
  double sum_w2 = 0;

  CellStats& operator+=(const CellStats& o) {
    entries += o.entries;
    sum_w += o.sum_w;
    sum_w2 += o.sum_w2;
    return *this;
  }
  friend bool operator==(const CellStats&, const CellStats&) = default;
};

// Cells are stored x-major over (nx + 2) x (ny + 2) slots, each axis with
// its own underflow/overflow. A NaN in either coordinate goes to nan_entries.
class Hist2D {
 public:
  Hist2D() : Hist2D(1, 0.0, 1.0, 1, 0.0, 1.0) {}
  Hist2D(std::uint32_t nx, double xlo, double xhi, std::uint32_t ny, double ylo, double yhi)
      : x_(nx, xlo, xhi), y_(ny, ylo, yhi), cells_(std::size_t(nx + 2) * (ny + 2)) {}

  const Axis& x_axis() const { return x_; }
  const Axis& y_axis() const { return y_; }

  void fill(double x, double y, double w = 1.0) {
    const auto ix = x_.index(x);
    const auto iy = y_.index(y);
    if (ix.slot == Axis::Slot::nan || iy.slot == Axis::Slot::nan) {
      ++nan_entries_;
      return;
    }
    auto& c = cells_[slot(x_.storage(ix), y_.storage(iy))];
    ++c.entries;
    c.sum_w += w;
    c.sum_w2 += w * w;
  }

  // Storage slots, 0 = underflow, n + 1 = overflow.
  const CellStats& cell(std::uint32_t sx, std::uint32_t sy) const { return cells_.at(slot(sx, sy)); }
  const std::vector<CellStats>& cells() const { return cells_; }
  std::vector<CellStats>& cells() { return cells_; }
  std::uint64_t nan_entries() const { return nan_entries_; }
  void set_nan_entries(std::uint64_t n) { nan_entries_ = n; }

  std::uint64_t entries() const {
    std::uint64_t n = nan_entries_;
    for (const auto& c : cells_) n += c.entries;
    return n;
  }

  Hist2D& operator+=(const Hist2D& o) {
    if (!(x_ == o.x_) || !(y_ == o.y_)) throw BinningMismatch();
    for (std::size_t k = 0; k < cells_.size(); ++k) cells_[k] += o.cells_[k];
    nan_entries_ += o.nan_entries_;
    return *this;
  }

  friend bool operator==(const Hist2D&, const Hist2D&) = default;

 private:
  std::size_t slot(std::uint32_t sx, std::uint32_t sy) const {
    return std::size_t(sx) * (y_.n_bins() + 2) + sy;
  }

  Axis x_;
  Axis y_;
  std::vector<CellStats> cells_;
  std::uint64_t nan_entries_ = 0;
};

inline Hist2D merge(const Hist2D& a, const Hist2D& b) {
  Hist2D out = a;
  out += b;
  return out;
}

}  // namespace hepflow::hbook
