#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hepflow/error.hpp"

namespace hepflow::hbook {

class BinningMismatch : public Error {
 public:
  BinningMismatch() : Error("histogram binning mismatch") {}
};

class EmptyHistogram : public Error {
 public:
  EmptyHistogram() : Error("statistics requested on a histogram with sum_w <= 0") {}
};

// Accumulated moments of one bin.
struct BinStats {
  std::uint64_t entries = 0;
  double sum_w = 0;
  double sum_w2 = 0;
  double sum_wx = 0;
  double sum_wx2 = 0;

  void fill(double x, double w) {
    ++entries;
    sum_w += w;
    sum_w2 += w * w;
    sum_wx += w * x;
    sum_wx2 += w * x * x;
  }

  BinStats& operator+=(const BinStats& o) {
    entries += o.entries;
    sum_w += o.sum_w;
    sum_w2 += o.sum_w2;
    sum_wx += o.sum_wx;
    sum_wx2 += o.sum_wx2;
    return *this;
  }

  friend bool operator==(const BinStats&, const BinStats&) = default;
};

// Uniform axis with half-open bins [edge_k, edge_k+1); x == hi is overflow.
class Axis {
 public:
  enum class Slot { underflow, overflow, in_range, nan };
  struct Index {
    Slot slot;
    std::uint32_t bin = 0;  // meaningful when slot == in_range
    friend bool operator==(const Index&, const Index&) = default;
  };

  Axis() = default;
  Axis(std::uint32_t n_bins, double lo, double hi) : n_bins_(n_bins), lo_(lo), hi_(hi) {
    if (n_bins == 0 || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw Error("invalid axis: need n_bins > 0 and finite lo < hi");
  }

  std::uint32_t n_bins() const { return n_bins_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return (hi_ - lo_) / n_bins_; }
  double edge(std::uint32_t k) const { return lo_ + (hi_ - lo_) * k / n_bins_; }

  Index index(double x) const {
    if (std::isnan(x)) return {Slot::nan};
    if (x < lo_) return {Slot::underflow};
    if (x >= hi_) return {Slot::overflow};
    auto k = static_cast<std::uint32_t>(std::floor((x - lo_) * n_bins_ / (hi_ - lo_)));
    // the closed form can be off by one ulp-wise near an edge; snap to edge()
    if (k >= n_bins_) k = n_bins_ - 1;
    if (k > 0 && x < edge(k)) --k;
    else if (k + 1 < n_bins_ && x >= edge(k + 1)) ++k;
    return {Slot::in_range, k};
  }

  // Storage slot with underflow at 0 and overflow at n_bins + 1.
  std::uint32_t storage(const Index& i) const {
    switch (i.slot) {
      case Slot::underflow: return 0;
      case Slot::overflow: return n_bins_ + 1;
      default: return i.bin + 1;
    }
  }

  friend bool operator==(const Axis&, const Axis&) = default;

 private:
  std::uint32_t n_bins_ = 1;
  double lo_ = 0;
  double hi_ = 1;
};

class Hist1D {
 public:
  Hist1D() : Hist1D(1, 0.0, 1.0) {}
  Hist1D(std::uint32_t n_bins, double lo, double hi)
      : axis_(n_bins, lo, hi), bins_(n_bins + 2) {}

  const Axis& axis() const { return axis_; }
  std::uint32_t n_bins() const { return axis_.n_bins(); }
  Axis::Index bin_index(double x) const { return axis_.index(x); }

  void fill(double x, double w = 1.0) {
    const auto idx = axis_.index(x);
    if (idx.slot == Axis::Slot::nan) {
      ++nan_entries_;
      return;
    }
    bins_[axis_.storage(idx)].fill(x, w);
  }

  const BinStats& bin(std::uint32_t k) const { return bins_.at(k + 1); }
  const BinStats& underflow() const { return bins_.front(); }
  const BinStats& overflow() const { return bins_.back(); }
  // All n_bins + 2 slots, underflow first and overflow last.
  const std::vector<BinStats>& slots() const { return bins_; }
  std::vector<BinStats>& slots() { return bins_; }
  std::uint64_t nan_entries() const { return nan_entries_; }
  void set_nan_entries(std::uint64_t n) { nan_entries_ = n; }

  // Sum of entries over every slot including under/overflow and NaN.
  std::uint64_t entries() const {
    std::uint64_t n = nan_entries_;
    for (const auto& b : bins_) n += b.entries;
    return n;
  }

  // In-range totals.
  BinStats in_range() const {
    BinStats s;
    for (std::size_t k = 1; k + 1 < bins_.size(); ++k) s += bins_[k];
    return s;
  }

  double mean() const {
    const auto s = in_range();
    if (!(s.sum_w > 0)) throw EmptyHistogram();
    return s.sum_wx / s.sum_w;
  }

  double stddev() const {
    const auto s = in_range();
    if (!(s.sum_w > 0)) throw EmptyHistogram();
    const double m = s.sum_wx / s.sum_w;
    return std::sqrt(std::max(0.0, s.sum_wx2 / s.sum_w - m * m));
  }

  Hist1D& operator+=(const Hist1D& o) {
    if (!(axis_ == o.axis_)) throw BinningMismatch();
    for (std::size_t k = 0; k < bins_.size(); ++k) bins_[k] += o.bins_[k];
    nan_entries_ += o.nan_entries_;
    return *this;
  }

  friend bool operator==(const Hist1D&, const Hist1D&) = default;

 private:
  Axis axis_;
  std::vector<BinStats> bins_;
  std::uint64_t nan_entries_ = 0;
};

// Field-wise sum; a's moments are added first.
inline Hist1D merge(const Hist1D& a, const Hist1D& b) {
  Hist1D out = a;
  out += b;
  return out;
}

}  // namespace hepflow::hbook
