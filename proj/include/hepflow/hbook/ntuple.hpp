#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hepflow/error.hpp"

namespace hepflow::hbook {

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

enum class ColumnType : std::uint8_t { int64 = 1, float64 = 2, string = 3 };

struct Column {
  std::string name;
  ColumnType type;
  friend bool operator==(const Column&, const Column&) = default;
};

using Cell = std::variant<std::int64_t, double, std::string>;
using Row = std::vector<Cell>;

inline ColumnType type_of(const Cell& c) {
  switch (c.index()) {
    case 0: return ColumnType::int64;
    case 1: return ColumnType::float64;
    default: return ColumnType::string;
  }
}

/// Flat table of typed rows, ordered by (event_index, intra-event append
/// order) regardless of the order in which events append.
class NTuple {
 public:
  NTuple() = default;
  explicit NTuple(std::vector<Column> schema) : schema_(std::move(schema)) {
    for (std::size_t i = 0; i < schema_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (schema_[i].name == schema_[j].name)
          throw SchemaMismatch("duplicate n-tuple column '" + schema_[i].name + "'");
  }

  const std::vector<Column>& schema() const { return schema_; }
  std::size_t size() const { return rows_.size(); }
  const Row& row(std::size_t i) const { return rows_.at(i).second; }
  std::uint64_t event_of_row(std::size_t i) const { return rows_.at(i).first; }

  void validate(const Row& row) const {
    if (row.size() != schema_.size())
      throw SchemaMismatch("row arity " + std::to_string(row.size()) + " != schema arity " +
                           std::to_string(schema_.size()));
    for (std::size_t i = 0; i < row.size(); ++i)
      if (type_of(row[i]) != schema_[i].type)
        throw SchemaMismatch("cell type mismatch in column '" + schema_[i].name + "'");
  }

  void append(std::uint64_t event_index, Row row) {
    validate(row);
    if (rows_.empty() || rows_.back().first <= event_index) {
      rows_.emplace_back(event_index, std::move(row));
      return;
    }
    auto pos = std::upper_bound(rows_.begin(), rows_.end(), event_index,
                                [](std::uint64_t e, const auto& r) { return e < r.first; });
    rows_.emplace(pos, event_index, std::move(row));
  }

  // Appends b's rows after a's; used for shards covering disjoint, ordered event ranges.
  NTuple& operator+=(const NTuple& o) {
    if (schema_ != o.schema_) throw SchemaMismatch("n-tuple schema mismatch in merge");
    for (const auto& r : o.rows_) append(r.first, r.second);
    return *this;
  }

  // Structural equality: schema and row sequence. Event tags are not persisted.
  friend bool operator==(const NTuple& a, const NTuple& b) {
    if (a.schema_ != b.schema_ || a.rows_.size() != b.rows_.size()) return false;
    for (std::size_t i = 0; i < a.rows_.size(); ++i)
      if (a.rows_[i].second != b.rows_[i].second) return false;
    return true;
  }

 private:
  std::vector<Column> schema_;
  std::vector<std::pair<std::uint64_t, Row>> rows_;
};

}  // namespace hepflow::hbook
