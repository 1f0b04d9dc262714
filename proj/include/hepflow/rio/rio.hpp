#pragma once

// Record-oriented binary container for histograms and n-tuples.
//
// File   := magic "RIO1" Record*
// Record := name_len:u32 name:bytes type_tag:u32 version:u32
//           payload_len:u64 payload:bytes crc32:u32
//
// Integers are little-endian, floats are IEEE-754 binary64 little-endian and
// the CRC-32 (IEEE polynomial) covers the payload bytes only. docs/rio-format.md
// lists the payload layouts.

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/hbook/hist1d.hpp"
#include "hepflow/hbook/hist2d.hpp"
#include "hepflow/hbook/ntuple.hpp"

namespace hepflow::rio {

class IoError : public Error {
 public:
  using Error::Error;
};
class BadMagic : public Error {
 public:
  BadMagic() : Error("rio: bad magic, not a RIO1 file") {}
};
class CrcMismatch : public Error {
 public:
  explicit CrcMismatch(const std::string& name) : Error("rio: crc mismatch in record '" + name + "'") {}
};
class UnknownTypeTag : public Error {
 public:
  explicit UnknownTypeTag(std::uint32_t tag) : Error("rio: unknown type tag " + std::to_string(tag)) {}
};
class UnknownVersion : public Error {
 public:
  UnknownVersion(std::uint32_t tag, std::uint32_t version)
      : Error("rio: unknown version " + std::to_string(version) + " for type tag " +
              std::to_string(tag)) {}
};
class TruncatedRecord : public Error {
 public:
  explicit TruncatedRecord(const std::string& what) : Error("rio: truncated record: " + what) {}
};

inline constexpr std::string_view magic = "RIO1";

enum class TypeTag : std::uint32_t { hist1d = 1, hist2d = 2, ntuple = 3 };
inline constexpr std::uint32_t current_version = 1;

using Object = std::variant<hbook::Hist1D, hbook::Hist2D, hbook::NTuple>;
using Bytes = std::vector<std::uint8_t>;

inline std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    c = ::crc32(c, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(c);
}

class ByteWriter {
 public:
  explicit ByteWriter(Bytes& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s);
  }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1, "u8")); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4, "u32")); }
  std::uint64_t u64() { return le(8, "u64"); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8, "i64")); }
  double f64() { return std::bit_cast<double>(le(8, "f64")); }
  std::span<const std::uint8_t> raw(std::uint64_t n, const char* what) {
    need(n, what);
    auto s = in_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }
  std::string str(const char* what) {
    const auto n = u32();
    const auto s = raw(n, what);
    return {s.begin(), s.end()};
  }

 private:
  void need(std::uint64_t n, const char* what) const {
    if (n > remaining()) throw TruncatedRecord(what);
  }
  std::uint64_t le(int n, const char* what) {
    need(static_cast<std::uint64_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// Payload encoders.

inline Bytes encode_payload(const hbook::Hist1D& h) {
  Bytes out;
  ByteWriter w(out);
  w.u32(h.n_bins());
  w.f64(h.axis().lo());
  w.f64(h.axis().hi());
  for (const auto& b : h.slots()) {
    w.u64(b.entries);
    w.f64(b.sum_w);
    w.f64(b.sum_w2);
    w.f64(b.sum_wx);
    w.f64(b.sum_wx2);
  }
  w.u64(h.nan_entries());
  return out;
}

inline Bytes encode_payload(const hbook::Hist2D& h) {
  Bytes out;
  ByteWriter w(out);
  w.u32(h.x_axis().n_bins());
  w.f64(h.x_axis().lo());
  w.f64(h.x_axis().hi());
  w.u32(h.y_axis().n_bins());
  w.f64(h.y_axis().lo());
  w.f64(h.y_axis().hi());
  for (const auto& c : h.cells()) {
    w.u64(c.entries);
    w.f64(c.sum_w);
    w.f64(c.sum_w2);
  }
  w.u64(h.nan_entries());
  return out;
}

inline Bytes encode_payload(const hbook::NTuple& nt) {
  Bytes out;
  ByteWriter w(out);
  w.u32(static_cast<std::uint32_t>(nt.schema().size()));
  for (const auto& c : nt.schema()) {
    w.str(c.name);
    w.u8(static_cast<std::uint8_t>(c.type));
  }
  w.u64(nt.size());
  for (std::size_t i = 0; i < nt.size(); ++i) {
    for (const auto& cell : nt.row(i)) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) w.i64(v);
            else if constexpr (std::is_same_v<T, double>) w.f64(v);
            else w.str(v);
          },
          cell);
    }
  }
  return out;
}

inline TypeTag type_tag_of(const Object& obj) {
  switch (obj.index()) {
    case 0: return TypeTag::hist1d;
    case 1: return TypeTag::hist2d;
    default: return TypeTag::ntuple;
  }
}

// Payload decoders. The payload must be consumed exactly.

namespace detail {

inline void expect_consumed(const ByteReader& r) {
  if (r.remaining() != 0) throw TruncatedRecord("payload has trailing bytes");
}

inline hbook::Hist1D decode_hist1d(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto n = r.u32();
  const double lo = r.f64();
  const double hi = r.f64();
  // each slot is 40 bytes; reject absurd sizes before allocating
  if (n == 0 || (std::uint64_t(n) + 2) * 40 > r.remaining()) throw TruncatedRecord("hist1d bins");
  hbook::Hist1D h;
  try {
    h = hbook::Hist1D(n, lo, hi);
  } catch (const Error& e) {
    throw TruncatedRecord(std::string("hist1d axis: ") + e.what());
  }
  for (auto& b : h.slots()) {
    b.entries = r.u64();
    b.sum_w = r.f64();
    b.sum_w2 = r.f64();
    b.sum_wx = r.f64();
    b.sum_wx2 = r.f64();
  }
  h.set_nan_entries(r.u64());
  expect_consumed(r);
  return h;
}

inline hbook::Hist2D decode_hist2d(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto nx = r.u32();
  const double xlo = r.f64();
  const double xhi = r.f64();
  const auto ny = r.u32();
  const double ylo = r.f64();
  const double yhi = r.f64();
  if (nx == 0 || ny == 0 || (std::uint64_t(nx) + 2) * (std::uint64_t(ny) + 2) * 24 > r.remaining())
    throw TruncatedRecord("hist2d cells");
  hbook::Hist2D h;
  try {
    h = hbook::Hist2D(nx, xlo, xhi, ny, ylo, yhi);
  } catch (const Error& e) {
    throw TruncatedRecord(std::string("hist2d axis: ") + e.what());
  }
  for (auto& c : h.cells()) {
    c.entries = r.u64();
    c.sum_w = r.f64();
    c.sum_w2 = r.f64();
  }
  h.set_nan_entries(r.u64());
  expect_consumed(r);
  return h;
}

inline hbook::NTuple decode_ntuple(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  const auto ncols = r.u32();
  if (ncols > r.remaining()) throw TruncatedRecord("ntuple schema");
  std::vector<hbook::Column> schema;
  for (std::uint32_t i = 0; i < ncols; ++i) {
    auto name = r.str("ntuple column name");
    const auto code = r.u8();
    if (code < 1 || code > 3) throw TruncatedRecord("ntuple column type code");
    schema.push_back({std::move(name), static_cast<hbook::ColumnType>(code)});
  }
  hbook::NTuple nt;
  try {
    nt = hbook::NTuple(schema);
  } catch (const Error& e) {
    throw TruncatedRecord(e.what());
  }
  const auto nrows = r.u64();
  for (std::uint64_t i = 0; i < nrows; ++i) {
    hbook::Row row;
    row.reserve(schema.size());
    for (const auto& c : schema) {
      switch (c.type) {
        case hbook::ColumnType::int64: row.emplace_back(r.i64()); break;
        case hbook::ColumnType::float64: row.emplace_back(r.f64()); break;
        case hbook::ColumnType::string: row.emplace_back(r.str("ntuple string cell")); break;
      }
    }
    nt.append(i, std::move(row));
  }
  expect_consumed(r);
  return nt;
}

}  // namespace detail

inline Object decode_payload(std::uint32_t type_tag, std::uint32_t version,
                             std::span<const std::uint8_t> payload) {
  if (type_tag < 1 || type_tag > 3) throw UnknownTypeTag(type_tag);
  if (version != current_version) throw UnknownVersion(type_tag, version);
  switch (static_cast<TypeTag>(type_tag)) {
    case TypeTag::hist1d: return detail::decode_hist1d(payload);
    case TypeTag::hist2d: return detail::decode_hist2d(payload);
    default: return detail::decode_ntuple(payload);
  }
}

// Appends one full record to out.
inline void write_record(Bytes& out, std::string_view name, const Object& obj) {
  const Bytes payload = std::visit([](const auto& o) { return encode_payload(o); }, obj);
  ByteWriter w(out);
  w.str(name);
  w.u32(static_cast<std::uint32_t>(type_tag_of(obj)));
  w.u32(current_version);
  w.u64(payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  w.u32(crc32(payload));
}

struct NamedObject {
  std::string name;
  Object object;
};

/// Sequential reader over an in-memory file image.
class Reader {
 public:
  explicit Reader(Bytes image) : image_(std::move(image)), in_(image_) {
    if (image_.size() < magic.size() ||
        !std::equal(magic.begin(), magic.end(), image_.begin()))
      throw BadMagic();
    in_.raw(magic.size(), "magic");
  }
  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;
  Reader(Reader&&) = default;

  static Reader open(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("rio: cannot open '" + path + "' for reading");
    Bytes image((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return Reader(std::move(image));
  }

  // Next record, or nullopt at a clean end of file.
  std::optional<NamedObject> next() {
    if (in_.remaining() == 0) return std::nullopt;
    auto name = in_.str("record name");
    const auto tag = in_.u32();
    const auto version = in_.u32();
    const auto len = in_.u64();
    const auto payload = in_.raw(len, "payload");
    const auto crc = in_.u32();
    if (crc != crc32(payload)) throw CrcMismatch(name);
    return NamedObject{std::move(name), decode_payload(tag, version, payload)};
  }

  std::vector<NamedObject> read_all() {
    std::vector<NamedObject> out;
    while (auto r = next()) out.push_back(std::move(*r));
    return out;
  }

 private:
  Bytes image_;
  ByteReader in_;
};

/// Buffers records and writes the file image on flush/close.
class Writer {
 public:
  Writer() { image_.insert(image_.end(), magic.begin(), magic.end()); }

  void write(std::string_view name, const Object& obj) { write_record(image_, name, obj); }
  const Bytes& image() const { return image_; }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("rio: cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(image_.data()), static_cast<std::streamsize>(image_.size()));
    if (!f) throw IoError("rio: write failed on '" + path + "'");
  }

 private:
  Bytes image_;
};

}  // namespace hepflow::rio
