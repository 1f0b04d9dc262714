#pragma once

// HepMC2 ASCII (IO_GenEvent) reader.
//
// Event block layout, one record per line:
//   E evnum n_mpi scale alpha_qcd alpha_qed signal_process_id signal_vertex
//     n_vertices beam1 beam2 n_random [random...] n_weights [weight...]
//   N n_names "name"...            weight names (optional)
//   U momentum_unit length_unit    GEV|MEV, MM|CM (optional)
//   C / H / F                      cross section, heavy ion, pdf info (skipped)
//   V barcode id x y z ctau n_orphan_in n_out n_weights [weight...]
//   P barcode pdg px py pz e m status pol_theta pol_phi end_vertex n_flow
//     [code index]...
// Each V line is followed by its n_orphan_in incoming orphans and then its
// n_out outgoing particles. The block is delimited by
// HepMC::IO_GenEvent-START_EVENT_LISTING / END_EVENT_LISTING.

#include <zlib.h>

#include <charconv>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hepflow/error.hpp"
#include "hepflow/hepmc/event.hpp"

namespace hepflow::hepmc {

class ParseError : public Error {
 public:
  using Error::Error;
};

class MalformedLine : public ParseError {
 public:
  MalformedLine(std::size_t line, const std::string& reason)
      : ParseError("hepmc: line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class BarcodeClash : public ParseError {
 public:
  BarcodeClash(std::size_t line, int barcode)
      : ParseError("hepmc: line " + std::to_string(line) + ": duplicate barcode " + std::to_string(barcode)) {}
};

class DanglingEndVertex : public ParseError {
 public:
  DanglingEndVertex(int particle, int vertex)
      : ParseError("hepmc: particle " + std::to_string(particle) + " ends at unknown vertex " +
                   std::to_string(vertex)) {}
};

class UnexpectedEOF : public ParseError {
 public:
  explicit UnexpectedEOF(const std::string& where) : ParseError("hepmc: unexpected end of file " + where) {}
};

inline constexpr std::string_view start_listing = "HepMC::IO_GenEvent-START_EVENT_LISTING";
inline constexpr std::string_view end_listing = "HepMC::IO_GenEvent-END_EVENT_LISTING";

namespace detail {

// Whitespace tokenizer over one line, with typed extraction.
class Fields {
 public:
  Fields(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

  std::string_view word(const char* what) {
    skip_ws();
    if (pos_ >= s_.size()) fail(std::string("missing field '") + what + "'");
    const auto b = pos_;
    while (pos_ < s_.size() && !is_ws(s_[pos_])) ++pos_;
    return s_.substr(b, pos_ - b);
  }

  template <class T>
  T num(const char* what) {
    const auto w = word(what);
    T v{};
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || p != w.data() + w.size())
      fail(std::string("non-numeric field '") + what + "': '" + std::string(w) + "'");
    return v;
  }

  int count(const char* what) {
    const int n = num<int>(what);
    if (n < 0) fail(std::string("negative count '") + what + "'");
    return n;
  }

  std::string quoted(const char* what) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '"') fail(std::string("expected quoted '") + what + "'");
    const auto e = s_.find('"', pos_ + 1);
    if (e == std::string_view::npos) fail(std::string("unterminated quote in '") + what + "'");
    std::string out(s_.substr(pos_ + 1, e - pos_ - 1));
    pos_ = e + 1;
    return out;
  }

  void expect_end() {
    skip_ws();
    if (pos_ < s_.size()) fail("trailing fields: '" + std::string(s_.substr(pos_)) + "'");
  }

  [[noreturn]] void fail(const std::string& reason) const { throw MalformedLine(line_, reason); }

 private:
  static bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r'; }
  void skip_ws() {
    while (pos_ < s_.size() && is_ws(s_[pos_])) ++pos_;
  }
  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline bool blank(std::string_view s) { return s.find_first_not_of(" \t\r") == std::string_view::npos; }

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Line source over a gzip or plain file via zlib.
class GzLines {
 public:
  explicit GzLines(const std::string& path) : f_(gzopen(path.c_str(), "rb")) {
    if (!f_) throw Error("hepmc: cannot open '" + path + "'");
    gzbuffer(f_, 1 << 17);
  }
  ~GzLines() {
    if (f_) gzclose(f_);
  }
  GzLines(const GzLines&) = delete;
  GzLines& operator=(const GzLines&) = delete;

  bool operator()(std::string& line) {
    line.clear();
    char buf[4096];
    for (;;) {
      if (!gzgets(f_, buf, sizeof buf)) {
        int err = 0;
        const char* msg = gzerror(f_, &err);
        if (err != Z_OK && err != Z_STREAM_END) throw Error(std::string("hepmc: read error: ") + msg);
        return !line.empty();
      }
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        return true;
      }
    }
  }

 private:
  gzFile f_;
};

}  // namespace detail

/// Pull parser: one GenEvent per call to next_event(). Values are converted
/// to GeV and mm whatever the file declares in its U line, and the returned
/// event's unit fields say so.
class Reader {
 public:
  using LineSource = std::function<bool(std::string&)>;
  using Warn = std::function<void(std::size_t line, const std::string& message)>;

  explicit Reader(LineSource lines, Warn warn = {}) : lines_(std::move(lines)), warn_(std::move(warn)) {}

  static Reader open(const std::string& path, Warn warn = {}) {
    auto src = std::make_shared<detail::GzLines>(path);
    return Reader([src](std::string& l) { return (*src)(l); }, std::move(warn));
  }

  static Reader from_string(std::string text, Warn warn = {}) {
    auto in = std::make_shared<std::istringstream>(std::move(text));
    return Reader([in](std::string& l) { return static_cast<bool>(std::getline(*in, l)); }, std::move(warn));
  }

  std::size_t line_number() const { return line_no_; }

  std::optional<GenEvent> next_event() {
    if (finished_) return std::nullopt;
    if (!started_) {
      std::string l;
      while (read(l)) {
        if (detail::trim(l) == start_listing) {
          started_ = true;
          break;
        }
      }
      if (!started_) {
        finished_ = true;
        return std::nullopt;
      }
    }

    // find the E line
    std::string line;
    for (;;) {
      if (!next_nonblank(line)) {
        finished_ = true;  // listing without END sentinel
        return std::nullopt;
      }
      const auto t = detail::trim(line);
      if (t == end_listing) {
        finished_ = true;
        return std::nullopt;
      }
      if (t.front() == 'E' && (t.size() == 1 || t[1] == ' ' || t[1] == '\t')) break;
      if (t.front() == 'V' || t.front() == 'P') throw MalformedLine(line_no_, "record outside of an event");
      warning("skipping unrecognized line before event header");
    }
    return parse_event(line);
  }

 private:
  bool read(std::string& l) {
    if (peeked_) {
      l = std::move(*peeked_);
      peeked_.reset();
      ++line_no_;
      return true;
    }
    if (!lines_(l)) return false;
    ++line_no_;
    return true;
  }
  bool next_nonblank(std::string& l) {
    while (read(l))
      if (!detail::blank(l)) return true;
    return false;
  }
  void unread(std::string l) {
    peeked_ = std::move(l);
    --line_no_;
  }
  void warning(const std::string& msg) {
    if (warn_) warn_(line_no_, msg);
  }

  static char tag(std::string_view l) { return detail::trim(l).front(); }

  GenEvent parse_event(const std::string& eline) {
    GenEvent ev;
    int n_vertices = 0;
    {
      detail::Fields f(detail::trim(eline), line_no_);
      f.word("E");
      ev.event_number = f.num<int>("event number");
      ev.n_mpi = f.num<int>("n_mpi");
      ev.event_scale = f.num<double>("event scale");
      ev.alpha_qcd = f.num<double>("alpha_qcd");
      ev.alpha_qed = f.num<double>("alpha_qed");
      ev.signal_process_id = f.num<int>("signal process id");
      ev.signal_vertex = f.num<int>("signal vertex barcode");
      n_vertices = f.count("vertex count");
      ev.beam1 = f.num<int>("beam 1 barcode");
      ev.beam2 = f.num<int>("beam 2 barcode");
      const int nrand = f.count("random state count");
      for (int i = 0; i < nrand; ++i) ev.random_states.push_back(f.num<long>("random state"));
      const int nw = f.count("weight count");
      for (int i = 0; i < nw; ++i) ev.weights.push_back(f.num<double>("weight"));
      f.expect_end();
    }

    double p_scale = 1.0, x_scale = 1.0;
    std::string line;
    std::set<int> vertex_barcodes, particle_barcodes;

    // auxiliary lines up to the first vertex
    for (;;) {
      if (n_vertices == 0) break;
      if (!next_nonblank(line)) throw UnexpectedEOF("in event " + std::to_string(ev.event_number));
      const char t = tag(line);
      if (t == 'V') {
        unread(line);
        break;
      }
      detail::Fields f(detail::trim(line), line_no_);
      f.word("tag");
      switch (t) {
        case 'N': {
          const int n = f.count("weight name count");
          for (int i = 0; i < n; ++i) ev.weight_names.push_back(f.quoted("weight name"));
          break;
        }
        case 'U': {
          ev.momentum_unit = std::string(f.word("momentum unit"));
          ev.length_unit = std::string(f.word("length unit"));
          if (ev.momentum_unit == "MEV") p_scale = 1e-3;
          else if (ev.momentum_unit != "GEV") f.fail("unknown momentum unit '" + ev.momentum_unit + "'");
          if (ev.length_unit == "CM") x_scale = 10.0;
          else if (ev.length_unit != "MM") f.fail("unknown length unit '" + ev.length_unit + "'");
          break;
        }
        case 'C':
        case 'H':
        case 'F':
        case 'W':
          break;
        case 'E':
        case 'P':
          f.fail(std::string("unexpected '") + t + "' line before the first vertex");
        default:
          warning(std::string("skipping unrecognized '") + t + "' line");
      }
    }

    for (int iv = 0; iv < n_vertices; ++iv) {
      if (!next_nonblank(line)) throw UnexpectedEOF("in event " + std::to_string(ev.event_number));
      detail::Fields f(detail::trim(line), line_no_);
      if (f.word("tag") != "V")
        f.fail("expected vertex " + std::to_string(iv + 1) + " of " + std::to_string(n_vertices));
      GenVertex v;
      v.barcode = f.num<int>("vertex barcode");
      v.id = f.num<int>("vertex id");
      v.position.x = f.num<double>("x") * x_scale;
      v.position.y = f.num<double>("y") * x_scale;
      v.position.z = f.num<double>("z") * x_scale;
      v.position.t = f.num<double>("ctau") * x_scale;
      v.declared_orphans = f.count("orphan count");
      v.declared_out = f.count("outgoing count");
      const int nw = f.count("vertex weight count");
      for (int i = 0; i < nw; ++i) v.weights.push_back(f.num<double>("vertex weight"));
      f.expect_end();
      if (v.barcode >= 0) f.fail("vertex barcode must be negative");
      if (!vertex_barcodes.insert(v.barcode).second) throw BarcodeClash(line_no_, v.barcode);

      const int n_particles = v.declared_orphans + v.declared_out;
      for (int ip = 0; ip < n_particles; ++ip) {
        if (!next_nonblank(line)) throw UnexpectedEOF("in vertex " + std::to_string(v.barcode));
        GenParticle p = parse_particle(line, p_scale);
        if (!particle_barcodes.insert(p.barcode).second) throw BarcodeClash(line_no_, p.barcode);
        if (ip >= v.declared_orphans) {
          p.production_vertex = v.barcode;
          v.particles_out.push_back(p.barcode);
        }
        if (!(p.momentum.t >= 0))
          warning("particle " + std::to_string(p.barcode) + " has negative energy");
        ev.particles.push_back(std::move(p));
      }
      ev.vertices.push_back(std::move(v));
    }

    for (const auto& p : ev.particles) {
      if (p.end_vertex == 0) continue;
      if (!vertex_barcodes.count(p.end_vertex)) throw DanglingEndVertex(p.barcode, p.end_vertex);
    }
    for (auto& v : ev.vertices)
      for (const auto& p : ev.particles)
        if (p.end_vertex == v.barcode) v.particles_in.push_back(p.barcode);
    ev.momentum_unit = "GEV";
    ev.length_unit = "MM";
    return ev;
  }

  GenParticle parse_particle(const std::string& line, double p_scale) {
    detail::Fields f(detail::trim(line), line_no_);
    if (f.word("tag") != "P") f.fail("expected particle line");
    GenParticle p;
    p.barcode = f.num<int>("particle barcode");
    p.pdg_id = f.num<int>("pdg id");
    p.momentum.x = f.num<double>("px") * p_scale;
    p.momentum.y = f.num<double>("py") * p_scale;
    p.momentum.z = f.num<double>("pz") * p_scale;
    p.momentum.t = f.num<double>("e") * p_scale;
    p.generated_mass = f.num<double>("generated mass") * p_scale;
    p.status = f.num<int>("status");
    p.pol_theta = f.num<double>("polarization theta");
    p.pol_phi = f.num<double>("polarization phi");
    p.end_vertex = f.num<int>("end vertex barcode");
    const int nflow = f.count("flow count");
    for (int i = 0; i < nflow; ++i) {
      const int code = f.num<int>("flow code");
      p.flows.push_back({code, f.num<int>("flow index")});
    }
    f.expect_end();
    if (p.barcode <= 0) f.fail("particle barcode must be positive");
    if (p.end_vertex > 0) f.fail("end vertex barcode must be 0 or negative");
    return p;
  }

  LineSource lines_;
  Warn warn_;
  std::optional<std::string> peeked_;
  std::size_t line_no_ = 0;
  bool started_ = false;
  bool finished_ = false;
};

}  // namespace hepflow::hepmc
