#pragma once

// Worker-count sweep helpers: child-process runs with peak-RSS accounting,
// the sweep CSV, and SVG plots rendered from it.

#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hepflow/error.hpp"

extern char** environ;

namespace hepflow::app {

struct ChildResult {
  int exit_code = -1;  // -1 when killed by a signal
  std::optional<std::uint64_t> max_rss_bytes;
  double wall_seconds = 0;
};

/// Runs argv[0] with the given arguments and waits for it. The peak
/// resident set size comes from the kernel's accounting of the child
/// (ru_maxrss, reported in KiB on Linux).
inline ChildResult run_child(const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error("run_child: empty argv");
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const auto t0 = std::chrono::steady_clock::now();
  pid_t pid = 0;
  if (const int rc = posix_spawn(&pid, args[0], nullptr, nullptr, args.data(), environ); rc != 0)
    throw Error("cannot start '" + argv[0] + "': " + std::strerror(rc));
  int status = 0;
  rusage usage{};
  pid_t r;
  do {
    r = wait4(pid, &status, 0, &usage);
  } while (r < 0 && errno == EINTR);
  if (r < 0) throw Error("wait4 failed: " + std::string(std::strerror(errno)));
  ChildResult out;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#if defined(__linux__)
  out.max_rss_bytes = static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
#elif defined(__APPLE__)
  out.max_rss_bytes = static_cast<std::uint64_t>(usage.ru_maxrss);
#endif
  return out;
}

template <class T>
T median(std::vector<T> v) {
  if (v.empty()) throw Error("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : v[n / 2 - 1] + (v[n / 2] - v[n / 2 - 1]) / 2;
}

struct BenchRow {
  std::uint64_t n_workers = 0;
  double events_per_second = 0;
  std::optional<std::uint64_t> max_rss_bytes;
  double wall_seconds = 0;
  std::uint64_t events = 0;
};

inline const char* csv_header = "n_workers,events_per_second,max_rss_bytes,wall_seconds,events";

inline std::string csv_line(const BenchRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%llu,%.6f,", static_cast<unsigned long long>(r.n_workers), r.events_per_second);
  std::string line = buf;
  if (r.max_rss_bytes) line += std::to_string(*r.max_rss_bytes);
  std::snprintf(buf, sizeof buf, ",%.6f,%llu", r.wall_seconds, static_cast<unsigned long long>(r.events));
  return line + buf;
}

inline std::vector<BenchRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != csv_header) throw Error(path + ": unexpected CSV header");
  std::vector<BenchRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 5) throw Error(path + ":" + std::to_string(lineno) + ": expected 5 fields");
    try {
      BenchRow r;
      r.n_workers = std::stoull(f[0]);
      r.events_per_second = std::stod(f[1]);
      if (!f[2].empty()) r.max_rss_bytes = std::stoull(f[2]);
      r.wall_seconds = std::stod(f[3]);
      r.events = std::stoull(f[4]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw Error(path + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

struct Series {
  std::vector<double> x, y;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Round step for about `n` ticks over [0, hi].
inline double tick_step(double hi, int n) {
  if (!(hi > 0)) return 1;
  const double raw = hi / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10 * mag;
}

inline std::string tick_label(double v) {
  if (v == 0) return "0";
  if (std::abs(v) >= 1e5 || std::abs(v) < 1e-2) return fmt("%.3g", v);
  return fmt("%g", v);
}

}  // namespace detail

/// Line plot with markers on linear axes from 0. Output depends only on the
/// arguments.
inline std::string render_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const Series& s) {
  constexpr double W = 640, H = 420, left = 80, right = 20, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  double xmax = 1, ymax = 0;
  for (double v : s.x) xmax = std::max(xmax, v);
  for (double v : s.y) ymax = std::max(ymax, v);
  const double xstep = detail::tick_step(xmax, 8);
  const double ystep = detail::tick_step(ymax > 0 ? ymax * 1.05 : 1, 5);
  xmax = std::ceil(xmax / xstep) * xstep;
  const double ytop = std::max(ystep, std::ceil((ymax > 0 ? ymax * 1.05 : 1) / ystep) * ystep);
  auto X = [&](double v) { return left + pw * v / xmax; };
  auto Y = [&](double v) { return top + ph * (1 - v / ytop); };
  using detail::fmt;

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\" "
       "font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  o += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
  for (int k = 0; k * xstep <= xmax + xstep / 2; ++k) {
    const double v = k * xstep;
    const auto x = fmt("%.2f", X(v));
    o += "<line x1=\"" + x + "\" y1=\"" + fmt("%.2f", top) + "\" x2=\"" + x + "\" y2=\"" + fmt("%.2f", top + ph) +
         "\" stroke=\"#e0e0e0\"/>\n";
    o += "<text x=\"" + x + "\" y=\"" + fmt("%.2f", top + ph + 18) + "\" text-anchor=\"middle\">" +
         detail::tick_label(v) + "</text>\n";
  }
  for (int k = 0; k * ystep <= ytop + ystep / 2; ++k) {
    const double v = k * ystep;
    const auto y = fmt("%.2f", Y(v));
    o += "<line x1=\"" + fmt("%.2f", left) + "\" y1=\"" + y + "\" x2=\"" + fmt("%.2f", left + pw) + "\" y2=\"" + y +
         "\" stroke=\"#e0e0e0\"/>\n";
    o += "<text x=\"" + fmt("%.2f", left - 6) + "\" y=\"" + fmt("%.2f", Y(v) + 4) + "\" text-anchor=\"end\">" +
         detail::tick_label(v) + "</text>\n";
  }
  o += "<rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" + fmt("%.2f", pw) +
       "\" height=\"" + fmt("%.2f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  o += "<text x=\"" + fmt("%.2f", left + pw / 2) + "\" y=\"" + fmt("%.2f", H - 16) + "\" text-anchor=\"middle\">" +
       xlabel + "</text>\n";
  o += "<text transform=\"translate(18 " + fmt("%.2f", top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       ylabel + "</text>\n";
  if (!s.x.empty()) {
    o += "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) o += ' ';
      o += fmt("%.2f", X(s.x[i])) + "," + fmt("%.2f", Y(s.y[i]));
    }
    o += "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      o += "<circle cx=\"" + fmt("%.2f", X(s.x[i])) + "\" cy=\"" + fmt("%.2f", Y(s.y[i])) +
           "\" r=\"4\" fill=\"#1f77b4\"/>\n";
  }
  o += "</svg>\n";
  return o;
}

/// rate.svg and memory.svg in `dir`, from the rows of a sweep CSV. Rows
/// without an RSS value are left out of the memory plot.
inline void write_plots(const std::vector<BenchRow>& rows, const std::string& dir) {
  Series rate, mem;
  for (const auto& r : rows) {
    rate.x.push_back(static_cast<double>(r.n_workers));
    rate.y.push_back(r.events_per_second);
    if (r.max_rss_bytes) {
      mem.x.push_back(static_cast<double>(r.n_workers));
      mem.y.push_back(static_cast<double>(*r.max_rss_bytes) / (1024.0 * 1024.0));
    }
  }
  auto save = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    if (!out) throw Error("cannot write '" + dir + "/" + name + "'");
    out << text;
  };
  save("rate.svg", render_svg("Event processing rate", "workers (0 = sequential)", "events / s", rate));
  save("memory.svg", render_svg("Peak memory", "workers (0 = sequential)", "max RSS (MiB)", mem));
}

}  // namespace hepflow::app
