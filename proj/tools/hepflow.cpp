// hepflow: run a configured pipeline, sweep worker counts, generate toy
// HepMC input.

#include <unistd.h>
#include <zlib.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hepflow/app/bench.hpp"
#include "hepflow/app/pipeline.hpp"
#include "hepflow/hepmc/generator.hpp"
#include "hepflow/hepmc/writer.hpp"

namespace fs = std::filesystem;
using namespace hepflow;

namespace {

constexpr int exit_failure = 1;
constexpr int exit_config = 2;
constexpr int exit_digest = 3;

std::string hex_digest(const rio::Bytes& bytes) {
  const std::string_view view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fwk::fnv1a64(view)));
  return buf;
}

struct RunArgs {
  std::string config;
  std::string input;
  std::uint64_t nevents = 0;
  std::size_t nworkers = 1;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::string log_level = "info";
  bool sequential = false;
  std::string stats_json;
};

app::PipelineConfig resolve(const RunArgs& a) {
  auto cfg = app::load_config(a.config);
  if (!a.input.empty()) {
    cfg.source.kind = "hepmc";
    cfg.source.path = a.input;
  }
  if (a.nevents > 0 && cfg.source.kind != "hepmc") cfg.source.n_events = a.nevents;
  if (a.seed) cfg.global_seed = *a.seed;
  return cfg;
}

int cmd_run(const RunArgs& a) {
  fwk::Logger logger(std::clog, fwk::parse_level(a.log_level));
  app::Pipeline pipeline(resolve(a), &logger);
  const fwk::RunOptions opts{a.nworkers, pipeline.config().global_seed, a.nevents, a.sequential};
  const auto stats = pipeline.run(opts);
  const auto rio_out = pipeline.framework().hists().to_rio();
  if (!a.output.empty()) rio_out.save(a.output);
  const auto digest = hex_digest(rio_out.image());

  const std::uint64_t events = stats.events_processed + stats.events_skipped;
  const double rate = stats.wall_time > 0 ? static_cast<double>(events) / stats.wall_time : 0.0;
  std::printf("events processed: %llu\n", static_cast<unsigned long long>(stats.events_processed));
  std::printf("events skipped:   %llu\n", static_cast<unsigned long long>(stats.events_skipped));
  std::printf("workers:          %zu%s\n", a.nworkers, a.sequential ? " (sequential)" : "");
  std::printf("wall time:        %.3f s (%.1f events/s)\n", stats.wall_time, rate);
  std::printf("max in flight:    %zu\n", stats.max_in_flight);
  for (const auto& [task, t] : stats.per_task_time) std::printf("  %-24s %.3f s\n", task.c_str(), t);
  std::printf("output:           %s\n", a.output.empty() ? "(not written)" : a.output.c_str());
  std::printf("digest:           %s\n", digest.c_str());

  if (!a.stats_json.empty()) {
    nlohmann::json j = {{"events_processed", stats.events_processed},
                        {"events_skipped", stats.events_skipped},
                        {"events", events},
                        {"wall_seconds", stats.wall_time},
                        {"events_per_second", rate},
                        {"n_workers", a.nworkers},
                        {"sequential", a.sequential},
                        {"max_in_flight", stats.max_in_flight},
                        {"per_task_seconds", stats.per_task_time},
                        {"digest", digest}};
    std::ofstream out(a.stats_json);
    if (!out) throw rio::IoError("cannot write '" + a.stats_json + "'");
    out << j.dump(2) << '\n';
  }
  return 0;
}

struct BenchArgs {
  RunArgs run;
  std::string workers = "1,2,4";
  int reps = 3;
  std::string csv = "bench.csv";
  std::string plots;
};

std::vector<std::uint64_t> parse_workers(const std::string& list) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("-workers: bad entry '" + item + "'");
    if (!out.empty() && v <= out.back()) throw ConfigError("-workers: counts must be strictly increasing");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("-workers: empty list");
  return out;
}

int cmd_bench(const BenchArgs& a) {
  const auto workers = parse_workers(a.workers);
  if (a.reps < 1) throw ConfigError("-reps must be >= 1");
  if (a.reps < 3) std::fprintf(stderr, "warning: fewer than 3 repetitions per point\n");
  { app::Pipeline check(resolve(a.run)); }  // config errors surface before any child runs

  const std::string self = fs::read_symlink("/proc/self/exe").string();
  const fs::path tmp = fs::temp_directory_path() / ("hepflow-bench-" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{tmp};

  std::ofstream csv(a.csv);
  if (!csv) throw rio::IoError("cannot write '" + a.csv + "'");
  csv << app::csv_header << '\n' << std::flush;

  std::vector<std::string> digests;
  std::optional<std::uint64_t> events_ref;
  for (const auto w : workers) {
    std::vector<std::string> argv = {self,
                                     "run",
                                     a.run.config,
                                     "--nworkers",
                                     std::to_string(std::max<std::uint64_t>(w, 1)),
                                     "--output",
                                     (tmp / "out.rio").string(),
                                     "--stats-json",
                                     (tmp / "stats.json").string(),
                                     "--log-level",
                                     "warning",
                                     "--nevents",
                                     std::to_string(a.run.nevents)};
    if (w == 0) argv.push_back("--sequential");
    if (!a.run.input.empty()) argv.insert(argv.end(), {"--input", a.run.input});
    if (a.run.seed) argv.insert(argv.end(), {"--seed", std::to_string(*a.run.seed)});

    std::vector<double> rates, walls;
    std::vector<std::uint64_t> rss;
    bool rss_known = true;
    std::uint64_t events = 0;
    for (int rep = -1; rep < a.reps; ++rep) {  // rep -1 is the discarded warm-up
      const auto child = app::run_child(argv);
      if (child.exit_code != 0) {
        std::fprintf(stderr, "error: run with %llu workers failed (exit %d); partial CSV kept in %s\n",
                     static_cast<unsigned long long>(w), child.exit_code, a.csv.c_str());
        return exit_failure;
      }
      std::ifstream in(tmp / "stats.json");
      const auto stats = nlohmann::json::parse(in);
      if (rep < 0) continue;
      rates.push_back(stats.at("events_per_second").get<double>());
      walls.push_back(stats.at("wall_seconds").get<double>());
      events = stats.at("events").get<std::uint64_t>();
      digests.push_back(stats.at("digest").get<std::string>());
      if (child.max_rss_bytes) rss.push_back(*child.max_rss_bytes);
      else rss_known = false;
    }
    if (!rss_known) std::fprintf(stderr, "warning: peak RSS not available on this platform\n");
    if (events_ref && *events_ref != events) {
      std::fprintf(stderr, "error: event count changed between sweep points (%llu vs %llu)\n",
                   static_cast<unsigned long long>(*events_ref), static_cast<unsigned long long>(events));
      return exit_failure;
    }
    events_ref = events;

    app::BenchRow row;
    row.n_workers = w;
    row.events_per_second = app::median(rates);
    if (rss_known) row.max_rss_bytes = app::median(rss);
    row.wall_seconds = app::median(walls);
    row.events = events;
    csv << app::csv_line(row) << '\n' << std::flush;
    std::printf("workers %3llu: %10.1f events/s  max_rss %s  (%llu events)\n", static_cast<unsigned long long>(w),
                row.events_per_second,
                row.max_rss_bytes ? (std::to_string(*row.max_rss_bytes / 1024) + " KiB").c_str() : "n/a",
                static_cast<unsigned long long>(events));
    std::fflush(stdout);
  }
  csv.close();

  if (!a.plots.empty()) {
    fs::create_directories(a.plots);
    app::write_plots(app::read_csv(a.csv), a.plots);
  }

  const bool same = std::all_of(digests.begin(), digests.end(), [&](const auto& d) { return d == digests.front(); });
  if (!same) {
    std::printf("digest audit: MISMATCH\n");
    for (std::size_t i = 0; i < digests.size(); ++i) std::printf("  run %zu: %s\n", i, digests[i].c_str());
    return exit_digest;
  }
  std::printf("digest audit: OK (%s, %zu runs)\n", digests.front().c_str(), digests.size());
  return 0;
}

int cmd_plot(const std::string& csv, const std::string& dir) {
  fs::create_directories(dir);
  app::write_plots(app::read_csv(csv), dir);
  return 0;
}

int cmd_gen(const std::string& output, std::uint64_t nevents, std::uint64_t seed) {
  std::ostringstream text;
  {
    hepmc::Writer w(text);
    for (std::uint64_t i = 0; i < nevents; ++i) w.write(hepmc::generate_event(seed, i));
  }
  const std::string s = text.str();
  if (output.size() > 3 && output.ends_with(".gz")) {
    gzFile f = gzopen(output.c_str(), "wb");
    if (!f) throw rio::IoError("cannot write '" + output + "'");
    const int n = gzwrite(f, s.data(), static_cast<unsigned>(s.size()));
    if (gzclose(f) != Z_OK || n != static_cast<int>(s.size())) throw rio::IoError("write failed on '" + output + "'");
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out || !(out << s)) throw rio::IoError("cannot write '" + output + "'");
  }
  std::printf("wrote %llu events to %s\n", static_cast<unsigned long long>(nevents), output.c_str());
  return 0;
}

// Accept Go-style single-dash long flags (-nworkers 4) next to --nworkers.
std::vector<std::string> normalize_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = argc - 1; i >= 1; --i) {  // CLI11 wants them reversed
    std::string a = argv[i];
    if (a.size() > 2 && a[0] == '-' && std::isalpha(static_cast<unsigned char>(a[1]))) a.insert(0, "-");
    out.push_back(std::move(a));
  }
  return out;
}

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("config", a.config, "pipeline configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--input", a.input, "HepMC input file, replaces the configured source");
  cmd->add_option("--nevents", a.nevents, "number of events, 0 = all");
  cmd->add_option("--seed", a.seed, "global seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("hepflow: concurrent event-processing pipelines with fast detector simulation");
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "run a configured pipeline");
  add_run_options(run_cmd, run);
  run_cmd->add_option("--nworkers", run.nworkers, "events in flight / worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--output", run.output, "rio output file");
  run_cmd->add_option("--log-level", run.log_level, "debug, info, warning or error");
  run_cmd->add_flag("--sequential", run.sequential, "single-context event loop without worker threads");
  run_cmd->add_option("--stats-json", run.stats_json, "write run statistics as JSON");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "sweep worker counts, write CSV and plots");
  add_run_options(bench_cmd, bench.run);
  bench_cmd->add_option("--workers", bench.workers, "comma-separated worker counts, 0 = sequential");
  bench_cmd->add_option("--reps", bench.reps, "timed repetitions per point");
  bench_cmd->add_option("--csv", bench.csv, "CSV output path");
  bench_cmd->add_option("--plots", bench.plots, "directory for rate.svg and memory.svg");

  std::string plot_csv, plot_dir;
  auto* plot_cmd = app.add_subcommand("plot", "regenerate plots from a bench CSV");
  plot_cmd->add_option("--csv", plot_csv, "bench CSV")->required();
  plot_cmd->add_option("--plots", plot_dir, "output directory")->required();

  std::string gen_out;
  std::uint64_t gen_n = 100, gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "write toy-generator events as HepMC");
  gen_cmd->add_option("--output", gen_out, "output path (.gz for gzip)")->required();
  gen_cmd->add_option("--nevents", gen_n, "number of events");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");

  try {
    app.parse(normalize_args(argc, argv));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*bench_cmd) return cmd_bench(bench);
    if (*plot_cmd) return cmd_plot(plot_csv, plot_dir);
    return cmd_gen(gen_out, gen_n, gen_seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  } catch (const fwk::GraphError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return exit_config;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_failure;
  }
}
