// Acceptance checks 1-8. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   acceptance                 all criteria
//   acceptance --criterion 3   only criterion 3 (repeatable)

#include <sched.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../dag_util.hpp"
#include "../fwk_util.hpp"
#include "../oracles.hpp"
#include "../random_objects.hpp"
#include "hepflow/app/bench.hpp"
#include "hepflow/fads/calorimeter.hpp"
#include "hepflow/fads/jets.hpp"
#include "hepflow/fads/propagate.hpp"
#include "hepflow/fads/response.hpp"
#include "hepflow/hbook/hist1d.hpp"
#include "hepflow/hbook/hist2d.hpp"
#include "hepflow/hepmc/json.hpp"
#include "hepflow/hepmc/reader.hpp"
#include "hepflow/rio/rio.hpp"

namespace fs = std::filesystem;
using namespace hepflow;

namespace {

const std::string cli = HEPFLOW_CLI;
const std::string data_dir = HEPFLOW_DATA_DIR;
const std::string fixture_dir = HEPFLOW_FIXTURE_DIR;

// Tolerances and sample sizes.
constexpr int determinism_events = 1000;
constexpr std::uint64_t determinism_seed = 42;
constexpr double determinism_budget_s = 30;
constexpr int dag_trials = 1000;
constexpr int dag_max_tasks = 12;
constexpr int dag_min_executed_events = 1000;
constexpr int jet_trials = 1000;
constexpr int jet_max_inputs = 20;
constexpr int track_trials = 1000;
constexpr double boundary_tol_m = 1e-9;
constexpr double calo_rel_tol = 1e-9;
constexpr int rate_samples = 100000;
constexpr double scaling_min_speedup = 2.0;
constexpr double scaling_max_rss_ratio = 4.0;
constexpr int scaling_min_cores = 4;
constexpr double scaling_budget_s = 120;
constexpr int rio_trials = 1000;
constexpr double merge_rel_tol = 1e-12;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Shell {
  int code;
  std::string out;
};

Shell shell(const std::string& cmd) {
  Shell r{-1, {}};
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) {
  if (a == b) return 0;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("hepflow_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// ---- 1 -----------------------------------------------------------------------

Outcome determinism(const fs::path& tmp) {
  const auto input = tmp / "events.hepmc";
  const auto g = shell(cli + " gen -output " + input.string() + " -nevents " + std::to_string(determinism_events) +
                       " -seed 2024");
  if (g.code != 0) return {false, "generator failed: " + g.out};
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> images;
  std::string digests;
  for (const char* w : {"1", "2", "8"}) {
    const auto out = tmp / (std::string("det_") + w + ".rio");
    const auto r = shell(cli + " run " + data_dir + "/fads_pipeline.json -input " + input.string() + " -seed " +
                         std::to_string(determinism_seed) + " -nworkers " + w + " -output " + out.string() +
                         " -log-level warning");
    if (r.code != 0) return {false, std::string("run with ") + w + " workers failed: " + r.out};
    if (r.out.find("events processed: " + std::to_string(determinism_events) + "\n") == std::string::npos)
      return {false, std::string("unexpected event count with ") + w + " workers"};
    images.push_back(slurp(out));
    const auto pos = r.out.find("digest:");
    digests += std::string(w) + ":" + r.out.substr(r.out.find_first_not_of(' ', pos + 7), 16) + " ";
  }
  const double elapsed = seconds_since(t0);
  const bool same = images[0] == images[1] && images[0] == images[2] && !images[0].empty();
  return {same, std::string(same ? "byte-identical" : "OUTPUTS DIFFER") + " rio files (" +
                    std::to_string(images[0].size()) + " bytes), digests " + digests + "for " +
                    std::to_string(determinism_events) + " events, 3 runs in " + fmt("%.1f", elapsed) + " s" +
                    (elapsed < determinism_budget_s ? "" : " (over the 30 s budget)")};
}

// ---- 2 -----------------------------------------------------------------------

Outcome scheduler() {
  using testing_util::FnTask;
  std::mt19937_64 gen(20240601);
  int mismatches = 0, accepted_graphs = 0, rejected_graphs = 0;
  long executed = 0, violations = 0, edges_checked = 0;
  for (int trial = 0; trial < dag_trials; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, dag_max_tasks)(gen);
    const double p = std::uniform_real_distribution<double>(0.02, 0.3)(gen);
    const auto edges = testing_util::random_edges(gen, n, p, trial % 2 == 0);
    const bool cyclic = testing_util::has_cycle_closure(n, edges);
    auto specs = testing_util::specs_from_edges(n, edges);
    for (auto& s : specs) s.inputs.push_back(fwk::input("tick", "u64"));
    bool accepted = true;
    try {
      fwk::build_graph(specs, {"tick"});
    } catch (const fwk::CycleError&) {
      accepted = false;
    }
    if (accepted == cyclic) ++mismatches;
    if (!accepted) {
      ++rejected_graphs;
      continue;
    }
    ++accepted_graphs;

    const int n_events = 3;
    std::atomic<std::uint64_t> clock{0};
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> stamps(
        n, std::vector<std::pair<std::uint64_t, std::uint64_t>>(n_events));
    std::vector<std::unique_ptr<fwk::Task>> tasks;
    for (int i = 0; i < n; ++i) {
      tasks.push_back(std::make_unique<FnTask>(specs[i], [&, i](fwk::EventContext& ctx) {
        const auto ev = ctx.event_index();
        stamps[i][ev].first = ++clock;
        ctx.put(testing_util::node_key(i), i);
        stamps[i][ev].second = ++clock;
      }));
    }
    fwk::Framework fw(std::move(tasks), {"tick"});
    testing_util::IndexSource src(n_events);
    fwk::RunOptions opts;
    opts.n_workers = 1 + static_cast<std::size_t>(trial % 8);
    opts.sequential = trial % 10 == 1;
    executed += static_cast<long>(fw.run(src, opts).events_processed);
    for (auto [u, v] : edges)
      for (int ev = 0; ev < n_events; ++ev) {
        ++edges_checked;
        if (!(stamps[u][ev].second < stamps[v][ev].first)) ++violations;
      }
  }
  const bool pass = mismatches == 0 && violations == 0 && executed >= dag_min_executed_events;
  return {pass, std::to_string(dag_trials) + " random DAGs (" + std::to_string(accepted_graphs) + " accepted, " +
                    std::to_string(rejected_graphs) + " rejected), oracle mismatches " + std::to_string(mismatches) +
                    "; " + std::to_string(executed) + " events executed, " + std::to_string(violations) +
                    " dependency violations over " + std::to_string(edges_checked) + " edge checks"};
}

// ---- 3 -----------------------------------------------------------------------

std::vector<fads::FourMomentum> random_jet_inputs(std::mt19937_64& gen, int n) {
  using fads::pi;
  std::uniform_real_distribution<double> pt(1, 100), eta(-2.5, 2.5), phi(-pi, pi), m(0, 1);
  std::vector<fads::FourMomentum> v;
  const double e0 = eta(gen), p0 = phi(gen);
  for (int i = 0; i < n; ++i) {
    if (i % 3 == 0) v.push_back(fads::FourMomentum::from_pt_eta_phi_m(pt(gen), eta(gen), phi(gen), m(gen)));
    else
      v.push_back(fads::FourMomentum::from_pt_eta_phi_m(pt(gen), e0 + 0.3 * (eta(gen) / 2.5),
                                                        fads::wrap_phi(p0 + 0.3 * phi(gen) / pi), m(gen)));
  }
  return v;
}

Outcome jets() {
  std::mt19937_64 gen(424242);
  int partition_mismatch = 0, momentum_mismatch = 0;
  long n_jets = 0;
  for (double p : {-1.0, 0.0, 1.0}) {
    for (int trial = 0; trial < jet_trials; ++trial) {
      const int n = 1 + static_cast<int>(gen() % jet_max_inputs);
      const auto in = random_jet_inputs(gen, n);
      const double R = trial % 2 ? 0.4 : 0.7;
      const auto got = fads::cluster_jets(in, {p, R}, 5.0);
      const auto ref = oracle::cluster_bruteforce(in, p, R, 5.0);
      if (got.size() != ref.size()) {
        ++partition_mismatch;
        continue;
      }
      for (std::size_t k = 0; k < got.size(); ++k) {
        ++n_jets;
        if (got[k].constituents != ref[k].members) ++partition_mismatch;
        else if (!(got[k].momentum == ref[k].p)) ++momentum_mismatch;
      }
    }
  }
  return {partition_mismatch == 0 && momentum_mismatch == 0,
          std::to_string(3 * jet_trials) + " events (p = -1, 0, 1), " + std::to_string(n_jets) +
              " jets; partition mismatches " + std::to_string(partition_mismatch) + ", momentum mismatches " +
              std::to_string(momentum_mismatch) + " (bit-equal required)"};
}

// ---- 4 -----------------------------------------------------------------------

fads::Candidate make_particle(double pt, double eta, double phi, int pdg, double m = 0) {
  fads::Candidate c;
  c.momentum = fads::FourMomentum::from_pt_eta_phi_m(pt, eta, phi, m);
  c.pdg_id = pdg;
  c.charge = fads::charge_of(pdg);
  return c;
}

Outcome physics() {
  using fads::pi;
  std::vector<std::string> problems;

  // tracks against the step integrator
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_boundary = 0, worst_oracle = 0;
  for (int trial = 0; trial < track_trials; ++trial) {
    fads::DetectorConfig det;
    det.B = trial % 2 ? 2.0 : 3.8;
    det.radius = 1.2;
    det.half_length = 3.0;
    const double pt = std::exp(std::log(0.3) + u(gen) * std::log(200 / 0.3));
    auto c = make_particle(pt, -2.5 + 5 * u(gen), -pi + 2 * pi * u(gen), 211);
    c.charge = (u(gen) < 0.5 ? 1 : -1) * (u(gen) < 0.1 ? 2 : 1);
    const double r0 = 0.3 * u(gen), a0 = 2 * pi * u(gen);
    c.position = {r0 * std::cos(a0), r0 * std::sin(a0), -0.5 + u(gen)};
    const auto out = fads::propagate(c, det);
    const double on_barrel = std::abs(std::hypot(out.position.x, out.position.y) - det.radius);
    const double on_endcap = std::abs(std::abs(out.position.z) - det.half_length);
    worst_boundary = std::max(worst_boundary, std::min(on_barrel, on_endcap));
    const auto ref = oracle::integrate_to_boundary(
        {c.position.x, c.position.y, c.position.z, c.momentum.px, c.momentum.py, c.momentum.pz}, c.charge, det.B,
        det.radius, det.half_length);
    const double d = ref.reached ? std::sqrt(std::pow(ref.x - out.position.x, 2) + std::pow(ref.y - out.position.y, 2) +
                                             std::pow(ref.z - out.position.z, 2))
                                 : INFINITY;
    worst_oracle = std::max(worst_oracle, d);
  }
  if (!(worst_boundary < boundary_tol_m)) problems.push_back("boundary distance " + fmt("%.3g", worst_boundary));
  if (!(worst_oracle < boundary_tol_m)) problems.push_back("integrator distance " + fmt("%.3g", worst_oracle));

  // calorimeter without smearing
  fads::DetectorConfig calo;
  calo.em = calo.had = fads::Resolution{};
  calo.tower_e_min = 0;
  double worst_calo = 0;
  const int pdgs[] = {22, 11, -11, 211, -211, 130, 2112, 13, 14, 321};
  std::uniform_real_distribution<double> upt(0.1, 80), ueta(-6, 6), uphi(-pi, pi);
  for (int ev = 0; ev < 1000; ++ev) {
    fads::Candidates parts;
    double deposited = 0;
    const int n = 1 + static_cast<int>(gen() % 200);
    for (int i = 0; i < n; ++i) {
      auto c = make_particle(upt(gen), ueta(gen), uphi(gen), pdgs[gen() % 10], 0.1);
      if (std::abs(c.momentum.eta()) < calo.eta_max) {
        const auto f = calo.fraction(c.pdg_id);
        deposited += c.momentum.e * (f[0] + f[1]);
      }
      parts.push_back(c);
    }
    fwk::CounterRng rng(ev);
    double sum = 0;
    for (const auto& t : fads::calorimeter(parts, calo, rng)) sum += t.momentum.e;
    worst_calo = std::max(worst_calo, deposited > 0 ? std::abs(sum / deposited - 1) : std::abs(sum));
  }
  if (!(worst_calo < calo_rel_tol)) problems.push_back("calorimeter relative error " + fmt("%.3g", worst_calo));

  // efficiency: 3 sigma binomial
  fwk::CounterRng rng(12345);
  const auto probe = make_particle(30, 0.5, 0.1, 211);
  int kept = 0;
  for (int i = 0; i < rate_samples; ++i) kept += fads::apply_efficiency(probe, fads::Table::constant(0.8), rng);
  const double rate = kept / double(rate_samples);
  const double eff_bound = 3 * std::sqrt(0.8 * 0.2 / rate_samples);
  if (!(std::abs(rate - 0.8) <= eff_bound)) problems.push_back("efficiency rate " + fmt("%.5f", rate));

  // smearing: 3 sigma on the sample standard deviation of a normal
  const auto c100 = make_particle(100, 1.2, -0.4, 211, 0.13957);
  double s1 = 0, s2 = 0;
  for (int i = 0; i < rate_samples; ++i) {
    const double r = fads::smear_momentum(c100, fads::Table::constant(0.1), rng).momentum.pt() / 100 - 1;
    s1 += r;
    s2 += r * r;
  }
  const double mean = s1 / rate_samples;
  const double sd = std::sqrt(s2 / rate_samples - mean * mean);
  const double sd_bound = 3 * 0.1 / std::sqrt(2.0 * rate_samples);
  const double mean_bound = 3 * 0.1 / std::sqrt(double(rate_samples));
  if (!(std::abs(sd - 0.1) <= sd_bound)) problems.push_back("smearing sd " + fmt("%.5f", sd));
  if (!(std::abs(mean) <= mean_bound)) problems.push_back("smearing mean " + fmt("%.5f", mean));

  std::string detail = "tracks: worst boundary " + fmt("%.2g", worst_boundary) + " m, worst vs integrator " +
                       fmt("%.2g", worst_oracle) + " m; calorimeter worst rel " + fmt("%.2g", worst_calo) +
                       "; efficiency " + fmt("%.5f", rate) + " (0.8 +- " + fmt("%.4f", eff_bound) + "); smearing sd " +
                       fmt("%.5f", sd) + " (0.1 +- " + fmt("%.5f", sd_bound) + ")";
  for (const auto& p : problems) detail += "; FAILED " + p;
  return {problems.empty(), detail};
}

// ---- 5 -----------------------------------------------------------------------

int physical_cores() {
  // distinct (physical id, core id) pairs, capped by the affinity mask
  std::ifstream in("/proc/cpuinfo");
  std::set<std::pair<int, int>> cores;
  int phys = 0;
  for (std::string line; std::getline(in, line);) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const auto key = line.substr(0, line.find_last_not_of(" \t", colon - 1) + 1);
    if (key == "physical id") phys = std::stoi(line.substr(colon + 1));
    else if (key == "core id") cores.emplace(phys, std::stoi(line.substr(colon + 1)));
  }
  int n = cores.empty() ? static_cast<int>(std::thread::hardware_concurrency()) : static_cast<int>(cores.size());
  cpu_set_t set;
  if (sched_getaffinity(0, sizeof set, &set) == 0) n = std::min(n, CPU_COUNT(&set));
  return n;
}

Outcome scaling(const fs::path& tmp) {
  const int cores = physical_cores();
  const auto csv = tmp / "scaling.csv";
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = shell(cli + " bench " + data_dir + "/synthetic_busy.json -workers 1,4 -reps 3 -csv " + csv.string());
  const double elapsed = seconds_since(t0);
  if (r.code != 0) return {false, "bench failed: " + r.out};
  const auto rows = app::read_csv(csv.string());
  if (rows.size() != 2 || !rows[0].max_rss_bytes || !rows[1].max_rss_bytes)
    return {false, "bench CSV incomplete"};
  const double speedup = rows[1].events_per_second / rows[0].events_per_second;
  const double rss_ratio = double(*rows[1].max_rss_bytes) / double(*rows[0].max_rss_bytes);
  const bool rss_ok = rss_ratio <= scaling_max_rss_ratio;
  const bool speed_ok = speedup >= scaling_min_speedup;
  std::string detail = "rate(4)/rate(1) = " + fmt("%.2f", speedup) + " (need >= 2.0), max_rss(4)/max_rss(1) = " +
                       fmt("%.2f", rss_ratio) + " (need <= 4.0), " + fmt("%.1f", elapsed) + " s";
  if (elapsed > scaling_budget_s) detail += " (over the 2 min budget)";
  if (cores < scaling_min_cores)
    return {false, detail + "; NOT EVALUABLE: host has " + std::to_string(cores) +
                       " usable physical core(s), the criterion requires >= 4"};
  return {speed_ok && rss_ok, detail + "; " + std::to_string(cores) + " physical cores"};
}

// ---- 6 -----------------------------------------------------------------------

Outcome persistence() {
  std::mt19937_64 gen(606);
  int roundtrip_failures = 0;
  for (int trial = 0; trial < rio_trials; ++trial) {
    rio::Writer w;
    std::vector<std::pair<std::string, rio::Object>> objs;
    const int k = 1 + static_cast<int>(gen() % 3);
    for (int i = 0; i < k; ++i) {
      objs.emplace_back("obj" + std::to_string(i), testing_util::random_object(gen));
      w.write(objs.back().first, objs.back().second);
    }
    try {
      rio::Reader r(w.image());
      const auto back = r.read_all();
      bool ok = back.size() == objs.size();
      for (std::size_t i = 0; ok && i < objs.size(); ++i)
        ok = back[i].name == objs[i].first && back[i].object == objs[i].second;
      if (!ok) ++roundtrip_failures;
    } catch (const std::exception&) {
      ++roundtrip_failures;
    }
  }

  // payload corruptions: the CRC covers the payload
  int detected = 0, silent = 0, wrong_error = 0;
  for (int trial = 0; trial < rio_trials; ++trial) {
    rio::Writer w;
    const std::string name = "rec" + std::to_string(trial % 17);
    w.write(name, testing_util::random_object(gen));
    auto bytes = w.image();
    const std::size_t payload_begin = 4 + 4 + name.size() + 4 + 4 + 8;
    const std::size_t payload_end = bytes.size() - 4;
    const std::size_t pos = payload_begin + gen() % (payload_end - payload_begin);
    bytes[pos] ^= static_cast<std::uint8_t>(1 + gen() % 255);
    try {
      rio::Reader r(std::move(bytes));
      r.read_all();
      ++silent;
    } catch (const rio::CrcMismatch&) {
      ++detected;
    } catch (const rio::TruncatedRecord&) {
      ++detected;
    } catch (const std::exception&) {
      ++wrong_error;
    }
  }

  // informational: flips anywhere in the file, including unchecked header bytes
  int any_detected = 0, any_silent = 0;
  for (int trial = 0; trial < rio_trials; ++trial) {
    rio::Writer w;
    w.write("h", testing_util::random_object(gen));
    auto bytes = w.image();
    bytes[gen() % bytes.size()] ^= static_cast<std::uint8_t>(1 + gen() % 255);
    try {
      rio::Reader r(std::move(bytes));
      r.read_all();
      ++any_silent;
    } catch (const std::exception&) {
      ++any_detected;
    }
  }

  const bool pass = roundtrip_failures == 0 && silent == 0 && wrong_error == 0 && detected == rio_trials;
  return {pass, std::to_string(rio_trials) + " round trips, " + std::to_string(roundtrip_failures) + " failures; " +
                    std::to_string(rio_trials) + " payload byte corruptions: " + std::to_string(detected) +
                    " detected, " + std::to_string(silent) + " silent, " + std::to_string(wrong_error) +
                    " other errors [info: whole-file flips " + std::to_string(any_detected) + " detected, " +
                    std::to_string(any_silent) + " silent (record-name bytes are outside the CRC)]"};
}

// ---- 7 -----------------------------------------------------------------------

Outcome hepmc_ingestion() {
  const std::vector<std::pair<std::string, std::string>> fixtures = {
      {"minimal.hepmc", "minimal.json"},         {"units_aux.hepmc", "units_aux.json"},
      {"generated.hepmc", "generated.json"},     {"generated.hepmc.gz", "generated.json"},
      {"empty.hepmc", "empty.json"}};
  int mismatched_files = 0, unreconciled = 0, events = 0;
  for (const auto& [input, expected_file] : fixtures) {
    auto reader = hepmc::Reader::open(fixture_dir + "/" + input);
    nlohmann::json got = nlohmann::json::array();
    while (auto ev = reader.next_event()) {
      ++events;
      got.push_back(hepmc::to_json(*ev));
      std::size_t declared = 0;
      bool ok = true;
      for (const auto& v : ev->vertices) {
        declared += static_cast<std::size_t>(v.declared_orphans + v.declared_out);
        int orphans = 0;
        for (int bc : v.particles_in)
          if (ev->particle(bc)->production_vertex == 0) ++orphans;
        ok = ok && orphans == v.declared_orphans && v.particles_out.size() == std::size_t(v.declared_out);
      }
      if (!ok || declared != ev->particles.size()) ++unreconciled;
    }
    std::ifstream in(fixture_dir + "/" + expected_file);
    if (!in || got != nlohmann::json::parse(in)) ++mismatched_files;
  }
  return {mismatched_files == 0 && unreconciled == 0,
          std::to_string(fixtures.size()) + " fixture files, " + std::to_string(events) + " events; dump mismatches " +
              std::to_string(mismatched_files) + ", unreconciled events " + std::to_string(unreconciled)};
}

// ---- 8 -----------------------------------------------------------------------

Outcome aggregation() {
  std::mt19937_64 gen(808);
  std::normal_distribution<double> nx(0, 2);
  std::uniform_real_distribution<double> uw(0, 3);
  std::uniform_int_distribution<int> worker(0, 7);
  int count_mismatch = 0;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    hbook::Hist1D seq1(40, -4, 4);
    hbook::Hist2D seq2(12, -4, 4, 10, -3, 3);
    std::vector<hbook::Hist1D> sh1(8, seq1);
    std::vector<hbook::Hist2D> sh2(8, seq2);
    const int n = 1000 + static_cast<int>(gen() % 5000);
    for (int i = 0; i < n; ++i) {
      const double x = i % 211 == 0 ? std::nan("") : nx(gen), y = nx(gen), w = uw(gen);
      const int k = worker(gen);
      seq1.fill(x, w);
      sh1[k].fill(x, w);
      seq2.fill(x, y, w);
      sh2[k].fill(x, y, w);
    }
    hbook::Hist1D m1(40, -4, 4);
    hbook::Hist2D m2(12, -4, 4, 10, -3, 3);
    for (int k = 0; k < 8; ++k) {
      m1 += sh1[k];
      m2 += sh2[k];
    }
    if (m1.entries() != seq1.entries() || m1.nan_entries() != seq1.nan_entries()) ++count_mismatch;
    for (std::size_t s = 0; s < seq1.slots().size(); ++s) {
      const auto &a = m1.slots()[s], &b = seq1.slots()[s];
      if (a.entries != b.entries) ++count_mismatch;
      for (double r : {rel(a.sum_w, b.sum_w), rel(a.sum_w2, b.sum_w2), rel(a.sum_wx, b.sum_wx), rel(a.sum_wx2, b.sum_wx2)})
        worst = std::max(worst, r);
    }
    if (m2.entries() != seq2.entries() || m2.nan_entries() != seq2.nan_entries()) ++count_mismatch;
    for (std::size_t s = 0; s < seq2.cells().size(); ++s) {
      const auto &a = m2.cells()[s], &b = seq2.cells()[s];
      if (a.entries != b.entries) ++count_mismatch;
      worst = std::max({worst, rel(a.sum_w, b.sum_w), rel(a.sum_w2, b.sum_w2)});
    }
  }
  return {count_mismatch == 0 && worst <= merge_rel_tol,
          "100 trials of 8-way sharded Hist1D/Hist2D fills; count mismatches " + std::to_string(count_mismatch) +
              ", worst weighted-moment rel diff " + fmt("%.3g", worst) + " (limit 1e-12)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--criterion" || a == "-c") && i + 1 < argc) selected.insert(std::atoi(argv[++i]));
    else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  TempDir tmp;
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
      {1, {"determinism", [&] { return determinism(tmp.path); }}},
      {2, {"scheduler correctness", scheduler}},
      {3, {"jet clustering oracle", jets}},
      {4, {"physics invariants", physics}},
      {5, {"scaling proxy", [&] { return scaling(tmp.path); }}},
      {6, {"persistence", persistence}},
      {7, {"HepMC ingestion", hepmc_ingestion}},
      {8, {"histogram aggregation", aggregation}},
  };
  int failures = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("CRITERION %d FAIL unknown criterion\n", id);
      ++failures;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("CRITERION %d %s %s: %s\n", id, o.pass ? "PASS" : "FAIL", it->second.first, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
