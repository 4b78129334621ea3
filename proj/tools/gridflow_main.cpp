// Command-line driver: floorplanning, co-optimization, candidate sweeps,
// throughput simulation, and burst-trace folding over JSON project files.
//
// Exit codes: 0 success, 1 infeasible, 2 invalid input, 3 budget exhausted.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridflow/gridflow.hpp"

namespace fs = std::filesystem;
using namespace gridflow;

namespace {

struct CliConfig {
  std::string project_path;
  std::string device_arg;
  std::string out_dir = "out";
  std::string trace_path;
  std::optional<double> max_util;
  std::optional<count_t> per_crossing;
  std::optional<double> time_limit;
  std::optional<int> jobs;
  std::optional<count_t> timeout_threshold;
  std::string sweep_spec;
  count_t max_cycles = 1000000;
  bool strict = false;
};

void add_common_flags(CLI::App* cmd, CliConfig& cfg, bool needs_project) {
  auto* p = cmd->add_option("--project", cfg.project_path,
                            "project JSON file");
  if (needs_project) p->required();
  cmd->add_option("--device", cfg.device_arg,
                  "device preset name (u250, u280) or JSON file; overrides "
                  "the project's device");
  cmd->add_option("--max-util", cfg.max_util,
                  "per-slot utilization cap in (0,1]");
  cmd->add_option("--per-crossing", cfg.per_crossing,
                  "pipeline stages per slot boundary crossing");
  cmd->add_option("--time-limit", cfg.time_limit,
                  "ILP time budget per partition iteration, seconds");
  cmd->add_option("--jobs", cfg.jobs, "worker threads for sweeps");
  cmd->add_option("--out", cfg.out_dir, "output directory for artifacts");
  cmd->add_flag("--strict", cfg.strict,
                "reject inputs with unknown fields instead of warning");
}

std::vector<double> parse_sweep_spec(const std::string& spec) {
  // LO:HI:STEP, inclusive endpoints up to rounding
  std::vector<double> vals;
  std::istringstream is(spec);
  std::string lo_s, hi_s, step_s;
  if (!std::getline(is, lo_s, ':') || !std::getline(is, hi_s, ':') ||
      !std::getline(is, step_s))
    fail(ErrorKind::InvalidInput, "--sweep expects LO:HI:STEP");
  double lo = std::stod(lo_s), hi = std::stod(hi_s), step = std::stod(step_s);
  if (step <= 0 || hi < lo)
    fail(ErrorKind::InvalidInput, "--sweep range is empty");
  for (double v = lo; v <= hi + 1e-9; v += step) vals.push_back(v);
  return vals;
}

Project load(const CliConfig& cfg) {
  std::vector<std::string> warnings;
  Project p = load_project(cfg.project_path, cfg.strict, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (!cfg.device_arg.empty()) {
    if (auto preset = device_preset(cfg.device_arg)) {
      p.device = *preset;
    } else {
      std::ifstream in(cfg.device_arg, std::ios::binary);
      if (!in)
        fail(ErrorKind::InvalidInput,
             "--device is neither a preset nor a readable file: " +
                 cfg.device_arg);
      std::ostringstream ss;
      ss << in.rdbuf();
      json j;
      try {
        j = json::parse(ss.str());
      } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidInput,
             std::string("device file parse error: ") + e.what());
      }
      std::vector<std::string> unknown;
      p.device = detail::parse_device(j, unknown);
      if (cfg.strict && !unknown.empty())
        fail(ErrorKind::InvalidInput,
             "strict mode: unknown fields in device file");
      for (const auto& u : unknown) std::cerr << "warning: " << u << "\n";
      require_valid(p.device);
    }
  }
  if (cfg.max_util) p.options.max_util = *cfg.max_util;
  if (cfg.per_crossing) p.options.per_crossing = *cfg.per_crossing;
  if (cfg.time_limit) p.options.time_limit_seconds = *cfg.time_limit;
  if (cfg.jobs) p.options.jobs = *cfg.jobs;
  if (cfg.timeout_threshold) p.options.timeout_threshold = *cfg.timeout_threshold;
  return p;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path.string());
  out << content;
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

PartitionOptions partition_opts(const Options& o) {
  PartitionOptions po;
  po.max_util = o.max_util;
  po.same_slot_groups = o.same_slot_groups;
  if (o.time_limit_seconds) po.time_limit_seconds = o.time_limit_seconds;
  return po;
}

int run_check(const CliConfig& cfg) {
  load(cfg);
  std::cerr << "project ok\n";
  return 0;
}

int run_floorplan(const CliConfig& cfg) {
  Project p = load(cfg);
  Floorplan fp = floorplan(p.graph, p.device, partition_opts(p.options));
  SolutionDocument doc;
  doc.graph = &p.graph;
  doc.device = &p.device;
  doc.floorplan = &fp;
  write_file(fs::path(cfg.out_dir) / "floorplan.json",
             dump_json(emit_floorplan_json(doc)));
  write_file(fs::path(cfg.out_dir) / "constraints.tcl",
             emit_constraints_tcl(doc));
  std::cerr << "cost " << fp.cost << "\n";
  return 0;
}

int run_optimize(const CliConfig& cfg) {
  Project p = load(cfg);
  CoOptimizeResult res = co_optimize(p.graph, p.device, p.options);
  SolutionDocument doc;
  doc.graph = &res.graph;
  doc.device = &p.device;
  doc.floorplan = &res.floorplan;
  doc.overhead_bits = res.overhead_bits;
  doc.rounds = res.rounds;
  doc.hbm_binding = &res.hbm_binding;
  write_file(fs::path(cfg.out_dir) / "floorplan.json",
             dump_json(emit_floorplan_json(doc)));
  write_file(fs::path(cfg.out_dir) / "constraints.tcl",
             emit_constraints_tcl(doc));
  std::cerr << "cost " << res.floorplan.cost << ", overhead "
            << res.overhead_bits << " bits, " << res.rounds << " round(s)\n";
  return 0;
}

int run_sweep(const CliConfig& cfg) {
  Project p = load(cfg);
  std::vector<double> range = p.options.sweep_range;
  if (!cfg.sweep_spec.empty()) range = parse_sweep_spec(cfg.sweep_spec);
  if (range.empty())
    fail(ErrorKind::InvalidInput,
         "no sweep range: pass --sweep LO:HI:STEP or set options.sweep");
  SweepResult sweep = sweep_candidates(p.graph, p.device, range,
                                       partition_opts(p.options),
                                       p.options.jobs);
  write_file(fs::path(cfg.out_dir) / "candidates.json",
             dump_json(emit_candidates_json(p.graph, p.device, sweep)));
  for (size_t i = 0; i < sweep.candidates.size(); ++i) {
    SolutionDocument doc;
    doc.graph = &p.graph;
    doc.device = &p.device;
    doc.floorplan = &sweep.candidates[i].floorplan;
    write_file(fs::path(cfg.out_dir) /
                   ("constraints_" + std::to_string(i) + ".tcl"),
               emit_constraints_tcl(doc));
  }
  std::cerr << sweep.candidates.size() << " candidate(s), "
            << sweep.failures.size() << " infeasible point(s)\n";
  return 0;
}

int run_simulate(const CliConfig& cfg) {
  Project p = load(cfg);
  for (const auto& t : p.graph.tasks)
    if (!t.actor)
      fail(ErrorKind::InvalidInput,
           "simulate needs an actor spec on every task ('" + t.name +
               "' has none)");
  CoOptimizeResult res = co_optimize(p.graph, p.device, p.options);
  TaskGraph before = p.graph;
  for (auto& c : before.channels) {
    c.lat = 0;
    c.balance = 0;
  }
  ThroughputComparison cmp =
      compare_throughput(before, res.graph, cfg.max_cycles);
  ordered_json j;
  j["cycles_before"] = cmp.before.total_cycles;
  j["cycles_after"] = cmp.after.total_cycles;
  j["ratio"] = cmp.ratio;
  j["deadlock_before"] = cmp.before.deadlock;
  j["deadlock_after"] = cmp.after.deadlock;
  j["exhausted_before"] = cmp.before.exhausted;
  j["exhausted_after"] = cmp.after.exhausted;
  ordered_json sinks = ordered_json::object();
  for (const auto& [name, count] : cmp.after.sink_tokens) sinks[name] = count;
  j["sink_tokens_after"] = std::move(sinks);
  write_file(fs::path(cfg.out_dir) / "sim_report.json", dump_json(j));
  std::cerr << "cycles " << cmp.before.total_cycles << " -> "
            << cmp.after.total_cycles << " (ratio " << cmp.ratio << ")\n";
  return 0;
}

int run_burst_sim(const CliConfig& cfg) {
  std::ifstream in(cfg.trace_path, std::ios::binary);
  if (!in)
    fail(ErrorKind::InvalidInput, "cannot open trace '" + cfg.trace_path + "'");
  std::vector<std::pair<count_t, count_t>> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!isdigit(static_cast<unsigned char>(line[0]))) continue;  // header
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      fail(ErrorKind::InvalidInput, "trace line is not 'cycle,addr': " + line);
    trace.emplace_back(std::stoll(line.substr(0, comma)),
                       std::stoll(line.substr(comma + 1)));
  }
  count_t timeout = cfg.timeout_threshold.value_or(16);
  auto bursts = burst_run(trace, timeout);
  std::ostringstream os;
  os << "emit_cycle,addr,len\n";
  for (const auto& b : bursts)
    os << b.cycle << "," << b.addr << "," << b.len << "\n";
  write_file(fs::path(cfg.out_dir) / "bursts.csv", os.str());
  std::cerr << bursts.size() << " burst(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floorplan-driven pipelining toolkit for task-parallel "
               "dataflow designs"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto* c_check = app.add_subcommand("check", "validate a project file");
  add_common_flags(c_check, cfg, true);
  auto* c_floorplan =
      app.add_subcommand("floorplan", "floorplan only, no pipelining");
  add_common_flags(c_floorplan, cfg, true);
  auto* c_optimize = app.add_subcommand(
      "optimize", "full co-optimization: floorplan, pipeline, balance");
  add_common_flags(c_optimize, cfg, true);
  auto* c_sweep = app.add_subcommand(
      "sweep", "multi-candidate floorplan sweep over max_util");
  add_common_flags(c_sweep, cfg, true);
  c_sweep->add_option("--sweep", cfg.sweep_spec, "LO:HI:STEP utilization range");
  auto* c_sim = app.add_subcommand(
      "simulate", "cycle-accurate before/after throughput comparison");
  add_common_flags(c_sim, cfg, true);
  c_sim->add_option("--max-cycles", cfg.max_cycles, "simulation cycle budget");
  auto* c_burst =
      app.add_subcommand("burst-sim", "fold a burst detector over a trace");
  c_burst->add_option("--trace", cfg.trace_path, "CSV trace: cycle,addr")
      ->required();
  c_burst->add_option("--timeout-threshold", cfg.timeout_threshold,
                      "idle cycles before a burst is flushed");
  c_burst->add_option("--out", cfg.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_check->parsed()) return run_check(cfg);
    if (c_floorplan->parsed()) return run_floorplan(cfg);
    if (c_optimize->parsed()) return run_optimize(cfg);
    if (c_sweep->parsed()) return run_sweep(cfg);
    if (c_sim->parsed()) return run_simulate(cfg);
    if (c_burst->parsed()) return run_burst_sim(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Infeasible: return 1;
      case ErrorKind::InvalidInput: return 2;
      case ErrorKind::Budget: return 3;
      case ErrorKind::Internal: return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
