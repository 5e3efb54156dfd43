// fairmon: simulate traces, monitor them, evaluate coverage, benchmark.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 assumption violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairmon/commands.hpp"
#include "fairmon/error.hpp"
#include "fairmon/io/run_config.hpp"

namespace {

using nlohmann::json;
using namespace fairmon;

struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  std::optional<double> delta;

  void attach(CLI::App* app, bool seed_required) {
    app->add_option("-c,--config", config_path, "JSON run configuration");
    app->add_option("--set", overrides, "Override a config field: key.path=value (repeatable)");
    app->add_option("--kind", kind, "coin | lending | attention");
    auto* s = app->add_option("--seed", seed, "Simulation seed");
    if (seed_required) s->required();
    app->add_option("--horizon", horizon, "Number of steps to simulate");
    app->add_option("--delta", delta, "Miss probability of the emitted intervals");
  }

  bool given() const { return !config_path.empty() || !overrides.empty() || kind || seed || horizon || delta; }

  io::RunConfig resolve() const {
    json doc = config_path.empty() ? json::object() : io::load_json_file(config_path);
    if (kind) doc["kind"] = *kind;
    if (seed) doc["seed"] = *seed;
    if (horizon) doc["horizon"] = *horizon;
    if (delta) doc["delta"] = *delta;
    for (const auto& o : overrides) io::apply_override(doc, o);
    return io::parse_run_config(doc);
  }
};

void write_report(const json& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw usage_error("cannot open '" + path + "' for writing");
  out << report.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming fairness monitors with PAC-style confidence intervals"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a trace with ground truth");
  ConfigFlags sim_flags;
  sim_flags.attach(simulate, true);
  std::string sim_out;
  bool no_truth = false;
  simulate->add_option("-o,--out", sim_out, "Trace file (JSON lines)")->required();
  simulate->add_flag("--no-truth", no_truth, "Omit ground-truth fields");

  // monitor
  auto* monitor = app.add_subcommand("monitor", "Stream a trace through its monitor");
  ConfigFlags mon_flags;
  mon_flags.attach(monitor, false);
  std::string mon_trace, mon_out, mon_resume, mon_snapshot;
  std::optional<std::uint64_t> stop_after;
  monitor->add_option("-t,--trace", mon_trace, "Input trace")->required();
  monitor->add_option("-o,--out", mon_out, "Estimates file (JSON lines)")->required();
  monitor->add_option("--resume", mon_resume, "Start from a monitor snapshot");
  monitor->add_option("--snapshot-out", mon_snapshot, "Write the final monitor state here");
  monitor->add_option("--stop-after", stop_after, "Stop after this trace step");

  // eval
  auto* eval = app.add_subcommand("eval", "Coverage and width report against ground truth");
  std::string eval_est, eval_trace, eval_csv, eval_out;
  eval->add_option("-e,--estimates", eval_est, "Estimates file")->required();
  eval->add_option("-t,--trace", eval_trace, "Trace file with truth")->required();
  eval->add_option("--per-step", eval_csv, "Per-step containment CSV");
  eval->add_option("-o,--out", eval_out, "Report JSON (default: stdout)");

  // run
  auto* run = app.add_subcommand("run", "simulate, monitor and eval in one go");
  ConfigFlags run_flags;
  run_flags.attach(run, true);
  std::string run_dir;
  run->add_option("-d,--out-dir", run_dir, "Output directory")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Per-update latency on a synthetic trace");
  std::string bench_kind = "lending";
  std::uint64_t bench_updates = 1000000;
  std::uint64_t bench_seed = 1;
  std::string bench_out;
  bench->add_option("--kind", bench_kind, "coin | lending | attention");
  bench->add_option("-n,--updates", bench_updates, "Synthetic trace length");
  bench->add_option("--seed", bench_seed, "Synthetic trace seed");
  bench->add_option("-o,--out", bench_out, "Report JSON (default: stdout)");

  // export-csv
  auto* export_cmd = app.add_subcommand("export-csv", "Convert an estimates file to CSV");
  std::string exp_in, exp_out;
  export_cmd->add_option("-e,--estimates", exp_in, "Estimates file")->required();
  export_cmd->add_option("-o,--out", exp_out, "CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) {
      const io::RunConfig cfg = sim_flags.resolve();
      const auto n = cmd_simulate(cfg, sim_out, {!no_truth});
      std::cerr << "wrote " << n << " records to " << sim_out << '\n';
    } else if (monitor->parsed()) {
      MonitorOptions opts;
      if (!mon_flags.config_path.empty() || !mon_flags.overrides.empty() || mon_flags.kind) {
        opts.config = mon_flags.resolve();
      }
      opts.delta = mon_flags.delta;
      if (!mon_resume.empty()) opts.resume_path = mon_resume;
      if (!mon_snapshot.empty()) opts.snapshot_out = mon_snapshot;
      opts.stop_after = stop_after;
      const MonitorSummary s = cmd_monitor(mon_trace, mon_out, opts);
      std::cout << s.to_json().dump(2) << '\n';
    } else if (eval->parsed()) {
      const EvalReport r = cmd_eval(eval_est, eval_trace,
                                    eval_csv.empty() ? std::nullopt : std::optional<std::string>(eval_csv));
      write_report(r.to_json(), eval_out);
    } else if (run->parsed()) {
      const io::RunConfig cfg = run_flags.resolve();
      std::filesystem::create_directories(run_dir);
      const std::string trace = run_dir + "/trace.jsonl";
      const std::string estimates = run_dir + "/estimates.jsonl";
      cmd_simulate(cfg, trace);
      const MonitorSummary s = cmd_monitor(trace, estimates);
      const EvalReport r = cmd_eval(estimates, trace, run_dir + "/per_step.csv");
      export_csv(estimates, run_dir + "/estimates.csv");
      json report = {{"monitor", s.to_json()}, {"eval", r.to_json()}};
      write_report(report, run_dir + "/report.json");
      std::cout << report.dump(2) << '\n';
    } else if (bench->parsed()) {
      const BenchReport r = cmd_bench(io::parse_kind(bench_kind), bench_updates, bench_seed);
      write_report(r.to_json(), bench_out);
    } else if (export_cmd->parsed()) {
      const auto n = export_csv(exp_in, exp_out);
      std::cerr << "wrote " << n << " rows to " << exp_out << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "fairmon: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "fairmon: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
