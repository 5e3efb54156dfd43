#pragma once

// The simulate → monitor → eval pipeline and the latency benchmark, as
// library calls. The CLI in tools/ is a thin wrapper over these.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmon/io/run_config.hpp"
#include "fairmon/io/trace_format.hpp"

namespace fairmon {

/// Runs the simulator for `cfg` and hands each record, with ground truth,
/// to `sink` in order.
void simulate_records(const io::RunConfig& cfg,
                      const std::function<void(const io::TraceRecord&)>& sink);

struct SimulateOptions {
  bool with_truth = true;
};

/// Writes the trace for `cfg` to `out_path`. Returns the number of records.
std::uint64_t cmd_simulate(const io::RunConfig& cfg, const std::string& out_path,
                           const SimulateOptions& opts = {});

/// Log-bucketed latency histogram with O(1) memory.
class LatencyHistogram {
 public:
  void add(double nanoseconds);
  /// Upper edge of the bucket holding quantile q (accurate to ~4.5%).
  double quantile(double q) const;
  std::uint64_t count() const { return count_; }
  double mean() const { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }

 private:
  static constexpr int kBucketsPerOctave = 16;
  static constexpr int kBuckets = 64 * kBucketsPerOctave;
  std::vector<std::uint64_t> buckets_ = std::vector<std::uint64_t>(kBuckets, 0);
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
};

struct MonitorOptions {
  std::optional<io::RunConfig> config;  ///< overrides the trace header's config
  std::optional<double> delta;
  std::optional<std::string> resume_path;
  std::optional<std::string> snapshot_out;
  std::optional<std::uint64_t> stop_after;  ///< stop after this trace t
};

struct MonitorSummary {
  std::uint64_t records = 0;
  std::uint64_t conclusive = 0;
  std::uint64_t clamped = 0;
  bool floor_violation = false;
  double median_ns = 0.0;
  double p99_ns = 0.0;
  double mean_ns = 0.0;

  nlohmann::json to_json() const;
};

/// Streams a trace through its monitor, one estimate per record.
MonitorSummary cmd_monitor(const std::string& trace_path, const std::string& out_path,
                           const MonitorOptions& opts = {});

struct EvalReport {
  std::uint64_t steps = 0;
  std::uint64_t conclusive = 0;
  std::uint64_t with_truth = 0;
  std::uint64_t contained = 0;
  double containment = 0.0;  ///< contained / (conclusive steps with truth)
  double mean_width = 0.0;
  double median_width = 0.0;
  std::vector<std::pair<std::uint64_t, double>> width_by_t;  ///< decay table

  nlohmann::json to_json() const;
};

/// Compares estimates with the trace's ground truth. `per_step_csv`, when
/// given, receives "t,conclusive,contained,width" rows.
EvalReport cmd_eval(const std::string& estimates_path, const std::string& trace_path,
                    const std::optional<std::string>& per_step_csv = std::nullopt);

struct BenchReport {
  std::string kind;
  std::uint64_t updates = 0;
  double median_ns = 0.0;
  double p99_ns = 0.0;
  double mean_ns = 0.0;

  nlohmann::json to_json() const;
};

/// Times monitor updates over an in-memory synthetic trace of `updates` records.
BenchReport cmd_bench(io::TraceKind kind, std::uint64_t updates, std::uint64_t seed = 1);

/// Writes an estimates file as CSV for plotting.
std::uint64_t export_csv(const std::string& estimates_path, const std::string& csv_path);

}  // namespace fairmon
