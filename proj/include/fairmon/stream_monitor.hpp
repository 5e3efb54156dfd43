#pragma once

// Record-at-a-time driver over any of the three monitors, with snapshot and
// resume of the full register state.

#include <cstdint>
#include <string>
#include <variant>

#include <json.hpp>

#include "fairmon/io/run_config.hpp"
#include "fairmon/io/trace_format.hpp"
#include "fairmon/monitors.hpp"

namespace fairmon {

inline constexpr const char* kSnapshotFormat = "fairmon-snapshot";
inline constexpr int kSnapshotVersion = 1;

class StreamMonitor {
 public:
  /// Builds the monitor for cfg.kind from the config's monitor parameters.
  explicit StreamMonitor(const io::RunConfig& cfg);

  /// Feeds one record. Throws a data error on kind mismatch or when t does
  /// not strictly increase.
  io::EstimateRecord process(const io::TraceRecord& record);

  io::TraceKind kind() const { return kind_; }
  std::uint64_t last_t() const { return last_t_; }

  /// Monitor parameters as JSON (for estimate-file headers).
  nlohmann::json monitor_json() const;

  nlohmann::json snapshot() const;
  /// Rejects snapshots with a different format tag or version.
  static StreamMonitor restore(const nlohmann::json& snap);

 private:
  using Monitor = std::variant<CoinMonitor, LendingMonitor, AttentionMonitor>;

  StreamMonitor(io::TraceKind kind, Monitor monitor);

  io::TraceKind kind_;
  Monitor monitor_;
  std::uint64_t last_t_ = 0;
};

}  // namespace fairmon
