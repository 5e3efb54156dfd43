#pragma once

// JSON-lines trace and estimate files.
//
// Every file starts with one metadata line:
//   {"format":"fairmon-trace","version":1,"kind":...,"config_hash":...,"config":{...}}
//   {"format":"fairmon-estimates","version":1,"kind":...,"trace_config_hash":...,"monitor":{...}}
// followed by one record per line. Reals use shortest round-trip decimals.

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "fairmon/io/run_config.hpp"
#include "fairmon/monitors.hpp"

namespace fairmon::io {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kTraceFormat = "fairmon-trace";
inline constexpr const char* kEstimatesFormat = "fairmon-estimates";

/// Simulator ground truth for one step; fields absent for kinds that lack them.
struct Truth {
  std::optional<double> psi_a;
  std::optional<double> psi_b;
  std::optional<double> omega_a;
  std::optional<double> omega_b;
  std::optional<double> phi;

  friend bool operator==(const Truth&, const Truth&) = default;
};

using Observation = std::variant<CoinToss, LendingObservation, AttentionObservation>;

struct TraceRecord {
  std::uint64_t t = 0;
  Observation obs;
  std::optional<Truth> truth;

  TraceKind kind() const { return static_cast<TraceKind>(obs.index()); }
};

bool operator==(const TraceRecord& a, const TraceRecord& b);

struct EstimateRecord {
  std::uint64_t t = 0;
  bool conclusive = false;
  double phi_lo = 0.0;  ///< meaningful only when conclusive
  double phi_hi = 0.0;
  double confidence = 0.0;
  double point = 0.0;
  bool clamped = false;
  bool floor_violation = false;
  std::optional<ConfidenceInterval> group_a;
  std::optional<ConfidenceInterval> group_b;

  friend bool operator==(const EstimateRecord&, const EstimateRecord&) = default;
};

EstimateRecord to_estimate(std::uint64_t trace_t, const MonitorOutput& out);

nlohmann::json to_json(const TraceRecord& r);
TraceRecord trace_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EstimateRecord& r);
EstimateRecord estimate_record_from_json(const nlohmann::json& j);

struct TraceHeader {
  TraceKind kind = TraceKind::kLending;
  std::string config_hash;
  nlohmann::json config;
};

nlohmann::json to_json(const TraceHeader& h);
TraceHeader trace_header_from_json(const nlohmann::json& j);

struct EstimatesHeader {
  TraceKind kind = TraceKind::kLending;
  std::string trace_config_hash;
  nlohmann::json monitor;
};

nlohmann::json to_json(const EstimatesHeader& h);
EstimatesHeader estimates_header_from_json(const nlohmann::json& j);

/// Line-oriented JSON reader; parse failures name the file and line.
class JsonlReader {
 public:
  explicit JsonlReader(const std::string& path);

  /// Next non-empty line as JSON, or nullopt at end of file.
  std::optional<nlohmann::json> next();
  std::uint64_t line() const { return line_; }
  const std::string& path() const { return path_; }

  /// Prefixes a diagnostic with "path:line: ".
  std::string where() const;

 private:
  std::string path_;
  std::ifstream in_;
  std::uint64_t line_ = 0;
};

/// Line-oriented writer; every write is one compact JSON document plus '\n'.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::string& path);

  void write(const nlohmann::json& j);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace fairmon::io
