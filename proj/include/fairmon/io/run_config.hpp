#pragma once

// Run configuration: one JSON document describing the simulated process and
// the monitor parameters. Parsing resolves presets so the canonical form
// written into trace headers is self-contained.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmon/monitors.hpp"
#include "fairmon/sim/attention.hpp"
#include "fairmon/sim/coin.hpp"
#include "fairmon/sim/lending.hpp"

namespace fairmon::io {

enum class TraceKind { kCoin, kLending, kAttention };

TraceKind parse_kind(const std::string& name);
std::string to_string(TraceKind kind);

struct RunConfig {
  TraceKind kind = TraceKind::kLending;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  double delta = 0.05;

  sim::CoinConfig coin;
  SubExpParams coin_params{1.0, 0.0};

  sim::LendingEnvConfig lending;

  sim::AttentionEnvConfig attention;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double lambda_floor = 1e-9;

  CoinMonitorConfig coin_monitor() const;
  LendingConfig lending_monitor() const;
  AttentionConfig attention_monitor() const;
};

/// Validates and resolves a config document. Diagnostics name the offending
/// field, e.g. "config.lending.c_max: expected a positive integer".
RunConfig parse_run_config(const nlohmann::json& doc);

/// Canonical, fully resolved form; parse_run_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& cfg);

/// Applies a "dotted.path=value" override; the value is read as JSON when it
/// parses, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

nlohmann::json load_json_file(const std::string& path);

}  // namespace fairmon::io
