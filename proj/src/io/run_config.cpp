#include "fairmon/io/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairmon/error.hpp"

namespace fairmon::io {

using nlohmann::json;

TraceKind parse_kind(const std::string& name) {
  if (name == "coin") return TraceKind::kCoin;
  if (name == "lending") return TraceKind::kLending;
  if (name == "attention") return TraceKind::kAttention;
  throw usage_error("unknown kind '" + name + "' (expected coin | lending | attention)");
}

std::string to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::kCoin: return "coin";
    case TraceKind::kLending: return "lending";
    case TraceKind::kAttention: return "attention";
  }
  return "coin";
}

CoinMonitorConfig RunConfig::coin_monitor() const { return {coin.epsilon, delta, coin_params}; }

LendingConfig RunConfig::lending_monitor() const {
  std::uint64_t n_a = 0;
  std::uint64_t n_b = 0;
  for (auto c : lending.hist_a) n_a += c;
  for (auto c : lending.hist_b) n_b += c;
  return {n_a, n_b, lending.c_max, delta};
}

AttentionConfig RunConfig::attention_monitor() const {
  return {attention.gamma, lambda_min, lambda_max, delta, lambda_floor};
}

namespace {

// Field accessors with path-qualified diagnostics.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_null() && !obj_.is_object()) throw usage_error(path_ + ": expected an object");
  }

  bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }
  std::string where(const char* key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw usage_error(where(key) + ": expected a number");
    return v.get<double>();
  }

  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw usage_error(where(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::uint64_t positive(const char* key, std::uint64_t fallback) const {
    const std::uint64_t v = count(key, fallback);
    if (v == 0) throw usage_error(where(key) + ": expected a positive integer");
    return v;
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw usage_error(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw usage_error(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  template <typename T>
  std::vector<T> array(const char* key) const {
    const json& v = obj_.at(key);
    if (!v.is_array()) throw usage_error(where(key) + ": expected an array");
    try {
      return v.get<std::vector<T>>();
    } catch (const json::exception&) {
      throw usage_error(where(key) + ": array has elements of the wrong type");
    }
  }

  Section child(const char* key) const {
    static const json kNull;
    return Section(has(key) ? obj_.at(key) : kNull, where(key));
  }

 private:
  const json& obj_;
  std::string path_;
};

// Re-raises a validation failure with the section path prefixed.
template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void parse_lending(const Section& s, RunConfig& cfg) {
  auto& env = cfg.lending;
  const std::uint64_t c_max = s.positive("c_max", 100);
  if (c_max > 100000) throw usage_error(s.where("c_max") + ": unreasonably large");
  env.c_max = static_cast<int>(c_max);

  if (s.has("hist_a") || s.has("hist_b")) {
    if (!s.has("hist_a") || !s.has("hist_b")) {
      throw usage_error(s.where("hist_a") + ": hist_a and hist_b must be given together");
    }
    env.hist_a = s.array<std::uint64_t>("hist_a");
    env.hist_b = s.array<std::uint64_t>("hist_b");
  } else {
    const std::string preset = s.text("preset", "fig2-mid-bias");
    const std::uint64_t n_a = s.positive("n_a", 100);
    const std::uint64_t n_b = s.positive("n_b", 100);
    checked(s.where("preset"), [&] {
      env.hist_a = sim::preset_histogram(preset, Group::kA, n_a, env.c_max);
      env.hist_b = sim::preset_histogram(preset, Group::kB, n_b, env.c_max);
    });
  }
  checked(s.where("policy"), [&] { env.policy = sim::parse_lending_policy(s.text("policy", "max_reward")); });
  env.theta = s.number("theta", 0.5);
  env.repayment.rho_min = s.number("rho_min", 0.1);
  env.repayment.rho_max = s.number("rho_max", 0.95);
  const std::string source = s.text("eq_opp_source", "true");
  if (source == "true") {
    env.eq_opp_source = sim::DistributionSource::kTrue;
  } else if (source == "estimated") {
    env.eq_opp_source = sim::DistributionSource::kEstimated;
  } else {
    throw usage_error(s.where("eq_opp_source") + ": expected \"true\" or \"estimated\"");
  }
  env.seed = cfg.seed;
  checked(s.path(), [&] { sim::validate(env); });

  const LendingConfig mon = cfg.lending_monitor();
  if (s.has("n_a") && s.has("hist_a") && s.count("n_a", 0) != mon.n_a) {
    throw usage_error(s.where("n_a") + ": does not match the sum of hist_a");
  }
  if (s.has("n_b") && s.has("hist_b") && s.count("n_b", 0) != mon.n_b) {
    throw usage_error(s.where("n_b") + ": does not match the sum of hist_b");
  }
}

void parse_attention(const Section& s, RunConfig& cfg) {
  sim::AttentionPreset preset;
  checked(s.where("preset"), [&] { preset = sim::attention_preset(s.text("preset", "fig3-middle")); });
  auto& env = cfg.attention;
  env = preset.env;
  env.capacity = s.positive("capacity", env.capacity);
  env.gamma = s.number("gamma", env.gamma);
  if (s.has("initial_rates")) env.initial_rates = s.array<double>("initial_rates");
  checked(s.where("allocator"), [&] { env.allocator = sim::parse_allocator(s.text("allocator", "uniform")); });
  env.alpha = s.number("alpha", env.alpha);
  env.omniscient = s.flag("omniscient", false);
  if (s.has("pair")) {
    const auto pair = s.array<std::size_t>("pair");
    if (pair.size() != 2) throw usage_error(s.where("pair") + ": expected two location indices");
    env.pair = {pair[0], pair[1]};
  }
  env.seed = cfg.seed;
  cfg.lambda_min = s.number("lambda_min", preset.lambda_min);
  cfg.lambda_max = s.number("lambda_max", preset.lambda_max);
  cfg.lambda_floor = s.number("lambda_floor", 1e-9);

  checked(s.path(), [&] { sim::validate(env); });
  checked(s.path(), [&] { validate(cfg.attention_monitor()); });
  for (double r : env.initial_rates) {
    if (r < cfg.lambda_min || r > cfg.lambda_max) {
      throw usage_error(s.where("initial_rates") + ": every rate must lie in [lambda_min, lambda_max]");
    }
  }
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw usage_error("config: expected a JSON object");
  const Section root(doc, "config");
  RunConfig cfg;
  checked("config.kind", [&] { cfg.kind = parse_kind(root.text("kind", "lending")); });
  cfg.seed = root.count("seed", 0);
  cfg.horizon = root.count("horizon", 0);
  cfg.delta = root.number("delta", 0.05);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw usage_error("config.delta: must lie in (0,1)");

  switch (cfg.kind) {
    case TraceKind::kCoin: {
      const Section s = root.child("coin");
      cfg.coin.p1 = s.number("p1", 0.5);
      cfg.coin.epsilon = s.number("epsilon", 0.0);
      cfg.coin.horizon = cfg.horizon;
      cfg.coin.seed = cfg.seed;
      cfg.coin_params = {s.number("sigma_sq", 1.0), s.number("nu", 0.0)};
      checked("config.coin", [&] {
        sim::validate(cfg.coin);
        validate(cfg.coin_monitor());
      });
      break;
    }
    case TraceKind::kLending:
      parse_lending(root.child("lending"), cfg);
      break;
    case TraceKind::kAttention:
      parse_attention(root.child("attention"), cfg);
      break;
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json doc = {{"kind", to_string(cfg.kind)},
              {"seed", cfg.seed},
              {"horizon", cfg.horizon},
              {"delta", cfg.delta}};
  switch (cfg.kind) {
    case TraceKind::kCoin:
      doc["coin"] = {{"p1", cfg.coin.p1},
                     {"epsilon", cfg.coin.epsilon},
                     {"sigma_sq", cfg.coin_params.sigma_sq},
                     {"nu", cfg.coin_params.nu}};
      break;
    case TraceKind::kLending: {
      const auto& env = cfg.lending;
      doc["lending"] = {{"c_max", env.c_max},
                        {"hist_a", env.hist_a},
                        {"hist_b", env.hist_b},
                        {"policy", sim::to_string(env.policy)},
                        {"theta", env.theta},
                        {"rho_min", env.repayment.rho_min},
                        {"rho_max", env.repayment.rho_max},
                        {"eq_opp_source",
                         env.eq_opp_source == sim::DistributionSource::kTrue ? "true" : "estimated"}};
      break;
    }
    case TraceKind::kAttention: {
      const auto& env = cfg.attention;
      doc["attention"] = {{"capacity", env.capacity},
                          {"gamma", env.gamma},
                          {"initial_rates", env.initial_rates},
                          {"allocator", sim::to_string(env.allocator)},
                          {"alpha", env.alpha},
                          {"omniscient", env.omniscient},
                          {"pair", {env.pair[0], env.pair[1]}},
                          {"lambda_min", cfg.lambda_min},
                          {"lambda_max", cfg.lambda_max},
                          {"lambda_floor", cfg.lambda_floor}};
      break;
    }
  }
  return doc;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw usage_error("override '" + assignment + "': expected key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw usage_error("override '" + assignment + "': empty path segment");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string config_hash(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc = json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw usage_error("config file '" + path + "' is not valid JSON");
  return doc;
}

}  // namespace fairmon::io
