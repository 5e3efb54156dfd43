#include "fairmon/io/trace_format.hpp"

#include "fairmon/error.hpp"

namespace fairmon::io {

using nlohmann::json;

bool operator==(const TraceRecord& a, const TraceRecord& b) {
  if (a.t != b.t || a.obs.index() != b.obs.index() || a.truth != b.truth) return false;
  return std::visit(
      [&](const auto& lhs) {
        using T = std::decay_t<decltype(lhs)>;
        const T& rhs = std::get<T>(b.obs);
        if constexpr (std::is_same_v<T, CoinToss>) {
          return lhs.x == rhs.x;
        } else if constexpr (std::is_same_v<T, LendingObservation>) {
          return lhs.x == rhs.x && lhs.g == rhs.g && lhs.y == rhs.y && lhs.z == rhs.z;
        } else {
          return lhs.x_a == rhs.x_a && lhs.x_b == rhs.x_b && lhs.y_a == rhs.y_a &&
                 lhs.y_b == rhs.y_b && lhs.k == rhs.k;
        }
      },
      a.obs);
}

EstimateRecord to_estimate(std::uint64_t trace_t, const MonitorOutput& out) {
  EstimateRecord r;
  r.t = trace_t;
  r.conclusive = out.conclusive();
  if (out.phi) {
    r.phi_lo = out.phi->lo;
    r.phi_hi = out.phi->hi;
    r.confidence = out.phi->confidence;
  }
  if (out.point) r.point = *out.point;
  r.clamped = out.clamped;
  r.floor_violation = out.floor_violation;
  r.group_a = out.per_group[0];
  r.group_b = out.per_group[1];
  return r;
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw data_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::uint64_t get_count(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned()) throw data_error(std::string("field '") + key + "': expected a non-negative integer");
  return v.get<std::uint64_t>();
}

int get_int(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw data_error(std::string("field '") + key + "': expected an integer");
  return v.get<int>();
}

double get_real(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw data_error(std::string("field '") + key + "': expected a number");
  return v.get<double>();
}

std::optional<double> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_real(j, key);
}

void put_optional(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

json interval_json(const std::optional<ConfidenceInterval>& ci) {
  if (!ci) return nullptr;
  return json::array({ci->lo, ci->hi, ci->confidence});
}

std::optional<ConfidenceInterval> interval_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number()) {
    throw data_error(std::string("field '") + key + "': expected [lo, hi, confidence]");
  }
  return ConfidenceInterval{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

void check_header(const json& j, const char* format) {
  if (field(j, "format") != format) {
    throw data_error(std::string("not a ") + format + " file (bad metadata line)");
  }
  if (get_int(j, "version") != kFormatVersion) {
    throw data_error("unsupported " + std::string(format) + " version " + field(j, "version").dump());
  }
}

TraceKind kind_field(const json& j) {
  const json& v = field(j, "kind");
  if (!v.is_string()) throw data_error("field 'kind': expected a string");
  try {
    return parse_kind(v.get<std::string>());
  } catch (const Error& e) {
    throw data_error(e.what());
  }
}

}  // namespace

json to_json(const TraceRecord& r) {
  json j = {{"t", r.t}, {"kind", to_string(r.kind())}};
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, CoinToss>) {
          j["obs"] = {{"x", o.x}};
        } else if constexpr (std::is_same_v<T, LendingObservation>) {
          j["obs"] = {{"x", o.x}, {"g", o.g == Group::kA ? "A" : "B"}, {"y", o.y}, {"z", o.z}};
        } else {
          j["obs"] = {{"x_a", o.x_a}, {"x_b", o.x_b}, {"y_a", o.y_a}, {"y_b", o.y_b}, {"k", o.k}};
        }
      },
      r.obs);
  if (r.truth) {
    json t = json::object();
    put_optional(t, "psi_a", r.truth->psi_a);
    put_optional(t, "psi_b", r.truth->psi_b);
    put_optional(t, "omega_a", r.truth->omega_a);
    put_optional(t, "omega_b", r.truth->omega_b);
    put_optional(t, "phi", r.truth->phi);
    j["truth"] = std::move(t);
  }
  return j;
}

TraceRecord trace_record_from_json(const json& j) {
  TraceRecord r;
  r.t = get_count(j, "t");
  const json& o = field(j, "obs");
  switch (kind_field(j)) {
    case TraceKind::kCoin:
      r.obs = CoinToss{get_int(o, "x")};
      break;
    case TraceKind::kLending: {
      const json& g = field(o, "g");
      if (g != "A" && g != "B") throw data_error("field 'g': expected \"A\" or \"B\"");
      r.obs = LendingObservation{get_int(o, "x"), g == "A" ? Group::kA : Group::kB, get_int(o, "y"),
                                 get_int(o, "z")};
      break;
    }
    case TraceKind::kAttention:
      r.obs = AttentionObservation{get_count(o, "x_a"), get_count(o, "x_b"), get_count(o, "y_a"),
                                   get_count(o, "y_b"), get_count(o, "k")};
      break;
  }
  if (j.contains("truth") && !j.at("truth").is_null()) {
    const json& t = j.at("truth");
    r.truth = Truth{get_optional(t, "psi_a"), get_optional(t, "psi_b"), get_optional(t, "omega_a"),
                    get_optional(t, "omega_b"), get_optional(t, "phi")};
  }
  return r;
}

json to_json(const EstimateRecord& r) {
  json j = {{"t", r.t}, {"conclusive", r.conclusive}};
  if (r.conclusive) {
    j["phi_lo"] = r.phi_lo;
    j["phi_hi"] = r.phi_hi;
    j["confidence"] = r.confidence;
    j["point"] = r.point;
  } else {
    j["phi_lo"] = nullptr;
    j["phi_hi"] = nullptr;
    j["confidence"] = nullptr;
    j["point"] = nullptr;
  }
  j["clamped"] = r.clamped;
  j["floor_violation"] = r.floor_violation;
  j["group_a"] = interval_json(r.group_a);
  j["group_b"] = interval_json(r.group_b);
  return j;
}

EstimateRecord estimate_record_from_json(const json& j) {
  EstimateRecord r;
  r.t = get_count(j, "t");
  const json& c = field(j, "conclusive");
  if (!c.is_boolean()) throw data_error("field 'conclusive': expected a boolean");
  r.conclusive = c.get<bool>();
  if (r.conclusive) {
    r.phi_lo = get_real(j, "phi_lo");
    r.phi_hi = get_real(j, "phi_hi");
    r.confidence = get_real(j, "confidence");
    r.point = get_real(j, "point");
    if (r.phi_lo > r.phi_hi) throw data_error("estimate with phi_lo > phi_hi");
  }
  r.clamped = field(j, "clamped").get<bool>();
  r.floor_violation = field(j, "floor_violation").get<bool>();
  r.group_a = interval_from(j, "group_a");
  r.group_b = interval_from(j, "group_b");
  return r;
}

json to_json(const TraceHeader& h) {
  return {{"format", kTraceFormat},
          {"version", kFormatVersion},
          {"kind", to_string(h.kind)},
          {"config_hash", h.config_hash},
          {"config", h.config}};
}

TraceHeader trace_header_from_json(const json& j) {
  check_header(j, kTraceFormat);
  TraceHeader h;
  h.kind = kind_field(j);
  h.config_hash = field(j, "config_hash").get<std::string>();
  h.config = field(j, "config");
  return h;
}

json to_json(const EstimatesHeader& h) {
  return {{"format", kEstimatesFormat},
          {"version", kFormatVersion},
          {"kind", to_string(h.kind)},
          {"trace_config_hash", h.trace_config_hash},
          {"monitor", h.monitor}};
}

EstimatesHeader estimates_header_from_json(const json& j) {
  check_header(j, kEstimatesFormat);
  EstimatesHeader h;
  h.kind = kind_field(j);
  h.trace_config_hash = field(j, "trace_config_hash").get<std::string>();
  h.monitor = field(j, "monitor");
  return h;
}

JsonlReader::JsonlReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw usage_error("cannot open '" + path + "' for reading");
}

std::optional<json> JsonlReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw data_error(where() + "corrupt line (invalid JSON)");
    return j;
  }
  return std::nullopt;
}

std::string JsonlReader::where() const { return path_ + ":" + std::to_string(line_) + ": "; }

JsonlWriter::JsonlWriter(const std::string& path) : path_(path), out_(path, std::ios::trunc) {
  if (!out_) throw usage_error("cannot open '" + path + "' for writing");
}

void JsonlWriter::write(const json& j) {
  out_ << j.dump() << '\n';
  if (!out_) throw data_error("write to '" + path_ + "' failed");
}

void JsonlWriter::close() {
  out_.close();
  if (out_.fail()) throw data_error("closing '" + path_ + "' failed");
}

}  // namespace fairmon::io
