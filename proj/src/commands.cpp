#include "fairmon/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

#include "fairmon/error.hpp"
#include "fairmon/io/trace_format.hpp"
#include "fairmon/stream_monitor.hpp"

namespace fairmon {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void simulate_records(const io::RunConfig& cfg,
                      const std::function<void(const io::TraceRecord&)>& sink) {
  switch (cfg.kind) {
    case io::TraceKind::kCoin: {
      sim::CoinProcess coin(cfg.coin);
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        const auto s = coin.step();
        io::Truth truth;
        truth.psi_a = s.p;
        truth.phi = s.p;
        sink({t, CoinToss{s.x}, truth});
      }
      break;
    }
    case io::TraceKind::kLending: {
      sim::LendingEnv env(cfg.lending);
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        const auto s = env.step();
        io::Truth truth;
        truth.psi_a = s.psi_a;
        truth.psi_b = s.psi_b;
        truth.phi = s.phi;
        sink({t, s.obs, truth});
      }
      break;
    }
    case io::TraceKind::kAttention: {
      sim::AttentionEnv env(cfg.attention);
      for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
        const auto s = env.step();
        io::Truth truth;
        truth.psi_a = s.lambda_a;
        truth.psi_b = s.lambda_b;
        truth.omega_a = s.omega_a;
        truth.omega_b = s.omega_b;
        truth.phi = s.phi;
        sink({t, s.obs, truth});
      }
      break;
    }
  }
}

std::uint64_t cmd_simulate(const io::RunConfig& cfg, const std::string& out_path,
                           const SimulateOptions& opts) {
  const json canonical = io::to_json(cfg);
  io::JsonlWriter out(out_path);
  out.write(io::to_json(io::TraceHeader{cfg.kind, io::config_hash(canonical), canonical}));
  std::uint64_t n = 0;
  simulate_records(cfg, [&](const io::TraceRecord& r) {
    if (opts.with_truth) {
      out.write(io::to_json(r));
    } else {
      io::TraceRecord bare = r;
      bare.truth.reset();
      out.write(io::to_json(bare));
    }
    ++n;
  });
  out.close();
  return n;
}

// ---------------------------------------------------------------- latency

void LatencyHistogram::add(double ns) {
  const double v = std::max(ns, 1.0);
  const int bucket = std::clamp(static_cast<int>(std::log2(v) * kBucketsPerOctave), 0, kBuckets - 1);
  ++buckets_[static_cast<std::size_t>(bucket)];
  ++count_;
  sum_ += ns;
}

double LatencyHistogram::quantile(double q) const {
  if (count_ == 0) return 0.0;
  const auto rank = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(count_)));
  std::uint64_t seen = 0;
  for (int b = 0; b < kBuckets; ++b) {
    seen += buckets_[static_cast<std::size_t>(b)];
    if (seen >= std::max<std::uint64_t>(rank, 1)) {
      return std::exp2(static_cast<double>(b + 1) / kBucketsPerOctave);
    }
  }
  return std::exp2(static_cast<double>(kBuckets) / kBucketsPerOctave);
}

json MonitorSummary::to_json() const {
  return {{"records", records},   {"conclusive", conclusive}, {"clamped", clamped},
          {"floor_violation", floor_violation}, {"median_ns", median_ns}, {"p99_ns", p99_ns},
          {"mean_ns", mean_ns}};
}

namespace {

// Parses one record line; any schema failure becomes a data error that
// names the file and line.
template <typename F>
auto at_line(const io::JsonlReader& reader, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw data_error(reader.where() + "corrupt line: " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kUsage) throw;
    throw Error(e.kind(), reader.where() + e.what());
  }
}

io::TraceHeader read_trace_header(io::JsonlReader& reader) {
  auto first = reader.next();
  if (!first) throw data_error(reader.path() + ": empty file (missing metadata line)");
  return at_line(reader, [&] { return io::trace_header_from_json(*first); });
}

}  // namespace

MonitorSummary cmd_monitor(const std::string& trace_path, const std::string& out_path,
                           const MonitorOptions& opts) {
  io::JsonlReader reader(trace_path);
  const io::TraceHeader header = read_trace_header(reader);

  io::RunConfig cfg;
  if (opts.config) {
    cfg = *opts.config;
    if (cfg.kind != header.kind) {
      throw data_error("kind mismatch: trace is " + io::to_string(header.kind) + ", monitor config is " +
                       io::to_string(cfg.kind));
    }
  } else {
    cfg = at_line(reader, [&] { return io::parse_run_config(header.config); });
  }
  if (opts.delta) {
    if (!(*opts.delta > 0.0 && *opts.delta < 1.0)) throw usage_error("--delta must lie in (0,1)");
    cfg.delta = *opts.delta;
  }

  StreamMonitor monitor = opts.resume_path ? StreamMonitor::restore(io::load_json_file(*opts.resume_path))
                                           : StreamMonitor(cfg);
  if (monitor.kind() != header.kind) {
    throw data_error("kind mismatch: snapshot is " + io::to_string(monitor.kind()) + ", trace is " +
                     io::to_string(header.kind));
  }
  const std::uint64_t resume_t = monitor.last_t();

  io::JsonlWriter out(out_path);
  out.write(io::to_json(io::EstimatesHeader{header.kind, header.config_hash, monitor.monitor_json()}));

  MonitorSummary summary;
  LatencyHistogram latency;
  bool started = false;
  while (auto line = reader.next()) {
    const io::TraceRecord record = at_line(reader, [&] { return io::trace_record_from_json(*line); });
    if (!started && record.t <= resume_t) continue;
    if (opts.stop_after && record.t > *opts.stop_after) break;
    started = true;

    const auto t0 = Clock::now();
    const io::EstimateRecord est = at_line(reader, [&] { return monitor.process(record); });
    const auto t1 = Clock::now();
    latency.add(std::chrono::duration<double, std::nano>(t1 - t0).count());

    out.write(io::to_json(est));
    ++summary.records;
    if (est.conclusive) ++summary.conclusive;
    if (est.clamped) ++summary.clamped;
    summary.floor_violation = summary.floor_violation || est.floor_violation;
  }
  out.close();

  if (opts.snapshot_out) {
    std::ofstream snap(*opts.snapshot_out, std::ios::trunc);
    if (!snap) throw usage_error("cannot open '" + *opts.snapshot_out + "' for writing");
    snap << monitor.snapshot().dump() << '\n';
  }
  summary.median_ns = latency.quantile(0.5);
  summary.p99_ns = latency.quantile(0.99);
  summary.mean_ns = latency.mean();
  return summary;
}

// ---------------------------------------------------------------- eval

json EvalReport::to_json() const {
  json table = json::array();
  for (const auto& [t, w] : width_by_t) table.push_back({{"t", t}, {"width", w}});
  return {{"steps", steps},
          {"conclusive", conclusive},
          {"with_truth", with_truth},
          {"contained", contained},
          {"containment", containment},
          {"mean_width", mean_width},
          {"median_width", median_width},
          {"width_by_t", table}};
}

namespace {

bool is_checkpoint(std::uint64_t t) {
  // 1, 2, 5, 10, 20, 50, ...
  while (t >= 10 && t % 10 == 0) t /= 10;
  return t == 1 || t == 2 || t == 5;
}

}  // namespace

EvalReport cmd_eval(const std::string& estimates_path, const std::string& trace_path,
                    const std::optional<std::string>& per_step_csv) {
  io::JsonlReader est_reader(estimates_path);
  io::JsonlReader trace_reader(trace_path);

  auto est_first = est_reader.next();
  if (!est_first) throw data_error(estimates_path + ": empty file (missing metadata line)");
  const io::EstimatesHeader est_header =
      at_line(est_reader, [&] { return io::estimates_header_from_json(*est_first); });
  const io::TraceHeader trace_header = read_trace_header(trace_reader);
  if (est_header.trace_config_hash != trace_header.config_hash || est_header.kind != trace_header.kind) {
    throw data_error("misaligned files: estimates were not produced from this trace");
  }

  std::ofstream csv;
  if (per_step_csv) {
    csv.open(*per_step_csv, std::ios::trunc);
    if (!csv) throw usage_error("cannot open '" + *per_step_csv + "' for writing");
    csv << "t,conclusive,contained,width\n";
  }

  EvalReport report;
  std::vector<double> widths;
  for (;;) {
    auto e_line = est_reader.next();
    auto t_line = trace_reader.next();
    if (!e_line && !t_line) break;
    if (!e_line || !t_line) throw data_error("misaligned files: record counts differ");
    const io::EstimateRecord e = at_line(est_reader, [&] { return io::estimate_record_from_json(*e_line); });
    const io::TraceRecord r = at_line(trace_reader, [&] { return io::trace_record_from_json(*t_line); });
    if (e.t != r.t) {
      throw data_error("misaligned files: estimate t=" + std::to_string(e.t) + " vs trace t=" +
                       std::to_string(r.t));
    }
    ++report.steps;
    int contained = -1;
    if (e.conclusive) {
      ++report.conclusive;
      const double width = e.phi_hi - e.phi_lo;
      widths.push_back(width);
      if (is_checkpoint(e.t)) report.width_by_t.emplace_back(e.t, width);
      if (r.truth && r.truth->phi) {
        ++report.with_truth;
        contained = (e.phi_lo <= *r.truth->phi && *r.truth->phi <= e.phi_hi) ? 1 : 0;
        report.contained += static_cast<std::uint64_t>(contained);
      }
    }
    if (csv.is_open()) {
      csv << e.t << ',' << (e.conclusive ? 1 : 0) << ',';
      if (contained >= 0) csv << contained;
      csv << ',';
      if (e.conclusive) csv << json(e.phi_hi - e.phi_lo).dump();
      csv << '\n';
    }
  }

  if (report.with_truth > 0) {
    report.containment = static_cast<double>(report.contained) / static_cast<double>(report.with_truth);
  }
  if (!widths.empty()) {
    double sum = 0.0;
    for (double w : widths) sum += w;
    report.mean_width = sum / static_cast<double>(widths.size());
    const std::size_t mid = widths.size() / 2;
    std::nth_element(widths.begin(), widths.begin() + static_cast<std::ptrdiff_t>(mid), widths.end());
    double median = widths[mid];
    if (widths.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(widths.begin(), widths.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    report.median_width = median;
  }
  return report;
}

// ---------------------------------------------------------------- bench

json BenchReport::to_json() const {
  return {{"kind", kind}, {"updates", updates}, {"median_ns", median_ns}, {"p99_ns", p99_ns},
          {"mean_ns", mean_ns}};
}

namespace {

template <typename Monitor, typename Obs>
BenchReport time_updates(Monitor& monitor, const std::vector<Obs>& trace, const std::string& kind) {
  std::vector<double> ns;
  ns.reserve(trace.size());
  double sink = 0.0;
  for (const Obs& obs : trace) {
    const auto t0 = Clock::now();
    const MonitorOutput out = monitor.update(obs);
    const auto t1 = Clock::now();
    if (out.phi) sink += out.phi->lo;
    ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  BenchReport r;
  r.kind = kind;
  r.updates = ns.size();
  if (ns.empty()) return r;
  double total = 0.0;
  for (double v : ns) total += v;
  r.mean_ns = total / static_cast<double>(ns.size());
  auto quantile = [&](double q) {
    const auto idx = std::min(ns.size() - 1, static_cast<std::size_t>(q * static_cast<double>(ns.size())));
    std::nth_element(ns.begin(), ns.begin() + static_cast<std::ptrdiff_t>(idx), ns.end());
    return ns[idx];
  };
  r.median_ns = quantile(0.5);
  r.p99_ns = quantile(0.99);
  if (std::isnan(sink)) r.kind += "?";  // keeps the loop observable
  return r;
}

}  // namespace

BenchReport cmd_bench(io::TraceKind kind, std::uint64_t updates, std::uint64_t seed) {
  switch (kind) {
    case io::TraceKind::kCoin: {
      sim::CoinProcess coin({0.5, 0.0, updates, seed});
      std::vector<CoinToss> trace;
      trace.reserve(updates);
      for (std::uint64_t i = 0; i < updates; ++i) trace.push_back({coin.step().x});
      CoinMonitor monitor({0.0, 0.05, {1.0, 0.0}});
      return time_updates(monitor, trace, "coin");
    }
    case io::TraceKind::kLending: {
      sim::LendingEnvConfig env_cfg;
      env_cfg.c_max = 100;
      env_cfg.hist_a = sim::preset_histogram("fig2-mid-bias", Group::kA, 100, 100);
      env_cfg.hist_b = sim::preset_histogram("fig2-mid-bias", Group::kB, 100, 100);
      env_cfg.seed = seed;
      sim::LendingEnv env(env_cfg);
      std::vector<LendingObservation> trace;
      trace.reserve(updates);
      for (std::uint64_t i = 0; i < updates; ++i) trace.push_back(env.step().obs);
      LendingMonitor monitor(env.monitor_config(0.05));
      return time_updates(monitor, trace, "lending");
    }
    case io::TraceKind::kAttention: {
      // Static rates keep arbitrarily long synthetic traces inside the
      // rate floor; the monitor itself runs with the drifting config.
      const sim::AttentionPreset middle = sim::attention_preset("fig3-middle");
      sim::AttentionEnvConfig env_cfg = sim::attention_preset("fig3-left").env;
      env_cfg.seed = seed;
      sim::AttentionEnv env(env_cfg);
      std::vector<AttentionObservation> trace;
      trace.reserve(updates);
      for (std::uint64_t i = 0; i < updates; ++i) trace.push_back(env.step().obs);
      AttentionMonitor monitor({middle.env.gamma, middle.lambda_min, middle.lambda_max, 0.05, 1e-9});
      return time_updates(monitor, trace, "attention");
    }
  }
  throw usage_error("unknown bench kind");
}

// ---------------------------------------------------------------- csv

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::uint64_t export_csv(const std::string& estimates_path, const std::string& csv_path) {
  io::JsonlReader reader(estimates_path);
  auto first = reader.next();
  if (!first) throw data_error(estimates_path + ": empty file (missing metadata line)");
  at_line(reader, [&] { return io::estimates_header_from_json(*first); });

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw usage_error("cannot open '" + csv_path + "' for writing");
  csv << "t,conclusive,phi_lo,phi_hi,point,confidence,clamped,floor_violation,a_lo,a_hi,b_lo,b_hi\n";
  std::uint64_t n = 0;
  while (auto line = reader.next()) {
    const io::EstimateRecord e = at_line(reader, [&] { return io::estimate_record_from_json(*line); });
    csv << e.t << ',' << (e.conclusive ? 1 : 0) << ',';
    if (e.conclusive) {
      csv << num(e.phi_lo) << ',' << num(e.phi_hi) << ',' << num(e.point) << ',' << num(e.confidence);
    } else {
      csv << ",,,";
    }
    csv << ',' << (e.clamped ? 1 : 0) << ',' << (e.floor_violation ? 1 : 0);
    for (const auto& g : {e.group_a, e.group_b}) {
      csv << ',';
      if (g) csv << num(g->lo) << ',' << num(g->hi);
      else csv << ',';
    }
    csv << '\n';
    ++n;
  }
  return n;
}

}  // namespace fairmon
