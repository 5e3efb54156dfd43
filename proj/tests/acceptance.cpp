// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
#include <algorithm>
#include <chrono>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmon/commands.hpp"
#include "fairmon/estimator.hpp"
#include "fairmon/io/run_config.hpp"
#include "fairmon/monitors.hpp"
#include "fairmon/poisson_eta.hpp"
#include "fairmon/sim/attention.hpp"
#include "fairmon/sim/coin.hpp"
#include "fairmon/sim/lending.hpp"
#include "oracle.hpp"

using namespace fairmon;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Coverage of the coin estimator at t = 1000.
Result coin_coverage() {
  const int runs = 2000;
  int covered = 0;
  for (int r = 0; r < runs; ++r) {
    sim::CoinProcess coin({0.5, 0.001, 0, 10000u + r});
    CoinMonitor mon({0.001, 0.05, {1.0, 0.0}});
    MonitorOutput out;
    double truth = 0.0;
    for (int t = 1; t <= 1000; ++t) {
      const auto s = coin.step();
      truth = s.p;
      out = mon.update({s.x});
    }
    covered += out.phi->contains(truth) ? 1 : 0;
  }
  const double frac = static_cast<double>(covered) / runs;
  return {frac >= 0.95, fmt("containment %.4f over 2000 runs", frac)};
}

// 2. Mean of the initial-mean estimate over independent runs.
Result unbiasedness() {
  const int runs = 10000;
  std::vector<double> v;
  v.reserve(runs);
  for (int r = 0; r < runs; ++r) {
    sim::CoinProcess coin({0.5, 0.001, 0, 50000u + r});
    CoinMonitor mon({0.001, 0.05, {1.0, 0.0}});
    for (int t = 0; t < 100; ++t) mon.update({coin.step().x});
    v.push_back(mon.estimator().point_estimate_initial());
  }
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= runs;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (runs - 1));
  const double bound = 3.0 * sd / std::sqrt(static_cast<double>(runs));
  const double err = std::abs(mean - 0.5);
  return {err <= bound, fmt("|mean - p1| = %.3g", err) + fmt(", bound %.3g", bound)};
}

// 3. Closed form against the series and a Monte-Carlo estimate.
Result eta_oracle() {
  double worst_series = 0.0;
  double worst_z = 0.0;
  std::uint64_t seed = 1;
  for (std::uint64_t y : {1u, 3u, 6u, 10u}) {
    for (double lam : {0.5, 1.0, 5.0, 20.0}) {
      const double v = eta(y, lam);
      const long double m1 = testing::eta_series(y, lam);
      const long double m2 = testing::eta_series_second_moment(y, lam);
      worst_series = std::max(worst_series, std::abs(v - static_cast<double>(m1)));
      const std::uint64_t n = 1000000;
      const auto mc = testing::eta_monte_carlo(y, lam, n, seed++);
      // A sample whose ratio is always 1 has zero spread; fall back to the
      // exact variance of the ratio.
      const double exact_se = std::sqrt(std::max(0.0, static_cast<double>(m2 - m1 * m1)) / n);
      const double se = std::max(mc.stderr_, exact_se);
      const double diff = std::abs(v - mc.mean);
      if (se > 0.0) {
        worst_z = std::max(worst_z, diff / se);
      } else if (diff > 0.0) {
        worst_z = INFINITY;
      }
    }
  }
  const bool ok = worst_series <= 1e-10 && worst_z <= 4.0;
  return {ok, fmt("max |eta - series| = %.3g", worst_series) + fmt(", max MC z = %.3f", worst_z)};
}

// 4. Strictly decreasing in λ. Where η rounds to the same double near 1 the
// miss probability 1 - η breaks the tie.
Result eta_monotone() {
  int violations = 0;
  for (std::uint64_t y = 1; y <= 20; ++y) {
    double prev = eta(y, 0.1);
    double prev_miss = eta_miss(y, 0.1);
    for (int i = 2; i <= 500; ++i) {
      const double lam = 0.1 * i;
      const double v = eta(y, lam);
      const double m = eta_miss(y, lam);
      if (!(v < prev || (v == prev && m > prev_miss))) ++violations;
      prev = v;
      prev_miss = m;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations on 20 x 500 grid"};
}

// 5. e^c - c - 1 <= c² on [-0.5, 0.5].
Result mgf_inequality() {
  int violations = 0;
  for (int i = 0; i <= 10000; ++i) {
    const double c = -0.5 + i * 1e-4;
    if (std::expm1(c) - c > c * c + 1e-15) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations on 10001 points"};
}

// 6. Lending monitor containment at fixed steps.
Result lending_coverage() {
  const std::vector<std::uint64_t> checkpoints{100, 1000, 5000};
  std::vector<int> hits(checkpoints.size(), 0);
  const int runs = 500;
  for (int r = 0; r < runs; ++r) {
    io::RunConfig cfg = io::parse_run_config({{"kind", "lending"},
                                              {"seed", 1000 + r},
                                              {"lending",
                                               {{"n_a", 100}, {"n_b", 100}, {"c_max", 100},
                                                {"policy", "max_reward"}}}});
    sim::LendingEnv env(cfg.lending);
    LendingMonitor mon(cfg.lending_monitor());
    std::size_t next = 0;
    for (std::uint64_t t = 1; t <= checkpoints.back(); ++t) {
      const auto s = env.step();
      const auto out = mon.update(s.obs);
      if (t == checkpoints[next]) {
        if (out.conclusive() && out.phi->contains(s.phi)) ++hits[next];
        ++next;
      }
    }
  }
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double frac = static_cast<double>(hits[i]) / runs;
    ok = ok && frac >= 0.95;
    detail += "t=" + std::to_string(checkpoints[i]) + fmt(": %.3f ", frac);
  }
  return {ok, detail + "over 500 runs"};
}

// 7. Attention monitor containment with the L=5, K=6, γ=0.0025 preset.
Result attention_coverage() {
  const std::vector<std::uint64_t> checkpoints{100, 1000};
  std::vector<int> hits(checkpoints.size(), 0);
  const int runs = 500;
  bool floor_tripped = false;
  for (int r = 0; r < runs; ++r) {
    io::RunConfig cfg = io::parse_run_config(
        {{"kind", "attention"}, {"seed", 2000 + r}, {"attention", {{"preset", "fig3-middle"}}}});
    sim::AttentionEnv env(cfg.attention);
    AttentionMonitor mon(cfg.attention_monitor());
    std::size_t next = 0;
    for (std::uint64_t t = 1; t <= checkpoints.back(); ++t) {
      const auto s = env.step();
      const auto out = mon.update(s.obs);
      floor_tripped = floor_tripped || out.floor_violation;
      if (t == checkpoints[next]) {
        if (out.phi->contains(s.phi)) ++hits[next];
        ++next;
      }
    }
  }
  bool ok = !floor_tripped;
  std::string detail;
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    const double frac = static_cast<double>(hits[i]) / runs;
    ok = ok && frac >= 0.95;
    detail += "t=" + std::to_string(checkpoints[i]) + fmt(": %.3f ", frac);
  }
  return {ok, detail + "over 500 runs, floor " + (floor_tripped ? "tripped" : "held")};
}

// 8. Lending half-width equals ε_A + ε_B and shrinks like 1/√t.
Result width_law() {
  io::RunConfig cfg = io::parse_run_config({{"kind", "lending"}, {"seed", 77}});
  sim::LendingEnv env(cfg.lending);
  const LendingConfig mc = cfg.lending_monitor();
  LendingMonitor mon(mc);
  const SubExpParams params{static_cast<double>(mc.c_max) * mc.c_max, 0.0};
  std::uint64_t n[2] = {0, 0};
  double worst_rel = 0.0;
  std::vector<std::pair<std::uint64_t, double>> scaled;
  for (std::uint64_t t = 1; t <= 20000; ++t) {
    const auto s = env.step();
    ++n[index_of(s.obs.g)];
    const auto out = mon.update(s.obs);
    if (!out.conclusive()) continue;
    const double expected = azuma_epsilon(n[0], mc.delta / 2, params) + azuma_epsilon(n[1], mc.delta / 2, params);
    const double half = 0.5 * out.phi->width();
    worst_rel = std::max(worst_rel, std::abs(half - expected) / expected);
    if (t == 100 || t == 1000 || t == 10000 || t == 20000) {
      scaled.emplace_back(t, half * std::sqrt(static_cast<double>(t)));
    }
  }
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& [t, v] : scaled) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Endpoints are e ± ε rounded, so the difference of two intervals can be
  // a few ulps off the exact sum.
  const bool ok = worst_rel <= 16 * DBL_EPSILON && hi / lo <= 1.25;
  return {ok, fmt("max relative deviation %.2g", worst_rel) + fmt(", spread of half-width*sqrt(t) %.3f", hi / lo)};
}

// 9. Per-update latency.
Result latency() {
  const auto lending = cmd_bench(io::TraceKind::kLending, 1000000, 1);
  const auto attention = cmd_bench(io::TraceKind::kAttention, 100000, 1);
  const bool ok = lending.median_ns < 100000.0 && attention.median_ns < 1000000.0;
  return {ok, fmt("lending median %.0f ns", lending.median_ns) + fmt(" (p99 %.0f)", lending.p99_ns) +
                  fmt(", attention median %.0f ns", attention.median_ns) + fmt(" (p99 %.0f)", attention.p99_ns)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> estimate_lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// 10. Reruns are byte-identical and snapshot/resume is transparent.
Result determinism() {
  const fs::path dir = fs::temp_directory_path() / "fairmon_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  bool identical = true;
  bool split_ok = true;
  for (const char* kind : {"coin", "lending", "attention"}) {
    const io::RunConfig cfg = io::parse_run_config({{"kind", kind}, {"seed", 31}, {"horizon", 2000}});
    cmd_simulate(cfg, (dir / "a.jsonl").string());
    cmd_simulate(cfg, (dir / "b.jsonl").string());
    cmd_monitor((dir / "a.jsonl").string(), (dir / "ea.jsonl").string());
    cmd_monitor((dir / "b.jsonl").string(), (dir / "eb.jsonl").string());
    identical = identical && slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl") &&
                slurp(dir / "ea.jsonl") == slurp(dir / "eb.jsonl");

    const io::RunConfig small = io::parse_run_config({{"kind", kind}, {"seed", 32}, {"horizon", 10}});
    cmd_simulate(small, (dir / "f.jsonl").string());
    cmd_monitor((dir / "f.jsonl").string(), (dir / "full.jsonl").string());
    const auto full = estimate_lines(dir / "full.jsonl");
    for (std::uint64_t k = 0; k <= 10; ++k) {
      MonitorOptions first;
      first.stop_after = k;
      first.snapshot_out = (dir / "snap.json").string();
      cmd_monitor((dir / "f.jsonl").string(), (dir / "p1.jsonl").string(), first);
      MonitorOptions second;
      second.resume_path = (dir / "snap.json").string();
      cmd_monitor((dir / "f.jsonl").string(), (dir / "p2.jsonl").string(), second);
      auto joined = estimate_lines(dir / "p1.jsonl");
      const auto rest = estimate_lines(dir / "p2.jsonl");
      joined.insert(joined.end(), rest.begin(), rest.end());
      split_ok = split_ok && joined == full;
    }
  }
  fs::remove_all(dir);
  return {identical && split_ok, std::string("reruns ") + (identical ? "identical" : "differ") +
                                     ", split-at-every-t " + (split_ok ? "matches" : "differs")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Result (*run)();
  };
  const Criterion criteria[] = {
      {1, "estimator coverage", coin_coverage},
      {2, "unbiasedness", unbiasedness},
      {3, "eta oracle equivalence", eta_oracle},
      {4, "eta strict monotonicity", eta_monotone},
      {5, "mgf inequality", mgf_inequality},
      {6, "lending coverage", lending_coverage},
      {7, "attention coverage", attention_coverage},
      {8, "interval width law", width_law},
      {9, "latency", latency},
      {10, "determinism and snapshot transparency", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", c.id, c.name,
                r.detail.c_str(), secs);
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
