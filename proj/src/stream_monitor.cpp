#include "fairmon/stream_monitor.hpp"

#include "fairmon/error.hpp"

namespace fairmon {

using nlohmann::json;

namespace {

json registers_json(const ShiftCorrectedMean& core) {
  const auto r = core.registers();
  return {{"t", r.t}, {"e1_hat", r.e1_hat}, {"d_sum", r.d_sum}, {"d_comp", r.d_comp}};
}

void restore_registers(ShiftCorrectedMean& core, const json& j) {
  ShiftCorrectedMean::Registers r;
  r.t = j.at("t").get<std::uint64_t>();
  r.e1_hat = j.at("e1_hat").get<double>();
  r.d_sum = j.at("d_sum").get<double>();
  r.d_comp = j.at("d_comp").get<double>();
  core.restore(r);
}

json params_json(const CoinMonitorConfig& c) {
  return {{"epsilon", c.epsilon},
          {"delta", c.delta},
          {"sigma_sq", c.params.sigma_sq},
          {"nu", c.params.nu}};
}

json params_json(const LendingConfig& c) {
  return {{"n_a", c.n_a}, {"n_b", c.n_b}, {"c_max", c.c_max}, {"delta", c.delta}};
}

json params_json(const AttentionConfig& c) {
  return {{"gamma", c.gamma},
          {"lambda_min", c.lambda_min},
          {"lambda_max", c.lambda_max},
          {"delta", c.delta},
          {"lambda_floor", c.lambda_floor}};
}

}  // namespace

StreamMonitor::StreamMonitor(const io::RunConfig& cfg)
    : StreamMonitor(cfg.kind, [&]() -> Monitor {
        switch (cfg.kind) {
          case io::TraceKind::kCoin: return CoinMonitor(cfg.coin_monitor());
          case io::TraceKind::kLending: return LendingMonitor(cfg.lending_monitor());
          case io::TraceKind::kAttention: return AttentionMonitor(cfg.attention_monitor());
        }
        throw usage_error("unknown monitor kind");
      }()) {}

StreamMonitor::StreamMonitor(io::TraceKind kind, Monitor monitor)
    : kind_(kind), monitor_(std::move(monitor)) {}

io::EstimateRecord StreamMonitor::process(const io::TraceRecord& record) {
  if (record.kind() != kind_) {
    throw data_error("kind mismatch: " + io::to_string(kind_) + " monitor got a " +
                     io::to_string(record.kind()) + " record");
  }
  if (record.t <= last_t_) {
    throw data_error("non-monotone t: " + std::to_string(record.t) + " after " +
                     std::to_string(last_t_));
  }
  const MonitorOutput out = std::visit(
      [&](auto& m) -> MonitorOutput {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, CoinMonitor>) {
          return m.update(std::get<CoinToss>(record.obs));
        } else if constexpr (std::is_same_v<M, LendingMonitor>) {
          return m.update(std::get<LendingObservation>(record.obs));
        } else {
          return m.update(std::get<AttentionObservation>(record.obs));
        }
      },
      monitor_);
  last_t_ = record.t;
  return io::to_estimate(record.t, out);
}

json StreamMonitor::monitor_json() const {
  json j = std::visit([](const auto& m) { return params_json(m.config()); }, monitor_);
  j["kind"] = io::to_string(kind_);
  return j;
}

json StreamMonitor::snapshot() const {
  json snap = {{"format", kSnapshotFormat},
               {"version", kSnapshotVersion},
               {"kind", io::to_string(kind_)},
               {"last_t", last_t_},
               {"monitor", monitor_json()}};
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, CoinMonitor>) {
          snap["estimators"] = json::array({registers_json(m.estimator().core())});
        } else {
          snap["monitor_t"] = m.t();
          snap["estimators"] = json::array(
              {registers_json(m.estimator(Group::kA).core()), registers_json(m.estimator(Group::kB).core())});
          if constexpr (std::is_same_v<M, AttentionMonitor>) {
            json floors = json::array();
            for (Group g : {Group::kA, Group::kB}) {
              floors.push_back({{"cumulative", m.floor(g).cumulative()}, {"holds", m.floor(g).holds()}});
            }
            snap["floors"] = floors;
          }
        }
      },
      monitor_);
  return snap;
}

StreamMonitor StreamMonitor::restore(const json& snap) {
  try {
    if (!snap.is_object() || snap.value("format", "") != kSnapshotFormat) {
      throw data_error("not a monitor snapshot");
    }
    if (snap.at("version").get<int>() != kSnapshotVersion) {
      throw data_error("snapshot version " + snap.at("version").dump() + " is not supported (expected " +
                       std::to_string(kSnapshotVersion) + ")");
    }
    const io::TraceKind kind = io::parse_kind(snap.at("kind").get<std::string>());
    const json& p = snap.at("monitor");
    const json& regs = snap.at("estimators");

    auto make = [&]() -> Monitor {
      switch (kind) {
        case io::TraceKind::kCoin: {
          CoinMonitor m({p.at("epsilon").get<double>(),
                         p.at("delta").get<double>(),
                         {p.at("sigma_sq").get<double>(), p.at("nu").get<double>()}});
          restore_registers(m.estimator().core(), regs.at(0));
          return m;
        }
        case io::TraceKind::kLending: {
          LendingMonitor m({p.at("n_a").get<std::uint64_t>(), p.at("n_b").get<std::uint64_t>(),
                            p.at("c_max").get<int>(), p.at("delta").get<double>()});
          restore_registers(m.estimator(Group::kA).core(), regs.at(0));
          restore_registers(m.estimator(Group::kB).core(), regs.at(1));
          m.set_t(snap.at("monitor_t").get<std::uint64_t>());
          return m;
        }
        case io::TraceKind::kAttention: {
          AttentionMonitor m({p.at("gamma").get<double>(), p.at("lambda_min").get<double>(),
                              p.at("lambda_max").get<double>(), p.at("delta").get<double>(),
                              p.at("lambda_floor").get<double>()});
          restore_registers(m.estimator(Group::kA).core(), regs.at(0));
          restore_registers(m.estimator(Group::kB).core(), regs.at(1));
          const json& floors = snap.at("floors");
          for (Group g : {Group::kA, Group::kB}) {
            const json& f = floors.at(index_of(g));
            m.floor(g).restore(f.at("cumulative").get<double>(), f.at("holds").get<bool>());
          }
          m.set_t(snap.at("monitor_t").get<std::uint64_t>());
          return m;
        }
      }
      throw data_error("unknown monitor kind");
    };

    StreamMonitor sm(kind, make());
    sm.last_t_ = snap.at("last_t").get<std::uint64_t>();
    return sm;
  } catch (const json::exception& e) {
    throw data_error(std::string("corrupt snapshot: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kData) throw;
    throw data_error(std::string("corrupt snapshot: ") + e.what());
  }
}

}  // namespace fairmon
