#include "cedr/config.hpp"

#include <fstream>

namespace cedr {

void RuntimeConfig::validate() const {
  int cpus = 0;
  for (const auto& [cls, count] : pe_roster) {
    if (count < 0) throw ConfigError("config: negative PE count");
    if (cls == PeClass::CPU) cpus += count;
  }
  if (cpus < 1) throw ConfigError("config: pe_roster must contain at least one CPU");
  if (scheduler_batch_max < 1) throw ConfigError("config: scheduler_batch_max must be >= 1");
  if (tick_us < 1) throw ConfigError("config: tick_us must be >= 1");
  if (drain_timeout_ms < 0) throw ConfigError("config: drain_timeout_ms must be >= 0");
  if (composite_cost_ns <= 0) throw ConfigError("config: composite_cost_ns must be > 0");
}

int RuntimeConfig::total_pes() const {
  int n = 0;
  for (const auto& [cls, count] : pe_roster) n += count;
  return n;
}

nlohmann::json RuntimeConfig::to_json() const {
  nlohmann::json roster = nlohmann::json::array();
  for (const auto& [cls, count] : pe_roster)
    roster.push_back({{"type", to_string(cls)}, {"count", count}});
  return {{"pe_roster", roster},
          {"scheduler", to_string(scheduler)},
          {"cost_model_path", cost_model_path},
          {"log_path", log_path},
          {"ipc_endpoint", ipc_endpoint},
          {"scheduler_batch_max", scheduler_batch_max},
          {"tick_us", tick_us},
          {"drain_timeout_ms", drain_timeout_ms},
          {"charge_mode", charge_mode == ChargeMode::SLEEP_FULL ? "SLEEP_FULL" : "SLEEP_REMAINDER"},
          {"pin_threads", pin_threads},
          {"accel_max_fft_points", accel_max_fft_points},
          {"composite_cost_ns", composite_cost_ns}};
}

RuntimeConfig RuntimeConfig::from_json(const nlohmann::json& j) {
  RuntimeConfig c;
  if (j.contains("pe_roster")) {
    c.pe_roster.clear();
    for (const auto& e : j.at("pe_roster")) {
      auto cls = pe_class_from_string(e.at("type").get<std::string>());
      if (!cls) throw ConfigError("config: unknown PE type " + e.at("type").dump());
      c.pe_roster.push_back({*cls, e.at("count").get<int>()});
    }
  }
  if (j.contains("scheduler")) {
    auto s = scheduler_from_string(j.at("scheduler").get<std::string>());
    if (!s) throw ConfigError("config: unknown scheduler " + j.at("scheduler").dump());
    c.scheduler = *s;
  }
  c.cost_model_path = j.value("cost_model_path", c.cost_model_path);
  c.log_path = j.value("log_path", c.log_path);
  c.ipc_endpoint = j.value("ipc_endpoint", c.ipc_endpoint);
  c.scheduler_batch_max = j.value("scheduler_batch_max", c.scheduler_batch_max);
  c.tick_us = j.value("tick_us", c.tick_us);
  c.drain_timeout_ms = j.value("drain_timeout_ms", c.drain_timeout_ms);
  if (j.contains("charge_mode")) {
    auto m = j.at("charge_mode").get<std::string>();
    if (m == "SLEEP_FULL") c.charge_mode = ChargeMode::SLEEP_FULL;
    else if (m == "SLEEP_REMAINDER") c.charge_mode = ChargeMode::SLEEP_REMAINDER;
    else throw ConfigError("config: unknown charge_mode " + m);
  }
  c.pin_threads = j.value("pin_threads", c.pin_threads);
  c.accel_max_fft_points = j.value("accel_max_fft_points", c.accel_max_fft_points);
  c.composite_cost_ns = j.value("composite_cost_ns", c.composite_cost_ns);
  c.validate();
  return c;
}

RuntimeConfig RuntimeConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace cedr
