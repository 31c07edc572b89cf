#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cedr/kernels.hpp"
#include "cedr/schedule.hpp"
#include "cedr/types.hpp"

namespace cedr {

struct RuntimeConfig {
  std::vector<std::pair<PeClass, int>> pe_roster = {{PeClass::CPU, 3}, {PeClass::FFT_ACC, 1}};
  SchedulerKind scheduler = SchedulerKind::EFT;
  std::string cost_model_path;
  std::string log_path = "cedr-logs";
  std::string ipc_endpoint;  // unix socket path; empty disables the IPC listener
  int scheduler_batch_max = 4096;

  int64_t tick_us = 1000;           // idle wake period of the main loop
  int64_t drain_timeout_ms = 30000;
  ChargeMode charge_mode = ChargeMode::SLEEP_REMAINDER;
  bool pin_threads = true;          // falls back with a warning when cores are scarce
  uint32_t accel_max_fft_points = 0;  // 0: accelerators accept any FFT size
  int64_t composite_cost_ns = 100'000;

  // Throws ConfigError when invariants do not hold (needs >=1 CPU, batch >= 1, ...).
  void validate() const;

  int total_pes() const;

  nlohmann::json to_json() const;
  static RuntimeConfig from_json(const nlohmann::json& j);
  static RuntimeConfig load(const std::string& path);
};

}  // namespace cedr
