#pragma once

#include <map>
#include <string>
#include <vector>

#include "cedr/config.hpp"
#include "cedr/cost_model.hpp"
#include "cedr/log.hpp"
#include "cedr/runtime.hpp"
#include "cedr/schedule.hpp"

namespace cedr::harness {

// ---- cost-model profiling ------------------------------------------------

struct ProfileSpec {
  std::vector<uint32_t> fft_sizes = {64, 128, 256, 512, 1024, 2048};
  std::vector<uint32_t> zip_sizes = {64, 128, 256, 512, 1024, 2048};
  std::vector<uint32_t> gemm_dims = {16, 32, 64};
  std::vector<uint32_t> conv_dims = {64, 128};  // square images, 3x3 mask
  int repeats = 11;                              // median-of
  // Emulation time dilation: profiled CPU medians are scaled by this factor
  // and accelerator entries derived from the dilated CPU rows, so charged
  // task durations stay well above host timer granularity and accelerators
  // are genuinely faster in wall-clock terms.
  double dilation = 32.0;
  double fft_acc_speedup = 8.0;
  double gpu_acc_speedup = 4.0;
  double mmult_acc_speedup = 4.0;
  int64_t min_sample_ns = 20'000;  // below this, the repeat count is inflated
};

// Times every kernel/size on the CPU (median of `repeats`), derives
// accelerator entries via the speedup factors, returns the model.
CostModel profile_cost_model(const ProfileSpec& spec = {});

// ---- injection -------------------------------------------------------------

// Seconds between instance arrivals for a frame of `frame_mb` megabits
// injected at `rate_mbps`.
double injection_period_s(double frame_mb, double rate_mbps);

struct WorkloadEntry {
  std::string app;
  AppMode mode = AppMode::API;
  int count = 1;
  nlohmann::json params = nlohmann::json::object();
};

struct WorkloadSpec {
  std::vector<WorkloadEntry> entries;
  std::vector<double> rates_mbps = {10, 2000};
  int trials = 5;
  uint64_t seed = 42;

  nlohmann::json to_json() const;
  static WorkloadSpec from_json(const nlohmann::json& j);
  static WorkloadSpec load(const std::string& path);
  void validate() const;
};

// Paper-shaped default sweeps.
std::vector<double> desk_scale_rates();   // 10 log-spaced points, 10..2000 Mbps
std::vector<double> paper_scale_rates();  // 29 points, 10..2000 Mbps

struct RunResult {
  double rate_mbps = 0;
  int trial = 0;
  std::string scheduler;
  std::string dir;
  bool failed = false;
  std::string error;
  LogBundle bundle;
};

// One (rate, trial): starts an in-process daemon with an IPC endpoint,
// submits every instance at its periodic arrival time, shuts down after the
// last completion, and collects the logs under `run_dir`.
RunResult run_trial(const WorkloadSpec& spec, const RuntimeConfig& base, double rate_mbps,
                    int trial, const std::string& run_dir);

// Full sweep: every (rate, trial) pair for the spec, one daemon at a time.
std::vector<RunResult> run_workload(const WorkloadSpec& spec, const RuntimeConfig& base,
                                    const std::string& out_dir);

// ---- metrics ----------------------------------------------------------------

struct MetricStats {
  double mean_ms = 0;
  double std_ms = 0;
  int trials = 0;
};

struct MetricsCell {
  MetricStats exec_time;
  MetricStats sched_overhead;
  MetricStats runtime_overhead;
};

struct MetricsReport {
  // keyed by (rate, scheduler)
  std::map<std::pair<double, std::string>, MetricsCell> cells;
  uint64_t excluded_incomplete = 0;

  bool empty() const { return cells.empty(); }
};

// Per-trial per-app averages, then mean/std across trials. Incomplete apps
// are excluded and counted.
struct TrialMetrics {
  double exec_ms = 0;
  double sched_ms = 0;
  double overhead_ms = 0;
  uint64_t apps_counted = 0;
  uint64_t apps_excluded = 0;
};
TrialMetrics trial_metrics(const LogBundle& bundle);

MetricsReport compute_metrics(const std::vector<RunResult>& runs);
MetricsReport compute_metrics_from_dirs(const std::string& logs_dir);

// metrics.csv (one row per rate/scheduler/metric) plus one plot-data file per
// metric (x = rate, one series per scheduler). Byte-deterministic.
void emit_report(const MetricsReport& report, const std::string& out_dir);

// ---- scheduler scaling ---------------------------------------------------

// Fits the log-log growth exponent of scheduler decision time against ready
// queue length over synthetic snapshots.
double scheduler_growth_exponent(SchedulerKind kind, const std::vector<int>& queue_sizes,
                                 int pe_count = 4, int repeats = 5);

}  // namespace cedr::harness
