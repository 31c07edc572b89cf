#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cedr/dag.hpp"
#include "cedr/types.hpp"

namespace cedr {

struct TaskRecord {
  uint64_t task_id = 0;
  uint32_t app_id = 0;
  std::string kernel;  // closed-set name, or the composite function name
  std::string size;    // raw size key, e.g. "64" or "8x8x4"; empty for composites
  int node_id = -1;
  int pe_id = -1;
  std::string pe_type;
  TimeNs enqueue_ns = 0;
  TimeNs dispatch_ns = 0;
  TimeNs complete_ns = 0;
  std::string status;  // OK | ERROR | INCOMPLETE
};

struct AppRecord {
  uint32_t app_id = 0;
  std::string name;
  std::string mode;  // API | DAG
  TimeNs arrival_ns = 0;
  TimeNs start_ns = 0;
  TimeNs end_ns = 0;
  std::string state;  // DONE | INCOMPLETE | FAILED
  uint64_t task_count = 0;
  int64_t mgmt_ns = 0;   // attributed main-loop management time
  int64_t sched_ns = 0;  // attributed scheduling time
  uint64_t digest = 0;   // app output digest, 0 when not reported
};

struct SchedRecord {
  uint64_t seq = 0;
  TimeNs ts_ns = 0;
  uint32_t queue_len = 0;
  uint32_t batch = 0;      // tasks actually handed to the scheduler
  int64_t decision_ns = 0;
};

struct RunSummary {
  int64_t total_mgmt_ns = 0;   // main-loop management time, decisions excluded
  int64_t total_sched_ns = 0;  // scheduler decision time
  uint64_t n_apps = 0;
  uint64_t n_tasks = 0;
  uint64_t incomplete_apps = 0;
  uint64_t incomplete_tasks = 0;
  TimeNs span_ns = 0;  // first arrival to shutdown completion
};

// One run directory: run.json (config echo, cost-model hash, wall-clock start,
// summary) plus tasks.csv / apps.csv / sched.csv. Serialized once at shutdown.
struct LogBundle {
  nlohmann::json header;  // run.json contents
  RunSummary summary;
  std::vector<TaskRecord> tasks;
  std::vector<AppRecord> apps;
  std::vector<SchedRecord> sched;

  std::string scheduler() const { return header.value("scheduler", std::string()); }

  void write(const std::string& dir) const;
  static LogBundle load(const std::string& dir);
};

// Soundness checkers; each returns human-readable problems (empty == sound).
std::vector<std::string> check_task_accounting(const LogBundle& b);
std::vector<std::string> check_pe_exclusive(const LogBundle& b);
std::vector<std::string> check_kernel_support(const LogBundle& b);
// Every edge (u,v) of the instance's DAG satisfies complete(u) <= dispatch(v).
std::vector<std::string> check_topological(const LogBundle& b, const AppDag& dag,
                                           uint32_t app_id);

// Diagnostic per-app wall residual: (end - arrival) - sum(task service) - sched.
// Can be negative when an app's tasks ran in parallel.
int64_t wall_residual_ns(const LogBundle& b, uint32_t app_id);

}  // namespace cedr
