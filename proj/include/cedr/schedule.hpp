#pragma once

#include <memory>
#include <vector>

#include "cedr/cost_model.hpp"
#include "cedr/types.hpp"

namespace cedr {

enum class SchedulerKind { RR, EFT, ETF, HEFT_RT };

const char* to_string(SchedulerKind k);
std::optional<SchedulerKind> scheduler_from_string(const std::string& s);

struct PeView {
  int pe_id = 0;
  PeClass cls = PeClass::CPU;
  TimeNs busy_until = 0;
};

struct ScheduleSnapshot {
  std::vector<std::shared_ptr<Task>> ready;  // FIFO order
  std::vector<PeView> pes;                   // stable roster order
  TimeNs now = 0;
  const CostModel* model = nullptr;
};

struct Assignment {
  uint64_t task_id = 0;
  int pe_id = 0;
  TimeNs predicted_start = 0;
  TimeNs predicted_finish = 0;
};

// Modeled duration of `task` on `cls`; composite tasks use the model's flat
// default. Absent when the class does not support the kernel.
std::optional<int64_t> task_estimate(const Task& task, PeClass cls, const CostModel& model);

// Pluggable mapping of ready tasks to PEs. Pure function of the snapshot plus
// private persistent state (the RR cursor); invoked from the main loop only.
// Every ready task receives exactly one assignment per invocation.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual SchedulerKind kind() const = 0;
  virtual std::vector<Assignment> schedule(const ScheduleSnapshot& snap) = 0;
  const char* name() const { return to_string(kind()); }
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind);

}  // namespace cedr
