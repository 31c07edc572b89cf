#include "cedr/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cedr {

const char* to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::RR: return "RR";
    case SchedulerKind::EFT: return "EFT";
    case SchedulerKind::ETF: return "ETF";
    case SchedulerKind::HEFT_RT: return "HEFT_RT";
  }
  return "?";
}

std::optional<SchedulerKind> scheduler_from_string(const std::string& s) {
  if (s == "RR") return SchedulerKind::RR;
  if (s == "EFT") return SchedulerKind::EFT;
  if (s == "ETF") return SchedulerKind::ETF;
  if (s == "HEFT_RT") return SchedulerKind::HEFT_RT;
  return std::nullopt;
}

std::optional<int64_t> task_estimate(const Task& task, PeClass cls, const CostModel& model) {
  if (task.is_composite()) {
    if (cls != PeClass::CPU) return std::nullopt;
    return model.composite_default_ns();
  }
  if (!task.supported_types.contains(cls)) return std::nullopt;
  return model.estimate(task.kernel, cls);
}

namespace {

bool task_supports(const Task& t, PeClass cls) {
  if (t.is_composite()) return cls == PeClass::CPU;
  return t.supported_types.contains(cls);
}

class RoundRobin final : public Scheduler {
 public:
  SchedulerKind kind() const override { return SchedulerKind::RR; }

  std::vector<Assignment> schedule(const ScheduleSnapshot& snap) override {
    std::vector<Assignment> out;
    out.reserve(snap.ready.size());
    if (snap.pes.empty()) return out;
    std::vector<TimeNs> busy(snap.pes.size());
    for (size_t i = 0; i < snap.pes.size(); ++i) busy[i] = snap.pes[i].busy_until;

    const size_t p = snap.pes.size();
    for (const auto& t : snap.ready) {
      for (size_t probe = 0; probe < p; ++probe) {
        size_t idx = (cursor_ + probe) % p;
        if (!task_supports(*t, snap.pes[idx].cls)) continue;
        int64_t est = task_estimate(*t, snap.pes[idx].cls, *snap.model).value_or(0);
        TimeNs start = std::max(snap.now, busy[idx]);
        busy[idx] = start + est;
        out.push_back({t->task_id, snap.pes[idx].pe_id, start, start + est});
        cursor_ = (idx + 1) % p;
        break;
      }
    }
    return out;
  }

 private:
  size_t cursor_ = 0;  // persists across invocations
};

class Eft final : public Scheduler {
 public:
  SchedulerKind kind() const override { return SchedulerKind::EFT; }

  std::vector<Assignment> schedule(const ScheduleSnapshot& snap) override {
    std::vector<TimeNs> busy(snap.pes.size());
    for (size_t i = 0; i < snap.pes.size(); ++i) busy[i] = snap.pes[i].busy_until;
    std::vector<Assignment> out;
    out.reserve(snap.ready.size());
    for (const auto& t : snap.ready) assign_one(*t, snap, busy, out);
    return out;
  }

  // Earliest-finish argmin for one task; ties go to the lowest PE id.
  static void assign_one(const Task& t, const ScheduleSnapshot& snap,
                         std::vector<TimeNs>& busy, std::vector<Assignment>& out) {
    int best = -1;
    TimeNs best_finish = std::numeric_limits<TimeNs>::max();
    TimeNs best_start = 0;
    for (size_t i = 0; i < snap.pes.size(); ++i) {
      if (!task_supports(t, snap.pes[i].cls)) continue;
      auto est = task_estimate(t, snap.pes[i].cls, *snap.model);
      if (!est) continue;
      TimeNs start = std::max(snap.now, busy[i]);
      TimeNs finish = start + *est;
      if (finish < best_finish ||
          (finish == best_finish && best >= 0 && snap.pes[i].pe_id < snap.pes[size_t(best)].pe_id)) {
        best = int(i);
        best_finish = finish;
        best_start = start;
      }
    }
    if (best < 0) return;  // unreachable: CPU supports every kernel
    busy[size_t(best)] = best_finish;
    out.push_back({t.task_id, snap.pes[size_t(best)].pe_id, best_start, best_finish});
  }
};

class Etf final : public Scheduler {
 public:
  SchedulerKind kind() const override { return SchedulerKind::ETF; }

  std::vector<Assignment> schedule(const ScheduleSnapshot& snap) override {
    std::vector<TimeNs> busy(snap.pes.size());
    for (size_t i = 0; i < snap.pes.size(); ++i) busy[i] = snap.pes[i].busy_until;
    std::vector<const Task*> remaining;
    remaining.reserve(snap.ready.size());
    for (const auto& t : snap.ready) remaining.push_back(t.get());

    std::vector<Assignment> out;
    out.reserve(remaining.size());
    // repeatedly commit the globally earliest-finishing (task, PE) pair;
    // ties by enqueue_ts, then task_id, then pe_id. `now` held fixed.
    while (!remaining.empty()) {
      size_t best_t = 0;
      int best_p = -1;
      TimeNs best_finish = std::numeric_limits<TimeNs>::max();
      TimeNs best_start = 0;
      for (size_t ti = 0; ti < remaining.size(); ++ti) {
        const Task& t = *remaining[ti];
        for (size_t pi = 0; pi < snap.pes.size(); ++pi) {
          if (!task_supports(t, snap.pes[pi].cls)) continue;
          auto est = task_estimate(t, snap.pes[pi].cls, *snap.model);
          if (!est) continue;
          TimeNs start = std::max(snap.now, busy[pi]);
          TimeNs finish = start + *est;
          bool better = false;
          if (best_p < 0 || finish < best_finish) {
            better = true;
          } else if (finish == best_finish) {
            const Task& bt = *remaining[best_t];
            auto cand = std::make_tuple(t.enqueue_ts, t.task_id, snap.pes[pi].pe_id);
            auto cur = std::make_tuple(bt.enqueue_ts, bt.task_id, snap.pes[size_t(best_p)].pe_id);
            better = cand < cur;
          }
          if (better) {
            best_t = ti;
            best_p = int(pi);
            best_finish = finish;
            best_start = start;
          }
        }
      }
      if (best_p < 0) break;  // unreachable
      busy[size_t(best_p)] = best_finish;
      out.push_back({remaining[best_t]->task_id, snap.pes[size_t(best_p)].pe_id,
                     best_start, best_finish});
      remaining.erase(remaining.begin() + long(best_t));
    }
    return out;
  }
};

class HeftRt final : public Scheduler {
 public:
  SchedulerKind kind() const override { return SchedulerKind::HEFT_RT; }

  std::vector<Assignment> schedule(const ScheduleSnapshot& snap) override {
    std::vector<PeClass> roster_classes;
    for (const auto& pe : snap.pes)
      if (std::find(roster_classes.begin(), roster_classes.end(), pe.cls) == roster_classes.end())
        roster_classes.push_back(pe.cls);

    struct Ranked {
      const std::shared_ptr<Task>* t;
      double rank;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(snap.ready.size());
    for (const auto& t : snap.ready) ranked.push_back({&t, rank_of(*t, roster_classes, *snap.model)});

    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
      if (a.rank != b.rank) return a.rank > b.rank;  // descending rank
      if ((*a.t)->enqueue_ts != (*b.t)->enqueue_ts) return (*a.t)->enqueue_ts < (*b.t)->enqueue_ts;
      return (*a.t)->task_id < (*b.t)->task_id;
    });

    std::vector<TimeNs> busy(snap.pes.size());
    for (size_t i = 0; i < snap.pes.size(); ++i) busy[i] = snap.pes[i].busy_until;
    std::vector<Assignment> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked) Eft::assign_one(**r.t, snap, busy, out);
    return out;
  }

  // DAG tasks carry their precomputed upward rank; queue-only tasks fall back
  // to the mean execution cost across supporting classes in the roster.
  static double rank_of(const Task& t, const std::vector<PeClass>& classes,
                        const CostModel& model) {
    if (t.rank_hint >= 0.0) return t.rank_hint;
    if (t.is_composite()) return double(model.composite_default_ns());
    double sum = 0;
    int n = 0;
    for (PeClass c : classes) {
      if (auto e = task_estimate(t, c, model)) {
        sum += double(*e);
        ++n;
      }
    }
    return n ? sum / n : 0.0;
  }
};

}  // namespace

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::RR: return std::make_unique<RoundRobin>();
    case SchedulerKind::EFT: return std::make_unique<Eft>();
    case SchedulerKind::ETF: return std::make_unique<Etf>();
    case SchedulerKind::HEFT_RT: return std::make_unique<HeftRt>();
  }
  return nullptr;
}

}  // namespace cedr
