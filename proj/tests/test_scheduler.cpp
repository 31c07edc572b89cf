#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cedr/apps.hpp"
#include "cedr/cost_model.hpp"
#include "cedr/schedule.hpp"

using namespace cedr;

namespace {

CostModel test_model() {
  CostModel m;
  auto put = [&](KernelName k, SizeKey sz, int64_t cpu) {
    m.set(k, bucket(sz), PeClass::CPU, cpu);
    if (supports(PeClass::FFT_ACC, k)) m.set(k, bucket(sz), PeClass::FFT_ACC, cpu / 8);
    if (supports(PeClass::GPU_ACC, k)) m.set(k, bucket(sz), PeClass::GPU_ACC, cpu / 4);
    if (supports(PeClass::MMULT_ACC, k)) m.set(k, bucket(sz), PeClass::MMULT_ACC, cpu / 4);
  };
  put(KernelName::FFT, SizeKey{256}, 180'000);
  put(KernelName::FFT, SizeKey{1024}, 960'000);
  put(KernelName::IFFT, SizeKey{256}, 190'000);
  put(KernelName::ZIP, SizeKey{256}, 40'000);
  put(KernelName::GEMM, SizeKey{32, 32, 32}, 300'000);
  put(KernelName::GEMM, SizeKey{64, 64, 64}, 2'100'000);
  put(KernelName::CONV2D, SizeKey{64, 64, 3}, 5'000'000);
  return m;
}

std::shared_ptr<Task> bare_task(uint64_t id, KernelName k, SizeKey sz, TimeNs enq) {
  auto t = std::make_shared<Task>();
  t->task_id = id;
  t->kernel = {k, std::move(sz)};
  t->supported_types = support_set(k);
  t->enqueue_ts = enq;
  return t;
}

ScheduleSnapshot make_snapshot(const std::vector<std::shared_ptr<Task>>& tasks,
                               const std::vector<std::pair<PeClass, TimeNs>>& pes,
                               const CostModel* model, TimeNs now = 0) {
  ScheduleSnapshot s;
  s.ready = tasks;
  for (size_t i = 0; i < pes.size(); ++i) s.pes.push_back({int(i), pes[i].first, pes[i].second});
  s.model = model;
  s.now = now;
  return s;
}

// ---- independent oracles -------------------------------------------------

// per-task FIFO argmin over supporting PEs (ties: lowest pe id)
std::vector<Assignment> eft_oracle(const ScheduleSnapshot& snap) {
  std::vector<TimeNs> busy;
  for (const auto& pe : snap.pes) busy.push_back(pe.busy_until);
  std::vector<Assignment> out;
  for (const auto& t : snap.ready) {
    int best = -1;
    TimeNs bf = 0, bs = 0;
    for (size_t i = 0; i < snap.pes.size(); ++i) {
      auto est = task_estimate(*t, snap.pes[i].cls, *snap.model);
      if (!est) continue;
      TimeNs start = std::max(snap.now, busy[i]);
      TimeNs fin = start + *est;
      if (best < 0 || fin < bf || (fin == bf && snap.pes[i].pe_id < snap.pes[size_t(best)].pe_id)) {
        best = int(i);
        bf = fin;
        bs = start;
      }
    }
    REQUIRE(best >= 0);
    busy[size_t(best)] = bf;
    out.push_back({t->task_id, snap.pes[size_t(best)].pe_id, bs, bf});
  }
  return out;
}

// repeated global argmin over (task, pe) pairs; ties by enqueue_ts, task_id, pe_id
std::vector<Assignment> etf_oracle(const ScheduleSnapshot& snap) {
  std::vector<TimeNs> busy;
  for (const auto& pe : snap.pes) busy.push_back(pe.busy_until);
  std::vector<std::shared_ptr<Task>> rem = snap.ready;
  std::vector<Assignment> out;
  while (!rem.empty()) {
    int bt = -1, bp = -1;
    TimeNs bf = 0, bs = 0;
    for (size_t ti = 0; ti < rem.size(); ++ti) {
      for (size_t pi = 0; pi < snap.pes.size(); ++pi) {
        auto est = task_estimate(*rem[ti], snap.pes[pi].cls, *snap.model);
        if (!est) continue;
        TimeNs start = std::max(snap.now, busy[pi]);
        TimeNs fin = start + *est;
        bool better;
        if (bt < 0) {
          better = true;
        } else if (fin != bf) {
          better = fin < bf;
        } else {
          auto cand = std::make_tuple(rem[ti]->enqueue_ts, rem[ti]->task_id, snap.pes[pi].pe_id);
          auto cur = std::make_tuple(rem[size_t(bt)]->enqueue_ts, rem[size_t(bt)]->task_id,
                                     snap.pes[size_t(bp)].pe_id);
          better = cand < cur;
        }
        if (better) {
          bt = int(ti);
          bp = int(pi);
          bf = fin;
          bs = start;
        }
      }
    }
    REQUIRE(bt >= 0);
    busy[size_t(bp)] = bf;
    out.push_back({rem[size_t(bt)]->task_id, snap.pes[size_t(bp)].pe_id, bs, bf});
    rem.erase(rem.begin() + bt);
  }
  return out;
}

bool same_assignments(const std::vector<Assignment>& a, const std::vector<Assignment>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].task_id != b[i].task_id || a[i].pe_id != b[i].pe_id ||
        a[i].predicted_start != b[i].predicted_start ||
        a[i].predicted_finish != b[i].predicted_finish)
      return false;
  return true;
}

struct RandomCase {
  std::vector<std::shared_ptr<Task>> tasks;
  std::vector<std::pair<PeClass, TimeNs>> pes;
};

RandomCase random_case(uint64_t& rng) {
  static const std::vector<std::pair<KernelName, SizeKey>> kernels = {
      {KernelName::FFT, SizeKey{256}},  {KernelName::FFT, SizeKey{1024}},
      {KernelName::IFFT, SizeKey{256}}, {KernelName::ZIP, SizeKey{256}},
      {KernelName::GEMM, SizeKey{32, 32, 32}}, {KernelName::GEMM, SizeKey{64, 64, 64}},
  };
  static const std::vector<PeClass> extra_pes = {PeClass::CPU, PeClass::FFT_ACC,
                                                 PeClass::MMULT_ACC, PeClass::GPU_ACC};
  RandomCase rc;
  int n_tasks = 1 + int(apps::next_unit(rng) * 6);
  int n_pes = 1 + int(apps::next_unit(rng) * 4);
  if (n_tasks > 6) n_tasks = 6;
  if (n_pes > 4) n_pes = 4;
  rc.pes.push_back({PeClass::CPU, TimeNs(apps::next_unit(rng) * 2e6)});
  for (int i = 1; i < n_pes; ++i)
    rc.pes.push_back({extra_pes[size_t(apps::next_unit(rng) * extra_pes.size()) % extra_pes.size()],
                      TimeNs(apps::next_unit(rng) * 2e6)});
  for (int i = 0; i < n_tasks; ++i) {
    auto [k, sz] = kernels[size_t(apps::next_unit(rng) * kernels.size()) % kernels.size()];
    // coarse timestamps so enqueue ties actually happen
    rc.tasks.push_back(bare_task(uint64_t(i + 1), k, sz, TimeNs(apps::next_unit(rng) * 4) * 100));
  }
  return rc;
}

}  // namespace

TEST_CASE("RR cycles over supporting PEs and persists its cursor") {
  auto model = test_model();
  auto rr = make_scheduler(SchedulerKind::RR);

  std::vector<std::shared_ptr<Task>> tasks;
  for (int i = 0; i < 4; ++i)
    tasks.push_back(bare_task(uint64_t(i + 1), KernelName::FFT, SizeKey{256}, i));
  auto snap = make_snapshot(tasks, {{PeClass::CPU, 0}, {PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}},
                            &model);
  auto asg = rr->schedule(snap);
  REQUIRE(asg.size() == 4);
  CHECK(asg[0].pe_id == 0);
  CHECK(asg[1].pe_id == 1);
  CHECK(asg[2].pe_id == 2);
  CHECK(asg[3].pe_id == 0);

  // cursor persists: next call starts after the last assignment
  auto more = rr->schedule(make_snapshot({bare_task(9, KernelName::FFT, SizeKey{256}, 9)},
                                         {{PeClass::CPU, 0}, {PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}},
                                         &model));
  REQUIRE(more.size() == 1);
  CHECK(more[0].pe_id == 1);
}

TEST_CASE("RR skips PEs that do not support the kernel") {
  auto model = test_model();
  auto rr = make_scheduler(SchedulerKind::RR);
  std::vector<std::shared_ptr<Task>> tasks = {
      bare_task(1, KernelName::GEMM, SizeKey{32, 32, 32}, 0),
      bare_task(2, KernelName::GEMM, SizeKey{32, 32, 32}, 1)};
  auto asg = rr->schedule(make_snapshot(tasks, {{PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}}, &model));
  REQUIRE(asg.size() == 2);
  CHECK(asg[0].pe_id == 0);
  CHECK(asg[1].pe_id == 0);
}

TEST_CASE("RR balances a long stream within 1 across universal PEs") {
  auto model = test_model();
  auto rr = make_scheduler(SchedulerKind::RR);
  uint64_t rng = 77;
  std::map<int, int> counts;
  for (int i = 0; i < 1000; ++i) {
    KernelName k = apps::next_unit(rng) < 0.5 ? KernelName::FFT : KernelName::GEMM;
    SizeKey sz = k == KernelName::FFT ? SizeKey{256} : SizeKey{32, 32, 32};
    auto asg = rr->schedule(make_snapshot({bare_task(uint64_t(i + 1), k, sz, i)},
                                          {{PeClass::CPU, 0}, {PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}},
                                          &model));
    REQUIRE(asg.size() == 1);
    counts[asg[0].pe_id]++;
  }
  // pe 0 and pe 1 are CPUs and support everything
  CHECK(std::abs(counts[0] - counts[1]) <= 1);
}

TEST_CASE("EFT: busy fast PE loses to an idle slower one") {
  auto model = test_model();
  auto eft = make_scheduler(SchedulerKind::EFT);
  // CPU idle, est 180us; FFT_ACC est 22.5us but busy for 200us more
  auto asg = eft->schedule(make_snapshot({bare_task(1, KernelName::FFT, SizeKey{256}, 0)},
                                         {{PeClass::CPU, 0}, {PeClass::FFT_ACC, 200'000}},
                                         &model));
  REQUIRE(asg.size() == 1);
  CHECK(asg[0].pe_id == 0);
  CHECK(asg[0].predicted_finish == 180'000);
}

TEST_CASE("EFT: idle accelerator dominates") {
  auto model = test_model();
  auto eft = make_scheduler(SchedulerKind::EFT);
  auto asg = eft->schedule(make_snapshot({bare_task(1, KernelName::FFT, SizeKey{256}, 0)},
                                         {{PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}}, &model));
  REQUIRE(asg.size() == 1);
  CHECK(asg[0].pe_id == 1);
}

TEST_CASE("ETF commits the globally earliest finishing pair first") {
  auto model = test_model();
  auto etf = make_scheduler(SchedulerKind::ETF);
  // FFT on ACC finishes at 22.5us, GEMM on CPU at 300us: FFT commits first
  std::vector<std::shared_ptr<Task>> tasks = {
      bare_task(1, KernelName::GEMM, SizeKey{32, 32, 32}, 0),
      bare_task(2, KernelName::FFT, SizeKey{256}, 1)};
  auto asg = etf->schedule(make_snapshot(tasks, {{PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}}, &model));
  REQUIRE(asg.size() == 2);
  CHECK(asg[0].task_id == 2);
  CHECK(asg[0].pe_id == 1);
  CHECK(asg[1].task_id == 1);
}

TEST_CASE("ETF degenerates to EFT for a single task") {
  auto model = test_model();
  auto etf = make_scheduler(SchedulerKind::ETF);
  auto eft = make_scheduler(SchedulerKind::EFT);
  auto mk = [&] {
    return make_snapshot({bare_task(1, KernelName::IFFT, SizeKey{256}, 0)},
                         {{PeClass::CPU, 50'000}, {PeClass::FFT_ACC, 120'000}}, &model);
  };
  CHECK(same_assignments(etf->schedule(mk()), eft->schedule(mk())));
}

TEST_CASE("EFT and ETF match their exhaustive oracles on 200 random snapshots") {
  auto model = test_model();
  uint64_t rng = 20260810;
  for (int i = 0; i < 200; ++i) {
    RandomCase rc = random_case(rng);
    auto snap = make_snapshot(rc.tasks, rc.pes, &model, 1'000'000);
    auto eft = make_scheduler(SchedulerKind::EFT);
    CAPTURE(i);
    CHECK(same_assignments(eft->schedule(snap), eft_oracle(snap)));
    auto etf = make_scheduler(SchedulerKind::ETF);
    CHECK(same_assignments(etf->schedule(snap), etf_oracle(snap)));
  }
}

TEST_CASE("HEFT_RT ranks heavy tasks first") {
  auto model = test_model();
  auto heft = make_scheduler(SchedulerKind::HEFT_RT);
  // mean(FFT 256) ~ 101k over {CPU, FFT_ACC}; mean(GEMM 32) ~ 187k over {CPU, MMULT_ACC}
  std::vector<std::shared_ptr<Task>> tasks = {
      bare_task(1, KernelName::FFT, SizeKey{256}, 0),
      bare_task(2, KernelName::GEMM, SizeKey{32, 32, 32}, 1)};
  auto asg = heft->schedule(make_snapshot(
      tasks, {{PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}, {PeClass::MMULT_ACC, 0}}, &model));
  REQUIRE(asg.size() == 2);
  CHECK(asg[0].task_id == 2);
}

TEST_CASE("HEFT_RT with equal ranks degenerates to FIFO = EFT") {
  auto model = test_model();
  auto heft = make_scheduler(SchedulerKind::HEFT_RT);
  auto eft = make_scheduler(SchedulerKind::EFT);
  std::vector<std::shared_ptr<Task>> tasks;
  for (int i = 0; i < 5; ++i)
    tasks.push_back(bare_task(uint64_t(i + 1), KernelName::FFT, SizeKey{256}, i));
  auto mk = [&] {
    return make_snapshot(tasks, {{PeClass::CPU, 0}, {PeClass::CPU, 0}, {PeClass::FFT_ACC, 0}},
                         &model);
  };
  CHECK(same_assignments(heft->schedule(mk()), eft->schedule(mk())));
}

TEST_CASE("HEFT_RT honors precomputed upward ranks") {
  auto model = test_model();
  auto heft = make_scheduler(SchedulerKind::HEFT_RT);
  // B carries a big upward rank from its heavy successor; the independent
  // task has a bigger own cost but no uplift
  auto b = bare_task(1, KernelName::ZIP, SizeKey{256}, 0);
  b->rank_hint = 2'500'000;
  auto c = bare_task(2, KernelName::FFT, SizeKey{1024}, 1);
  auto asg = heft->schedule(make_snapshot({c, b}, {{PeClass::CPU, 0}}, &model));
  REQUIRE(asg.size() == 2);
  CHECK(asg[0].task_id == 1);
}

TEST_CASE("support safety and completeness over random snapshots, all heuristics") {
  auto model = test_model();
  uint64_t rng = 991;
  for (auto kind : {SchedulerKind::RR, SchedulerKind::EFT, SchedulerKind::ETF,
                    SchedulerKind::HEFT_RT}) {
    auto sched = make_scheduler(kind);
    for (int i = 0; i < 50; ++i) {
      RandomCase rc = random_case(rng);
      auto snap = make_snapshot(rc.tasks, rc.pes, &model, 500'000);
      auto asg = sched->schedule(snap);
      CHECK(asg.size() == rc.tasks.size());  // completeness
      std::set<uint64_t> seen;
      for (const auto& a : asg) {
        CHECK(seen.insert(a.task_id).second);  // exactly one assignment
        const auto& task = *std::find_if(rc.tasks.begin(), rc.tasks.end(),
                                         [&](const auto& t) { return t->task_id == a.task_id; });
        CHECK(supports(snap.pes[size_t(a.pe_id)].cls, task->kernel.name));
        CHECK(a.predicted_finish > a.predicted_start);
        CHECK(a.predicted_start >= snap.now);
      }
    }
  }
}

TEST_CASE("scale invariance: scaling every cost leaves idle-snapshot decisions unchanged") {
  auto model = test_model();
  CostModel scaled;
  for (auto k : {KernelName::FFT, KernelName::IFFT, KernelName::ZIP, KernelName::GEMM}) {
    for (auto sz : {SizeKey{256}, SizeKey{1024}, SizeKey{32, 32, 32}, SizeKey{64, 64, 64}}) {
      for (int p = 0; p < kPeClassCount; ++p) {
        auto pe = static_cast<PeClass>(p);
        if (auto e = model.estimate({k, sz}, pe)) scaled.set(k, bucket(sz), pe, *e * 7);
      }
    }
  }
  uint64_t rng = 555;
  for (int i = 0; i < 40; ++i) {
    RandomCase rc = random_case(rng);
    for (auto& pe : rc.pes) pe.second = 0;  // idle PEs
    for (auto kind : {SchedulerKind::EFT, SchedulerKind::ETF, SchedulerKind::HEFT_RT}) {
      auto s1 = make_scheduler(kind)->schedule(make_snapshot(rc.tasks, rc.pes, &model));
      auto s2 = make_scheduler(kind)->schedule(make_snapshot(rc.tasks, rc.pes, &scaled));
      REQUIRE(s1.size() == s2.size());
      for (size_t j = 0; j < s1.size(); ++j) {
        CHECK(s1[j].task_id == s2[j].task_id);
        CHECK(s1[j].pe_id == s2[j].pe_id);
      }
    }
  }
}
