#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <set>
#include <thread>

#include "cedr/api.hpp"
#include "cedr/apps.hpp"
#include "cedr/ipc.hpp"
#include "cedr/log.hpp"
#include "cedr/runtime.hpp"

using namespace cedr;
using namespace std::chrono_literals;

namespace {

CostModel small_model() {
  CostModel m;
  auto put = [&](KernelName k, SizeKey sz, int64_t cpu) {
    m.set(k, bucket(sz), PeClass::CPU, cpu);
    if (supports(PeClass::FFT_ACC, k)) m.set(k, bucket(sz), PeClass::FFT_ACC, cpu / 8);
    if (supports(PeClass::GPU_ACC, k)) m.set(k, bucket(sz), PeClass::GPU_ACC, cpu / 4);
    if (supports(PeClass::MMULT_ACC, k)) m.set(k, bucket(sz), PeClass::MMULT_ACC, cpu / 4);
  };
  put(KernelName::FFT, SizeKey{64}, 50'000);
  put(KernelName::FFT, SizeKey{4096}, 50'000'000);  // deliberately slow bucket
  put(KernelName::IFFT, SizeKey{64}, 50'000);
  put(KernelName::ZIP, SizeKey{64}, 20'000);
  put(KernelName::GEMM, SizeKey{16, 16, 16}, 80'000);
  put(KernelName::CONV2D, SizeKey{16, 16, 3}, 500'000);
  return m;
}

RuntimeConfig test_config(std::vector<std::pair<PeClass, int>> roster,
                          SchedulerKind sched = SchedulerKind::EFT) {
  RuntimeConfig c;
  c.pe_roster = std::move(roster);
  c.scheduler = sched;
  c.log_path.clear();  // in-memory bundles only
  c.pin_threads = false;
  c.tick_us = 1000;
  return c;
}

// local registry with small purpose-built apps
AppRegistry test_registry() {
  AppRegistry reg;
  reg.add("blk_fft", {[](AppContext& ctx) {
                        ComplexBuffer in(64), out(64);
                        in[0] = cplx(1, 0);
                        cedr_fft(ctx, in.data(), out.data(), 64, true);
                        ctx.digest = apps::digest_cbuf(out);
                      },
                      {},
                      nullptr,
                      nullptr});
  reg.add("many_blk", {[](AppContext& ctx) {
                         auto in = apps::synth_complex(ctx.seed, 64);
                         ComplexBuffer out(64);
                         for (int i = 0; i < 10; ++i)
                           cedr_fft(ctx, in.data(), out.data(), 64, true);
                         ctx.digest = apps::digest_cbuf(out);
                       },
                       {},
                       nullptr,
                       nullptr});
  reg.add("slow_chain", {[](AppContext& ctx) {
                           ComplexBuffer in(4096), out(4096);
                           for (int i = 0; i < 20; ++i)
                             cedr_fft(ctx, in.data(), out.data(), 4096, true);
                         },
                         {},
                         nullptr,
                         nullptr});
  reg.add("orphan", {[](AppContext& ctx) {
                       // returns without waiting; flagged as an error
                       static ComplexBuffer in(64), out(64);
                       RuntimeExecutor ex(ctx);
                       ex.fft_nb(in.data(), out.data(), 64, false);
                     },
                     {},
                     nullptr,
                     nullptr});
  return reg;
}

std::string diamond_doc() {
  nlohmann::json nodes = nlohmann::json::array();
  auto node = [&](int id, std::vector<int> succ) {
    nodes.push_back({{"id", id},
                     {"kernel", "FFT"},
                     {"size", 64},
                     {"args", {{"in", "in_" + std::to_string(id)}, {"out", "out_" + std::to_string(id)}}},
                     {"successors", succ}});
  };
  node(0, {1, 2});
  node(1, {3});
  node(2, {3});
  node(3, {});
  return nlohmann::json{{"app_name", "diamond"}, {"nodes", nodes}}.dump();
}

}  // namespace

TEST_CASE("rejects a roster without CPUs and double shutdown") {
  auto reg = test_registry();
  CHECK_THROWS_AS(Runtime(test_config({{PeClass::FFT_ACC, 1}}), small_model(), &reg),
                  ConfigError);

  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();
  rt.shutdown();
  CHECK_THROWS_AS(rt.shutdown(), ConfigError);
}

TEST_CASE("startup coverage check rejects a model missing roster entries") {
  CostModel m;  // FFT only, no other kernels
  m.set(KernelName::FFT, SizeKey{64}, PeClass::CPU, 1000);
  auto reg = test_registry();
  CHECK_THROWS_AS(Runtime(test_config({{PeClass::CPU, 1}}), std::move(m), &reg), ConfigError);
}

TEST_CASE("idle start/shutdown produces an empty, well-formed log") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 2}, {PeClass::FFT_ACC, 1}}), small_model(), &reg);
  rt.start();
  auto bundle = rt.shutdown();
  CHECK(bundle.tasks.empty());
  CHECK(bundle.apps.empty());
  CHECK(bundle.summary.incomplete_apps == 0);
  CHECK(bundle.header.contains("cost_model_hash"));
}

TEST_CASE("blocking call equals the direct kernel result, any scheduler") {
  ComplexBuffer in(64), direct(64);
  in[0] = cplx(1, 0);
  kernels::fft(in.data(), direct.data(), 64, /*inverse=*/false);  // forward, as the app requests
  const uint64_t want = apps::digest_cbuf(direct);

  auto reg = test_registry();
  for (auto kind : {SchedulerKind::RR, SchedulerKind::EFT, SchedulerKind::ETF,
                    SchedulerKind::HEFT_RT}) {
    Runtime rt(test_config({{PeClass::CPU, 2}, {PeClass::FFT_ACC, 1}}, kind), small_model(), &reg);
    rt.start();
    uint32_t id = rt.submit("blk_fft", AppMode::API, {});
    CHECK(rt.wait_app(id) == AppState::DONE);
    auto bundle = rt.shutdown();
    REQUIRE(bundle.apps.size() == 1);
    CHECK(bundle.apps[0].digest == want);
    CHECK(bundle.apps[0].state == "DONE");
  }
}

TEST_CASE("unknown app submissions are rejected") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();
  CHECK_THROWS_AS(rt.submit("nope", AppMode::API, {}), std::invalid_argument);
  rt.shutdown();
}

TEST_CASE("100 blocking calls from 10 app threads: no lost completions") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 2}, {PeClass::FFT_ACC, 2}}), small_model(), &reg);
  rt.start();
  std::vector<uint32_t> ids;
  for (int i = 0; i < 10; ++i)
    ids.push_back(rt.submit("many_blk", AppMode::API, {{"seed", 100 + i}}));
  for (uint32_t id : ids) CHECK(rt.wait_app(id) == AppState::DONE);
  auto bundle = rt.shutdown();
  CHECK(bundle.tasks.size() == 100);
  for (const auto& t : bundle.tasks) CHECK(t.status == "OK");
  CHECK(check_task_accounting(bundle).empty());
  CHECK(check_pe_exclusive(bundle).empty());
  CHECK(check_kernel_support(bundle).empty());
  // task ids strictly increasing and unique
  std::set<uint64_t> seen;
  for (const auto& t : bundle.tasks) CHECK(seen.insert(t.task_id).second);
}

TEST_CASE("ten rapid submissions get distinct ids and all complete") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 2}}), small_model(), &reg);
  rt.start();
  std::set<uint32_t> ids;
  for (int i = 0; i < 10; ++i) ids.insert(rt.submit("blk_fft", AppMode::API, {}));
  CHECK(ids.size() == 10);
  for (uint32_t id : ids) CHECK(rt.wait_app(id) == AppState::DONE);
  auto bundle = rt.shutdown();
  CHECK(bundle.apps.size() == 10);
}

TEST_CASE("wait semantics: latched result, double wait, error propagation") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();

  ComplexBuffer in(64), out(64);
  auto ok1 = make_fft_task(in.data(), out.data(), 64, false);
  ComplexBuffer bad_in(12), bad_out(12);
  auto bad = make_fft_task(bad_in.data(), bad_out.data(), 12, false);  // not a power of two
  auto ok2 = make_fft_task(in.data(), out.data(), 64, false);

  rt.enqueue_task(1, ok1);
  rt.enqueue_task(1, bad);
  rt.enqueue_task(1, ok2);

  // wait on an already completed task returns immediately
  std::this_thread::sleep_for(100ms);
  std::vector<TaskHandle> handles;
  handles.emplace_back(ok1);
  handles.emplace_back(bad);
  handles.emplace_back(ok2);
  auto t0 = std::chrono::steady_clock::now();
  auto statuses = wait_all(handles);
  auto waited = std::chrono::steady_clock::now() - t0;
  CHECK(waited < 50ms);
  REQUIRE(statuses.size() == 3);
  CHECK(statuses[0] == TaskResult::OK);
  CHECK(statuses[1] == TaskResult::ERROR);
  CHECK(statuses[2] == TaskResult::OK);
  CHECK(handles[1].diagnostic().find("power of two") != std::string::npos);

  CHECK_THROWS_AS(handles[0].wait(), std::logic_error);  // double wait
  rt.shutdown();
}

TEST_CASE("DAG diamond executes topologically with FIFO sibling order") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();
  uint32_t id = rt.submit("diamond", AppMode::DAG, {{"dag", nlohmann::json::parse(diamond_doc())}});
  CHECK(rt.wait_app(id) == AppState::DONE);
  auto bundle = rt.shutdown();
  REQUIRE(bundle.tasks.size() == 4);

  auto dag = parse_dag(diamond_doc());
  CHECK(check_topological(bundle, dag, id).empty());
  CHECK(check_task_accounting(bundle).empty());

  // successors of A were queued in list order B, C
  const TaskRecord *b = nullptr, *c = nullptr;
  for (const auto& t : bundle.tasks) {
    if (t.node_id == 1) b = &t;
    if (t.node_id == 2) c = &t;
  }
  REQUIRE(b);
  REQUIRE(c);
  CHECK(b->dispatch_ns <= c->dispatch_ns);
}

TEST_CASE("malformed DAG submissions fail synchronously") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();
  CHECK_THROWS_AS(
      rt.submit("x", AppMode::DAG, {{"dag", nlohmann::json::parse(R"({"nodes":[
        {"id":0,"kernel":"FFT","size":64,"args":{"in":"a","out":"b"},"successors":[0]}]})")}}),
      ParseError);
  CHECK_THROWS_AS(rt.submit("x", AppMode::DAG, {{"dag_path", "/nonexistent/x.json"}}), ParseError);
  rt.shutdown();
}

TEST_CASE("zero drain timeout marks in-flight work INCOMPLETE") {
  auto reg = test_registry();
  auto cfg = test_config({{PeClass::CPU, 1}});
  cfg.drain_timeout_ms = 0;
  Runtime rt(cfg, small_model(), &reg);
  rt.start();
  rt.submit("slow_chain", AppMode::API, {});
  std::this_thread::sleep_for(30ms);  // let it get going
  auto bundle = rt.shutdown();
  REQUIRE(bundle.apps.size() == 1);
  CHECK(bundle.apps[0].state == "INCOMPLETE");
  CHECK(bundle.summary.incomplete_apps == 1);
}

TEST_CASE("graceful shutdown with a generous timeout finishes everything") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 2}}), small_model(), &reg);
  rt.start();
  for (int i = 0; i < 4; ++i) rt.submit("many_blk", AppMode::API, {{"seed", i}});
  auto bundle = rt.shutdown();  // no explicit waits: drain covers it
  CHECK(bundle.summary.incomplete_apps == 0);
  for (const auto& a : bundle.apps) CHECK(a.state == "DONE");
}

TEST_CASE("orphaned non-blocking tasks flag the app as failed") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();
  uint32_t id = rt.submit("orphan", AppMode::API, {});
  auto state = rt.wait_app(id);
  CHECK(state == AppState::FAILED);
  rt.shutdown();
}

TEST_CASE("live API threads track running API apps") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();
  rt.submit("slow_chain", AppMode::API, {});
  rt.submit("slow_chain", AppMode::API, {});
  std::this_thread::sleep_for(100ms);
  auto st = rt.status();
  int running = 0;
  for (const auto& a : st.apps)
    if (a.state == AppState::RUNNING) ++running;
  CHECK(st.live_api_threads == running);
  CHECK(st.live_api_threads == 2);
  rt.request_shutdown();
  auto cfg_bundle = rt.shutdown();
  (void)cfg_bundle;
}

TEST_CASE("logs round trip through the filesystem") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "cedr_test_logs";
  fs::remove_all(dir);

  auto reg = test_registry();
  auto cfg = test_config({{PeClass::CPU, 2}});
  cfg.log_path = dir.string();
  Runtime rt(cfg, small_model(), &reg);
  rt.start();
  uint32_t id = rt.submit("many_blk", AppMode::API, {});
  rt.wait_app(id);
  auto bundle = rt.shutdown();

  auto loaded = LogBundle::load(dir.string());
  CHECK(loaded.tasks.size() == bundle.tasks.size());
  CHECK(loaded.apps.size() == bundle.apps.size());
  CHECK(loaded.sched.size() == bundle.sched.size());
  CHECK(loaded.summary.total_mgmt_ns == bundle.summary.total_mgmt_ns);
  CHECK(loaded.apps[0].digest == bundle.apps[0].digest);
  CHECK(loaded.scheduler() == "EFT");
  fs::remove_all(dir);
}

TEST_CASE("scheduler invocations are recorded with queue lengths") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 2}}), small_model(), &reg);
  rt.start();
  uint32_t id = rt.submit("many_blk", AppMode::API, {});
  rt.wait_app(id);
  auto bundle = rt.shutdown();
  CHECK(!bundle.sched.empty());
  for (const auto& s : bundle.sched) {
    CHECK(s.batch >= 1);
    CHECK(s.queue_len >= s.batch);
    CHECK(s.decision_ns >= 0);
  }
  CHECK(bundle.summary.total_sched_ns > 0);
  CHECK(bundle.summary.total_mgmt_ns > 0);
}

TEST_CASE("IPC: submit, status, shutdown round trip and endpoint-busy error") {
  auto reg = test_registry();
  auto cfg = test_config({{PeClass::CPU, 2}});
  cfg.ipc_endpoint = "/tmp/cedr-test-" + std::to_string(::getpid()) + ".sock";
  Runtime rt(cfg, small_model(), &reg);
  rt.start();
  IpcServer server(rt, cfg.ipc_endpoint);
  server.start();

  // a second server on the same endpoint is rejected
  IpcServer dup(rt, cfg.ipc_endpoint);
  CHECK_THROWS_AS(dup.start(), ConfigError);

  LogBundle bundle;
  std::thread daemon([&] {
    rt.wait_shutdown_requested();
    bundle = rt.shutdown();
  });

  IpcClient client(cfg.ipc_endpoint);
  auto id = client.submit("blk_fft", AppMode::API, {});
  CHECK(id >= 1);
  auto bad = client.request({{"cmd", "submit"}, {"app", "nope"}, {"mode", "API"}});
  CHECK_FALSE(bad.value("ok", true));
  CHECK(bad["error"].get<std::string>().find("unknown app") != std::string::npos);

  for (;;) {
    auto st = client.status();
    REQUIRE(st.value("ok", false));
    bool done = true;
    for (const auto& a : st["apps"])
      if (a["state"] != "DONE" && a["state"] != "FAILED") done = false;
    if (done && !st["apps"].empty()) break;
    std::this_thread::sleep_for(5ms);
  }
  auto reply = client.shutdown();
  CHECK(reply.value("ok", false));
  daemon.join();
  server.stop();
  CHECK(bundle.apps.size() == 1);
  // endpoint is gone after stop
  CHECK_THROWS_AS(client.status(), ConnectionError);
}

TEST_CASE("enqueue after shutdown raises a connection error") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 1}}), small_model(), &reg);
  rt.start();
  rt.shutdown();
  ComplexBuffer in(64), out(64);
  CHECK_THROWS_AS(rt.enqueue_task(1, make_fft_task(in.data(), out.data(), 64, false)),
                  ConnectionError);
  CHECK_THROWS_AS(rt.submit("blk_fft", AppMode::API, {}), ConnectionError);
}

TEST_CASE("RR over four FFT tasks exercises the whole roster") {
  auto reg = test_registry();
  Runtime rt(test_config({{PeClass::CPU, 3}, {PeClass::FFT_ACC, 1}}, SchedulerKind::RR),
             small_model(), &reg);
  rt.start();
  std::vector<std::shared_ptr<Task>> tasks;
  ComplexBuffer in(64);
  std::vector<ComplexBuffer> outs(8, ComplexBuffer(64));
  for (int i = 0; i < 8; ++i) {
    auto t = make_fft_task(in.data(), outs[size_t(i)].data(), 64, false);
    rt.enqueue_task(1, t);
    tasks.push_back(t);
  }
  for (auto& t : tasks) TaskHandle(t).wait();
  auto bundle = rt.shutdown();
  std::set<int> pes;
  for (const auto& t : bundle.tasks) pes.insert(t.pe_id);
  CHECK(pes == std::set<int>{0, 1, 2, 3});  // all four workers served tasks
}
