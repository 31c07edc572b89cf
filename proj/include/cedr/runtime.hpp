#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cedr/config.hpp"
#include "cedr/cost_model.hpp"
#include "cedr/dag.hpp"
#include "cedr/kernels.hpp"
#include "cedr/log.hpp"
#include "cedr/schedule.hpp"
#include "cedr/types.hpp"

namespace cedr {

class Runtime;

enum class AppMode { API, DAG };
const char* to_string(AppMode m);

// Handed to an API-mode application entry function, which runs on its own
// system thread. The app reads its parameters here and reports its output
// digest before returning.
struct AppContext {
  Runtime& rt;
  uint32_t app_id = 0;
  nlohmann::json params;
  uint64_t seed = 0;
  uint64_t digest = 0;
  std::atomic<uint64_t>* task_counter = nullptr;  // runtime-internal
};

struct AppSpec {
  std::function<void(AppContext&)> entry;  // API mode
  nlohmann::json default_params;
  // Emits the JSON DAG document of the application's DAG-mode twin; null
  // function when the app has no DAG form.
  std::function<nlohmann::json(const nlohmann::json& params)> dag_twin;
  // Frame size in megabits for the injection harness.
  std::function<double(const nlohmann::json& params)> frame_mb;
};

// Name -> entry function table standing in for shared-object loading, plus
// the composite functions DAG nodes may reference.
class AppRegistry {
 public:
  void add(const std::string& name, AppSpec spec);
  void add_composite(const std::string& name,
                     std::function<std::function<void()>(FrameArena&, const nlohmann::json&)> fn);

  const AppSpec* find(const std::string& name) const;
  std::vector<std::string> names() const;
  std::vector<std::string> composite_names() const;
  CompositeResolver resolver() const;

 private:
  std::map<std::string, AppSpec> specs_;
  std::map<std::string, std::function<std::function<void()>(FrameArena&, const nlohmann::json&)>>
      composites_;
};

enum class AppState { RECEIVED, RUNNING, DONE, INCOMPLETE, FAILED };
const char* to_string(AppState s);

struct AppStatus {
  uint32_t app_id = 0;
  std::string name;
  AppMode mode = AppMode::API;
  AppState state = AppState::RECEIVED;
  uint64_t task_count = 0;
};

struct RuntimeStatus {
  std::vector<AppStatus> apps;
  int live_api_threads = 0;
  size_t ready_len = 0;
  bool accepting = false;
};

// The daemon: one main event loop thread, one worker thread per PE, one
// thread per live API-mode application, plus an optional IPC acceptor owned
// by the embedding tool (see ipc.hpp).
class Runtime {
 public:
  Runtime(RuntimeConfig config, CostModel model, const AppRegistry* registry);
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  void start();
  bool running() const { return started_ && !stopped_; }

  // Stops accepting submissions, waits for in-flight apps up to the drain
  // timeout, joins every thread, and serializes the logs (returned and, when
  // config.log_path is nonempty, written there).
  LogBundle shutdown();

  // Asynchronous shutdown request (used by the IPC path). wait_shutdown_requested
  // blocks until some party has requested shutdown; wait_terminated until the
  // logs have been serialized.
  void request_shutdown();
  void wait_shutdown_requested();
  void wait_terminated();

  // Submits an application; API mode spawns its thread, DAG mode parses the
  // document (params: "dag_path", or generated from the registered twin).
  uint32_t submit(const std::string& app_name, AppMode mode, nlohmann::json params);

  RuntimeStatus status() const;

  // api-layer entry: stamps ids/timestamps and appends to the ready queue.
  void enqueue_task(uint32_t app_id, const std::shared_ptr<Task>& task);
  void enqueue_task(AppContext& ctx, const std::shared_ptr<Task>& task);

  TimeNs now() const;
  const RuntimeConfig& config() const { return config_; }
  const CostModel& cost_model() const { return model_; }

  // Blocks until the given app reaches a terminal state (tests / tools).
  AppState wait_app(uint32_t app_id);

 private:
  struct Worker {
    ProcessingElement pe;
    std::mutex mx;
    std::condition_variable cv;
    std::deque<std::shared_ptr<Task>> queue;
    bool stop = false;
    std::thread thread;
    std::vector<TaskRecord> records;
    std::vector<std::shared_ptr<Task>> error_tasks;  // for diagnostics
  };

  struct AppInstance {
    uint32_t app_id = 0;
    std::string name;
    AppMode mode = AppMode::API;
    nlohmann::json params;
    TimeNs arrival_ts = 0, start_ts = 0, end_ts = 0;
    AppState state = AppState::RECEIVED;
    std::atomic<uint64_t> task_count{0};
    std::atomic<uint64_t> tasks_retired{0};
    int64_t mgmt_ns = 0;
    int64_t sched_ns = 0;
    uint64_t digest = 0;
    std::string error;
    std::thread thread;  // API mode
    std::unique_ptr<AppDag> dag;
    std::unique_ptr<AppContext> ctx;
  };

  struct ControlMsg {
    enum class Kind { LAUNCH, APP_DONE } kind;
    uint32_t app_id = 0;
    uint64_t digest = 0;
    std::string error;
    TimeNs ts = 0;
  };

  void main_loop();
  void worker_loop(Worker& w);
  void app_thread_main(AppInstance& app);
  void wake_loop();
  // never takes apps_mx_, so it is safe under it and from app threads
  void enqueue_internal(std::atomic<uint64_t>* counter, uint32_t app_id,
                        const std::shared_ptr<Task>& task);
  void process_launch(AppInstance& app);
  void finalize_app(AppInstance& app, AppState state);
  void handle_completion(const std::shared_ptr<Task>& task);
  void dispatch(const std::vector<Assignment>& asg,
                std::vector<std::shared_ptr<Task>>& batch);
  void abort_task(const std::shared_ptr<Task>& task);
  void drain_epilogue();
  TaskRecord record_for(const Task& task, TaskResult result) const;
  AppInstance* app_ptr(uint32_t id);

  RuntimeConfig config_;
  CostModel model_;
  const AppRegistry* registry_;
  AcceleratorProfile profile_;
  std::unique_ptr<Scheduler> scheduler_;

  std::chrono::steady_clock::time_point epoch_;

  std::vector<std::unique_ptr<Worker>> workers_;
  std::thread loop_thread_;

  mutable std::mutex apps_mx_;
  std::map<uint32_t, std::unique_ptr<AppInstance>> apps_;
  std::condition_variable apps_cv_;
  uint32_t next_app_id_ = 1;

  std::atomic<uint64_t> next_task_id_{1};
  std::atomic<uint64_t> tasks_enqueued_{0};
  std::atomic<uint64_t> tasks_retired_{0};
  std::atomic<int> live_api_threads_{0};

  mutable std::mutex ready_mx_;
  std::deque<std::shared_ptr<Task>> ready_;

  std::mutex control_mx_;
  std::deque<ControlMsg> control_;

  std::mutex completion_mx_;
  std::deque<std::shared_ptr<Task>> completions_;

  std::mutex loop_mx_;
  std::condition_variable loop_cv_;
  bool wake_pending_ = false;

  std::mutex shutdown_mx_;
  std::condition_variable shutdown_cv_;
  bool shutdown_requested_ = false;
  bool terminated_ = false;

  std::atomic<bool> accepting_apps_{false};
  std::atomic<bool> accepting_tasks_{false};
  std::atomic<bool> started_{false};
  std::atomic<bool> stopped_{false};

  // main-loop owned accounting (total_mgmt also counts submit-side parsing)
  std::vector<SchedRecord> sched_records_;
  std::vector<TaskRecord> aborted_records_;
  std::atomic<int64_t> total_mgmt_ns_{0};
  int64_t total_sched_ns_ = 0;
  uint64_t sched_seq_ = 0;
  TimeNs first_arrival_ = -1;
};

}  // namespace cedr
