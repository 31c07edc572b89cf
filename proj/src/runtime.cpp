#include "cedr/runtime.hpp"

#include <pthread.h>
#include <sys/prctl.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cedr {

namespace {

std::string iso8601_now() {
  char buf[64];
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void try_pin(std::thread& th, int core) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core, &set);
  pthread_setaffinity_np(th.native_handle(), sizeof set, &set);
}

}  // namespace

const char* to_string(AppMode m) { return m == AppMode::API ? "API" : "DAG"; }

const char* to_string(AppState s) {
  switch (s) {
    case AppState::RECEIVED: return "RECEIVED";
    case AppState::RUNNING: return "RUNNING";
    case AppState::DONE: return "DONE";
    case AppState::INCOMPLETE: return "INCOMPLETE";
    case AppState::FAILED: return "FAILED";
  }
  return "?";
}

void AppRegistry::add(const std::string& name, AppSpec spec) {
  specs_[name] = std::move(spec);
}

void AppRegistry::add_composite(
    const std::string& name,
    std::function<std::function<void()>(FrameArena&, const nlohmann::json&)> fn) {
  composites_[name] = std::move(fn);
}

const AppSpec* AppRegistry::find(const std::string& name) const {
  auto it = specs_.find(name);
  return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> AppRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : specs_) out.push_back(k);
  return out;
}

std::vector<std::string> AppRegistry::composite_names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : composites_) out.push_back(k);
  return out;
}

CompositeResolver AppRegistry::resolver() const {
  return [this](const std::string& fn, FrameArena& arena, const nlohmann::json& args) {
    auto it = composites_.find(fn);
    if (it == composites_.end())
      throw ParseError("dag: unknown composite function '" + fn + "'");
    return it->second(arena, args);
  };
}

Runtime::Runtime(RuntimeConfig config, CostModel model, const AppRegistry* registry)
    : config_(std::move(config)), model_(std::move(model)), registry_(registry) {
  config_.validate();
  model_.set_composite_default_ns(config_.composite_cost_ns);
  profile_.model = &model_;
  profile_.charge_mode = config_.charge_mode;
  scheduler_ = make_scheduler(config_.scheduler);
  epoch_ = std::chrono::steady_clock::now();

  // startup coverage check: schedulers may not discover missing entries later
  for (const auto& [cls, count] : config_.pe_roster) {
    if (count > 0 && !model_.covers(cls))
      throw ConfigError(std::string("cost model does not cover PE type ") + to_string(cls));
  }
}

Runtime::~Runtime() {
  if (started_ && !stopped_) {
    try {
      shutdown();
    } catch (...) {
    }
  }
}

TimeNs Runtime::now() const {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now() - epoch_)
      .count();
}

void Runtime::start() {
  if (started_) throw ConfigError("runtime already started");
  started_ = true;
  accepting_apps_ = true;
  accepting_tasks_ = true;

  int pe_id = 0;
  for (const auto& [cls, count] : config_.pe_roster) {
    for (int i = 0; i < count; ++i) {
      auto w = std::make_unique<Worker>();
      w->pe.id = pe_id++;
      w->pe.pe_type = cls;
      workers_.push_back(std::move(w));
    }
  }

  const unsigned cores = std::thread::hardware_concurrency();
  const bool pin = config_.pin_threads && cores >= unsigned(workers_.size()) + 1;
  if (config_.pin_threads && !pin)
    std::fprintf(stderr,
                 "cedr: roster of %zu PEs exceeds %u host cores, running unpinned\n",
                 workers_.size(), cores);

  for (auto& w : workers_) {
    Worker* wp = w.get();
    w->thread = std::thread([this, wp] { worker_loop(*wp); });
    if (pin) try_pin(w->thread, 1 + wp->pe.id);  // core 0 stays with the main loop
  }
  loop_thread_ = std::thread([this] { main_loop(); });
  if (pin) try_pin(loop_thread_, 0);
}

void Runtime::wake_loop() {
  {
    std::lock_guard<std::mutex> lk(loop_mx_);
    wake_pending_ = true;
  }
  loop_cv_.notify_one();
}

void Runtime::request_shutdown() {
  accepting_apps_ = false;
  {
    std::lock_guard<std::mutex> lk(shutdown_mx_);
    shutdown_requested_ = true;
  }
  shutdown_cv_.notify_all();
  wake_loop();
}

void Runtime::wait_shutdown_requested() {
  std::unique_lock<std::mutex> lk(shutdown_mx_);
  shutdown_cv_.wait(lk, [&] { return shutdown_requested_; });
}

void Runtime::wait_terminated() {
  std::unique_lock<std::mutex> lk(shutdown_mx_);
  shutdown_cv_.wait(lk, [&] { return terminated_; });
}

uint32_t Runtime::submit(const std::string& app_name, AppMode mode, nlohmann::json params) {
  if (!running() || !accepting_apps_)
    throw ConnectionError("runtime is not accepting submissions");
  const AppSpec* spec = registry_ ? registry_->find(app_name) : nullptr;
  if (mode == AppMode::API) {
    if (!spec) throw std::invalid_argument("unknown app '" + app_name + "'");
  } else {
    if (!params.contains("dag_path") && !params.contains("dag") && !(spec && spec->dag_twin))
      throw std::invalid_argument("DAG submission needs dag_path (or a registered twin)");
  }

  auto app = std::make_unique<AppInstance>();
  app->name = app_name;
  app->mode = mode;
  app->params = spec && spec->default_params.is_object() ? spec->default_params
                                                         : nlohmann::json::object();
  if (params.is_object())
    for (auto& [k, v] : params.items()) app->params[k] = v;
  app->arrival_ts = now();

  if (mode == AppMode::DAG) {
    // receive-and-parse happens on the submission path; parse errors travel
    // back to the submitter and the cost is booked as management time
    const TimeNs t0 = now();
    std::string text;
    if (app->params.contains("dag_path")) {
      std::ifstream f(app->params["dag_path"].get<std::string>());
      if (!f) throw ParseError("dag: cannot open " + app->params["dag_path"].get<std::string>());
      text.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    } else if (app->params.contains("dag")) {
      text = app->params["dag"].dump();
    } else {
      text = spec->dag_twin(app->params).dump();
    }
    app->dag = std::make_unique<AppDag>(
        parse_dag(text, registry_ ? registry_->composite_names() : std::vector<std::string>{}));

    std::vector<PeClass> roster_classes;
    for (const auto& w : workers_)
      if (std::find(roster_classes.begin(), roster_classes.end(), w->pe.pe_type) ==
          roster_classes.end())
        roster_classes.push_back(w->pe.pe_type);
    compute_upward_ranks(*app->dag, model_, roster_classes);
    app->mgmt_ns += now() - t0;
    total_mgmt_ns_.fetch_add(now() - t0);
  }

  uint32_t id;
  {
    std::lock_guard<std::mutex> lk(apps_mx_);
    id = next_app_id_++;
    app->app_id = id;
    if (first_arrival_ < 0) first_arrival_ = app->arrival_ts;
    apps_[id] = std::move(app);
  }
  {
    std::lock_guard<std::mutex> lk(control_mx_);
    control_.push_back({ControlMsg::Kind::LAUNCH, id, 0, {}, now()});
  }
  wake_loop();
  return id;
}

Runtime::AppInstance* Runtime::app_ptr(uint32_t id) {
  auto it = apps_.find(id);
  return it == apps_.end() ? nullptr : it->second.get();
}

RuntimeStatus Runtime::status() const {
  RuntimeStatus st;
  st.live_api_threads = live_api_threads_.load();
  st.accepting = accepting_apps_;
  {
    std::lock_guard<std::mutex> lk(apps_mx_);
    for (const auto& [id, app] : apps_) {
      st.apps.push_back({id, app->name, app->mode, app->state, app->task_count.load()});
    }
  }
  {
    std::lock_guard<std::mutex> lk(ready_mx_);
    st.ready_len = ready_.size();
  }
  return st;
}

AppState Runtime::wait_app(uint32_t app_id) {
  std::unique_lock<std::mutex> lk(apps_mx_);
  apps_cv_.wait(lk, [&] {
    auto it = apps_.find(app_id);
    if (it == apps_.end()) return true;
    auto s = it->second->state;
    return s == AppState::DONE || s == AppState::INCOMPLETE || s == AppState::FAILED;
  });
  auto it = apps_.find(app_id);
  return it == apps_.end() ? AppState::FAILED : it->second->state;
}

void Runtime::enqueue_internal(std::atomic<uint64_t>* counter, uint32_t app_id,
                               const std::shared_ptr<Task>& task) {
  if (!accepting_tasks_) throw ConnectionError("runtime terminated");
  task->task_id = next_task_id_.fetch_add(1);
  task->app_id = app_id;

  // optional accelerator FFT size ceiling
  if (config_.accel_max_fft_points > 0 && !task->is_composite() &&
      (task->kernel.name == KernelName::FFT || task->kernel.name == KernelName::IFFT) &&
      task->kernel.size_key.dims.at(0) > config_.accel_max_fft_points) {
    PeSupport s;
    s.add(PeClass::CPU);
    task->supported_types = s;
  }
  if (task->supported_types.empty() || !task->supported_types.contains(PeClass::CPU))
    task->supported_types.add(PeClass::CPU);

  task->enqueue_ts = now();
  task->state = TaskState::READY;
  if (counter) counter->fetch_add(1);
  tasks_enqueued_.fetch_add(1);
  {
    std::lock_guard<std::mutex> lk(ready_mx_);
    ready_.push_back(task);
  }
  wake_loop();
}

void Runtime::enqueue_task(uint32_t app_id, const std::shared_ptr<Task>& task) {
  std::atomic<uint64_t>* counter = nullptr;
  {
    std::lock_guard<std::mutex> lk(apps_mx_);
    if (AppInstance* app = app_ptr(app_id)) counter = &app->task_count;
  }
  enqueue_internal(counter, app_id, task);
}

void Runtime::enqueue_task(AppContext& ctx, const std::shared_ptr<Task>& task) {
  enqueue_internal(ctx.task_counter, ctx.app_id, task);
}

void Runtime::app_thread_main(AppInstance& app) {
  live_api_threads_.fetch_add(1);
  std::string error;
  uint64_t digest = 0;
  try {
    app.ctx = std::make_unique<AppContext>(
        AppContext{*this, app.app_id, app.params, app.params.value("seed", uint64_t(app.app_id)),
                   0, &app.task_count});
    registry_->find(app.name)->entry(*app.ctx);
    digest = app.ctx->digest;
  } catch (const std::exception& e) {
    error = e.what();
  }
  live_api_threads_.fetch_sub(1);
  {
    std::lock_guard<std::mutex> lk(control_mx_);
    control_.push_back({ControlMsg::Kind::APP_DONE, app.app_id, digest, error, now()});
  }
  wake_loop();
}

void Runtime::process_launch(AppInstance& app) {
  app.start_ts = now();
  app.state = AppState::RUNNING;
  if (app.mode == AppMode::API) {
    app.thread = std::thread([this, &app] { app_thread_main(app); });
    return;
  }
  // DAG mode: document was parsed at submission; release the head nodes
  auto resolver = registry_->resolver();
  for (int head : app.dag->head_ids) {
    app.dag->node(head).state = TaskState::READY;
    enqueue_internal(&app.task_count, app.app_id, make_dag_task(*app.dag, head, resolver));
  }
}

void Runtime::finalize_app(AppInstance& app, AppState state) {
  app.state = state;
  if (app.end_ts == 0) app.end_ts = now();
  if (app.thread.joinable()) app.thread.join();
  if (app.mode == AppMode::DAG && app.dag && app.digest == 0)
    app.digest = app.dag->arena->digest();
  apps_cv_.notify_all();
}

void Runtime::handle_completion(const std::shared_ptr<Task>& task) {
  tasks_retired_.fetch_add(1);
  std::lock_guard<std::mutex> lk(apps_mx_);
  AppInstance* app = app_ptr(task->app_id);
  if (!app) return;
  app->tasks_retired.fetch_add(1);

  if (app->mode != AppMode::DAG || !app->dag) return;
  if (task->node_id < 0) return;

  auto resolver = registry_->resolver();
  for (int next : release_ready(*app->dag, task->node_id)) {
    app->dag->node(next).state = TaskState::READY;
    enqueue_internal(&app->task_count, app->app_id, make_dag_task(*app->dag, next, resolver));
  }
  if (app->dag->completed_count == int(app->dag->nodes.size())) {
    app->end_ts = task->complete_ts;
    finalize_app(*app, AppState::DONE);
  }
}

void Runtime::dispatch(const std::vector<Assignment>& asg,
                       std::vector<std::shared_ptr<Task>>& batch) {
  std::map<uint64_t, std::shared_ptr<Task>> by_id;
  for (auto& t : batch) by_id[t->task_id] = t;
  for (const auto& a : asg) {
    auto it = by_id.find(a.task_id);
    if (it == by_id.end()) continue;
    Worker& w = *workers_.at(size_t(a.pe_id));
    w.pe.busy_until = std::max(w.pe.busy_until, a.predicted_finish);
    w.pe.assigned_count++;
    {
      std::lock_guard<std::mutex> lk(w.mx);
      w.queue.push_back(it->second);
    }
    w.cv.notify_one();
    by_id.erase(it);
  }
  // tasks a scheduler failed to place would stall forever; re-queue them
  if (!by_id.empty()) {
    std::lock_guard<std::mutex> lk(ready_mx_);
    for (auto& [id, t] : by_id) ready_.push_back(t);
  }
}

void Runtime::main_loop() {
  const auto tick = std::chrono::microseconds(config_.tick_us);
  TimeNs drain_deadline = -1;

  for (;;) {
    {
      std::unique_lock<std::mutex> lk(loop_mx_);
      loop_cv_.wait_for(lk, tick, [&] { return wake_pending_; });
      wake_pending_ = false;
    }

    const TimeNs iter_t0 = now();
    int64_t decision_ns_iter = 0;

    // capture control first, completions second: a captured APP_DONE then
    // implies every completion it observed is in the captured batch, so
    // processing completions first keeps the orphan check sound
    std::deque<ControlMsg> control;
    {
      std::lock_guard<std::mutex> lk(control_mx_);
      control.swap(control_);
    }
    std::deque<std::shared_ptr<Task>> done;
    {
      std::lock_guard<std::mutex> lk(completion_mx_);
      done.swap(completions_);
    }
    if (!done.empty()) {
      const TimeNs seg0 = now();
      std::map<uint32_t, int> per_app;
      for (auto& t : done) {
        ++per_app[t->app_id];
        handle_completion(t);
      }
      const int64_t seg = now() - seg0;
      std::lock_guard<std::mutex> lk(apps_mx_);
      for (auto& [app_id, cnt] : per_app)
        if (AppInstance* app = app_ptr(app_id))
          app->mgmt_ns += seg * cnt / int64_t(done.size());
    }

    // control messages: launches and app exits
    for (auto& msg : control) {
      const TimeNs seg0 = now();
      std::lock_guard<std::mutex> lk(apps_mx_);
      AppInstance* app = app_ptr(msg.app_id);
      if (!app) continue;
      if (msg.kind == ControlMsg::Kind::LAUNCH) {
        try {
          process_launch(*app);
        } catch (const std::exception& e) {
          app->error = e.what();
          finalize_app(*app, AppState::FAILED);
        }
      } else {  // APP_DONE
        app->digest = msg.digest;
        app->end_ts = msg.ts;
        if (!msg.error.empty()) {
          app->error = msg.error;
          finalize_app(*app, AppState::FAILED);
        } else if (app->tasks_retired.load() < app->task_count.load()) {
          app->error = "application exited with unwaited tasks";
          finalize_app(*app, AppState::FAILED);
        } else {
          finalize_app(*app, AppState::DONE);
        }
      }
      app->mgmt_ns += now() - seg0;
    }

    // scheduling round
    std::vector<std::shared_ptr<Task>> batch;
    size_t queue_len = 0;
    {
      std::lock_guard<std::mutex> lk(ready_mx_);
      queue_len = ready_.size();
      size_t n = std::min(queue_len, size_t(config_.scheduler_batch_max));
      batch.assign(ready_.begin(), ready_.begin() + long(n));
      ready_.erase(ready_.begin(), ready_.begin() + long(n));
    }
    if (!batch.empty()) {
      ScheduleSnapshot snap;
      snap.ready = batch;
      snap.now = now();
      snap.model = &model_;
      snap.pes.reserve(workers_.size());
      for (const auto& w : workers_)
        snap.pes.push_back({w->pe.id, w->pe.pe_type, w->pe.busy_until});

      const TimeNs dec0 = now();
      auto assignments = scheduler_->schedule(snap);
      const int64_t decision = now() - dec0;
      decision_ns_iter += decision;
      total_sched_ns_ += decision;
      sched_records_.push_back({sched_seq_++, dec0, uint32_t(queue_len),
                                uint32_t(batch.size()), decision});
      {
        // decision time split across apps by their share of the batch
        std::map<uint32_t, int> per_app;
        for (const auto& t : batch) ++per_app[t->app_id];
        std::lock_guard<std::mutex> lk(apps_mx_);
        for (auto& [app_id, cnt] : per_app)
          if (AppInstance* app = app_ptr(app_id))
            app->sched_ns += decision * cnt / int64_t(batch.size());
      }

      const TimeNs disp0 = now();
      dispatch(assignments, batch);
      const int64_t disp = now() - disp0;
      {
        std::map<uint32_t, int> per_app;
        for (const auto& t : batch) ++per_app[t->app_id];
        std::lock_guard<std::mutex> lk(apps_mx_);
        for (auto& [app_id, cnt] : per_app)
          if (AppInstance* app = app_ptr(app_id))
            app->mgmt_ns += disp * cnt / int64_t(batch.size());
      }
    }

    total_mgmt_ns_ += (now() - iter_t0) - decision_ns_iter;

    if (shutdown_requested_) {
      if (drain_deadline < 0) drain_deadline = now() + config_.drain_timeout_ms * 1'000'000;
      bool all_terminal = true;
      {
        std::lock_guard<std::mutex> lk(apps_mx_);
        for (const auto& [id, app] : apps_) {
          if (app->state == AppState::RECEIVED || app->state == AppState::RUNNING) {
            all_terminal = false;
            break;
          }
        }
      }
      const bool quiesced = tasks_retired_.load() == tasks_enqueued_.load();
      if ((all_terminal && quiesced) || now() >= drain_deadline) break;
    }
  }

  drain_epilogue();
}

void Runtime::abort_task(const std::shared_ptr<Task>& task) {
  aborted_records_.push_back(record_for(*task, TaskResult::ERROR));
  aborted_records_.back().status = "INCOMPLETE";
  task->completion.signal(TaskResult::ERROR, "runtime terminated");
}

void Runtime::drain_epilogue() {
  accepting_tasks_ = false;

  std::vector<std::shared_ptr<Task>> leftovers;
  {
    std::lock_guard<std::mutex> lk(ready_mx_);
    leftovers.assign(ready_.begin(), ready_.end());
    ready_.clear();
  }
  for (auto& w : workers_) {
    std::lock_guard<std::mutex> lk(w->mx);
    leftovers.insert(leftovers.end(), w->queue.begin(), w->queue.end());
    w->queue.clear();
    w->stop = true;
  }
  for (auto& w : workers_) w->cv.notify_all();
  for (auto& w : workers_)
    if (w->thread.joinable()) w->thread.join();

  for (auto& t : leftovers) abort_task(t);

  // unblock and join whatever application threads remain
  std::lock_guard<std::mutex> lk(apps_mx_);
  for (auto& [id, app] : apps_) {
    if (app->state == AppState::RECEIVED || app->state == AppState::RUNNING)
      finalize_app(*app, AppState::INCOMPLETE);
    else if (app->thread.joinable())
      app->thread.join();
  }
}

void Runtime::worker_loop(Worker& w) {
  prctl(PR_SET_TIMERSLACK, 1000UL);
  for (;;) {
    std::shared_ptr<Task> task;
    {
      std::unique_lock<std::mutex> lk(w.mx);
      w.cv.wait(lk, [&] { return w.stop || !w.queue.empty(); });
      if (w.queue.empty()) {
        if (w.stop) return;
        continue;
      }
      task = std::move(w.queue.front());
      w.queue.pop_front();
    }

    task->assigned_pe = w.pe.id;
    task->state = TaskState::RUNNING;
    task->dispatch_ts = now();
    ExecOutcome outcome = execute_on_pe(*task, w.pe.pe_type, profile_);
    task->complete_ts = now();
    task->state = TaskState::COMPLETE;

    w.records.push_back(record_for(*task, outcome.result));
    // notification first, then the app wakeup: when an application exits,
    // every completion it observed is already queued for the loop
    {
      std::lock_guard<std::mutex> lk(completion_mx_);
      completions_.push_back(task);
    }
    task->completion.signal(outcome.result, outcome.diagnostic);
    wake_loop();
  }
}

TaskRecord Runtime::record_for(const Task& task, TaskResult result) const {
  TaskRecord r;
  r.task_id = task.task_id;
  r.app_id = task.app_id;
  if (task.is_composite()) {
    r.kernel = task.composite_name;
  } else {
    r.kernel = to_string(task.kernel.name);
    r.size = bucket_string(task.kernel.size_key);  // raw dims, not bucketed
  }
  r.node_id = task.node_id;
  r.pe_id = task.assigned_pe;
  if (task.assigned_pe >= 0 && task.assigned_pe < int(workers_.size()))
    r.pe_type = to_string(workers_[size_t(task.assigned_pe)]->pe.pe_type);
  r.enqueue_ns = task.enqueue_ts;
  r.dispatch_ns = task.dispatch_ts;
  r.complete_ns = task.complete_ts;
  r.status = result == TaskResult::OK ? "OK" : "ERROR";
  return r;
}

LogBundle Runtime::shutdown() {
  if (!started_) throw ConfigError("runtime was never started");
  if (stopped_) throw ConfigError("runtime already shut down");
  request_shutdown();
  if (loop_thread_.joinable()) loop_thread_.join();
  stopped_ = true;

  LogBundle bundle;
  bundle.header["format"] = 1;
  bundle.header["config"] = config_.to_json();
  bundle.header["scheduler"] = to_string(config_.scheduler);
  bundle.header["cost_model_hash"] = model_.content_hash();
  bundle.header["wall_clock_start"] = iso8601_now();

  for (auto& w : workers_)
    bundle.tasks.insert(bundle.tasks.end(), w->records.begin(), w->records.end());
  bundle.tasks.insert(bundle.tasks.end(), aborted_records_.begin(), aborted_records_.end());
  std::sort(bundle.tasks.begin(), bundle.tasks.end(),
            [](const TaskRecord& a, const TaskRecord& b) { return a.task_id < b.task_id; });

  {
    std::lock_guard<std::mutex> lk(apps_mx_);
    for (auto& [id, app] : apps_) {
      AppRecord a;
      a.app_id = id;
      a.name = app->name;
      a.mode = to_string(app->mode);
      a.arrival_ns = app->arrival_ts;
      a.start_ns = app->start_ts;
      a.end_ns = app->end_ts;
      a.state = to_string(app->state);
      a.task_count = app->task_count.load();
      a.mgmt_ns = app->mgmt_ns;
      a.sched_ns = app->sched_ns;
      a.digest = app->digest;
      bundle.apps.push_back(std::move(a));
      if (app->state == AppState::INCOMPLETE || app->state == AppState::FAILED)
        ++bundle.summary.incomplete_apps;
    }
  }
  bundle.sched = sched_records_;
  bundle.summary.total_mgmt_ns = total_mgmt_ns_.load();
  bundle.summary.total_sched_ns = total_sched_ns_;
  bundle.summary.n_apps = bundle.apps.size();
  bundle.summary.n_tasks = bundle.tasks.size();
  for (const auto& t : bundle.tasks)
    if (t.status == "INCOMPLETE") ++bundle.summary.incomplete_tasks;
  bundle.summary.span_ns = first_arrival_ >= 0 ? now() - first_arrival_ : 0;

  if (!config_.log_path.empty()) bundle.write(config_.log_path);
  {
    std::lock_guard<std::mutex> lk(shutdown_mx_);
    terminated_ = true;
  }
  shutdown_cv_.notify_all();
  return bundle;
}

}  // namespace cedr
