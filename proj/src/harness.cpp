#include "cedr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "cedr/api.hpp"
#include "cedr/apps.hpp"
#include "cedr/ipc.hpp"

namespace cedr::harness {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

// ---- profiling -------------------------------------------------------------

namespace {

int64_t median_ns(std::vector<int64_t>& samples) {
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

template <typename Fn>
int64_t time_kernel(Fn&& fn, int repeats, int64_t min_sample_ns, bool& inflated) {
  // calibrate the inner repeat count so one sample is measurable
  int inner = 1;
  for (;;) {
    auto t0 = clock_type::now();
    for (int i = 0; i < inner; ++i) fn();
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - t0).count();
    if (ns >= min_sample_ns || inner >= 1 << 16) break;
    inner *= 4;
    inflated = true;
  }
  std::vector<int64_t> samples;
  samples.reserve(size_t(repeats));
  for (int r = 0; r < repeats; ++r) {
    auto t0 = clock_type::now();
    for (int i = 0; i < inner; ++i) fn();
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - t0).count();
    samples.push_back(ns / inner);
  }
  return median_ns(samples);
}

}  // namespace

CostModel profile_cost_model(const ProfileSpec& spec) {
  CostModel m;
  bool inflated = false;
  auto scaled = [&](int64_t raw) {
    return std::max<int64_t>(1000, int64_t(double(raw) * spec.dilation));
  };
  auto derive = [&](KernelName k, const SizeKey& sz, int64_t cpu_ns) {
    m.set(k, bucket(sz), PeClass::CPU, cpu_ns);
    if (supports(PeClass::FFT_ACC, k))
      m.set(k, bucket(sz), PeClass::FFT_ACC,
            std::max<int64_t>(1000, int64_t(double(cpu_ns) / spec.fft_acc_speedup)));
    if (supports(PeClass::GPU_ACC, k))
      m.set(k, bucket(sz), PeClass::GPU_ACC,
            std::max<int64_t>(1000, int64_t(double(cpu_ns) / spec.gpu_acc_speedup)));
    if (supports(PeClass::MMULT_ACC, k))
      m.set(k, bucket(sz), PeClass::MMULT_ACC,
            std::max<int64_t>(1000, int64_t(double(cpu_ns) / spec.mmult_acc_speedup)));
  };

  for (uint32_t n : spec.fft_sizes) {
    ComplexBuffer in = apps::synth_complex(7 + n, n), out(n);
    int64_t fwd = time_kernel([&] { kernels::fft(in.data(), out.data(), n, false); },
                              spec.repeats, spec.min_sample_ns, inflated);
    int64_t inv = time_kernel([&] { kernels::fft(in.data(), out.data(), n, true); },
                              spec.repeats, spec.min_sample_ns, inflated);
    derive(KernelName::FFT, SizeKey{n}, scaled(fwd));
    derive(KernelName::IFFT, SizeKey{n}, scaled(inv));
  }
  for (uint32_t n : spec.zip_sizes) {
    ComplexBuffer a = apps::synth_complex(11 + n, n), b = apps::synth_complex(13 + n, n), out(n);
    int64_t ns = time_kernel([&] { kernels::zip(a.data(), b.data(), out.data(), n); },
                             spec.repeats, spec.min_sample_ns, inflated);
    derive(KernelName::ZIP, SizeKey{n}, scaled(ns));
  }
  for (uint32_t d : spec.gemm_dims) {
    Matrix a(d, d), b(d, d), c(d, d);
    uint64_t s = 17 + d;
    for (auto& v : a.data) v = apps::next_unit(s);
    for (auto& v : b.data) v = apps::next_unit(s);
    int64_t ns = time_kernel(
        [&] { kernels::gemm(a.data.data(), b.data.data(), c.data.data(), d, d, d); },
        spec.repeats, spec.min_sample_ns, inflated);
    derive(KernelName::GEMM, SizeKey{d, d, d}, scaled(ns));
  }
  for (uint32_t d : spec.conv_dims) {
    Matrix img = apps::synth_image(19 + d, d, d);
    Matrix mask = apps::ld_masks(3)[0];
    Matrix out(d, d);
    int64_t ns = time_kernel(
        [&] {
          kernels::conv2d_freq(img.data.data(), mask.data.data(), out.data.data(), d, d, 3);
        },
        spec.repeats, spec.min_sample_ns, inflated);
    derive(KernelName::CONV2D, SizeKey{d, d, 3}, scaled(ns));
  }
  if (inflated)
    std::fprintf(stderr, "cedr: profile: repeat counts inflated for sub-resolution kernels\n");
  m.validate();
  return m;
}

// ---- injection ---------------------------------------------------------------

double injection_period_s(double frame_mb, double rate_mbps) {
  if (frame_mb <= 0 || rate_mbps <= 0)
    throw std::invalid_argument("injection_period: frame_mb and rate_mbps must be positive");
  return frame_mb / rate_mbps;
}

void WorkloadSpec::validate() const {
  if (entries.empty()) throw ConfigError("workload: no entries");
  for (const auto& e : entries)
    if (e.count < 1) throw ConfigError("workload: instance count must be >= 1");
  for (double r : rates_mbps)
    if (r <= 0) throw ConfigError("workload: rates must be positive");
  if (trials < 1) throw ConfigError("workload: trials must be >= 1");
}

nlohmann::json WorkloadSpec::to_json() const {
  nlohmann::json entries_j = nlohmann::json::array();
  for (const auto& e : entries)
    entries_j.push_back({{"app", e.app},
                         {"mode", to_string(e.mode)},
                         {"count", e.count},
                         {"params", e.params}});
  return {{"entries", entries_j}, {"rates_mbps", rates_mbps}, {"trials", trials}, {"seed", seed}};
}

WorkloadSpec WorkloadSpec::from_json(const nlohmann::json& j) {
  WorkloadSpec s;
  s.entries.clear();
  for (const auto& e : j.at("entries")) {
    WorkloadEntry we;
    we.app = e.at("app").get<std::string>();
    auto mode = e.value("mode", std::string("API"));
    if (mode == "API") we.mode = AppMode::API;
    else if (mode == "DAG") we.mode = AppMode::DAG;
    else throw ConfigError("workload: unknown mode " + mode);
    we.count = e.value("count", 1);
    we.params = e.value("params", nlohmann::json::object());
    s.entries.push_back(std::move(we));
  }
  if (j.contains("rates_mbps")) s.rates_mbps = j.at("rates_mbps").get<std::vector<double>>();
  s.trials = j.value("trials", s.trials);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

WorkloadSpec WorkloadSpec::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("workload: cannot open " + path);
  return from_json(nlohmann::json::parse(f));
}

static std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    double t = n == 1 ? 0.0 : double(i) / (n - 1);
    double v = lo * std::pow(hi / lo, t);
    out.push_back(std::round(v * 100) / 100);
  }
  return out;
}

std::vector<double> desk_scale_rates() { return log_spaced(10, 2000, 10); }
std::vector<double> paper_scale_rates() { return log_spaced(10, 2000, 29); }

// ---- trial execution ----------------------------------------------------------

namespace {

struct Arrival {
  double at_s;
  size_t entry_idx;
  int instance;
};

std::atomic<uint64_t> endpoint_counter{0};

std::string fresh_endpoint() {
  return "/tmp/cedr-" + std::to_string(::getpid()) + "-" +
         std::to_string(endpoint_counter.fetch_add(1)) + ".sock";
}

}  // namespace

RunResult run_trial(const WorkloadSpec& spec, const RuntimeConfig& base, double rate_mbps,
                    int trial, const std::string& run_dir) {
  RunResult result;
  result.rate_mbps = rate_mbps;
  result.trial = trial;
  result.scheduler = to_string(base.scheduler);
  result.dir = run_dir;

  const AppRegistry& reg = apps::registry();
  RuntimeConfig cfg = base;
  cfg.log_path = run_dir;
  if (cfg.ipc_endpoint.empty()) cfg.ipc_endpoint = fresh_endpoint();

  try {
    fs::create_directories(run_dir);
    if (cfg.cost_model_path.empty())
      throw ConfigError("harness: config needs cost_model_path");
    CostModel model = CostModel::load(cfg.cost_model_path);

    // arrival schedule: per-entry independent periodic streams
    std::vector<Arrival> arrivals;
    for (size_t ei = 0; ei < spec.entries.size(); ++ei) {
      const auto& e = spec.entries[ei];
      const AppSpec* as = reg.find(e.app);
      if (!as) throw ConfigError("workload: unknown app " + e.app);
      nlohmann::json params = as->default_params;
      for (auto& [k, v] : e.params.items()) params[k] = v;
      double period = injection_period_s(as->frame_mb(params), rate_mbps);
      for (int k = 0; k < e.count; ++k)
        arrivals.push_back({period * k, ei, k});
    }
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const Arrival& a, const Arrival& b) { return a.at_s < b.at_s; });

    Runtime rt(cfg, std::move(model), &reg);
    rt.start();
    IpcServer server(rt, cfg.ipc_endpoint);
    server.start();

    LogBundle bundle;
    std::thread daemon([&] {
      rt.wait_shutdown_requested();
      bundle = rt.shutdown();
    });

    try {
      IpcClient client(cfg.ipc_endpoint);
      const auto t0 = clock_type::now();
      for (const auto& a : arrivals) {
        std::this_thread::sleep_until(
            t0 + std::chrono::duration_cast<clock_type::duration>(
                     std::chrono::duration<double>(a.at_s)));
        const auto& e = spec.entries[a.entry_idx];
        nlohmann::json params = e.params;
        params["seed"] =
            apps::mix_seed(spec.seed, (uint64_t(trial) << 32) ^ (a.entry_idx << 16) ^
                                          uint64_t(a.instance));
        if (e.mode == AppMode::DAG) {
          const AppSpec* as = reg.find(e.app);
          nlohmann::json merged = as->default_params;
          for (auto& [k, v] : params.items()) merged[k] = v;
          std::string dag_path = run_dir + "/dag_" + e.app + "_" +
                                 std::to_string(a.entry_idx) + "_" +
                                 std::to_string(a.instance) + ".json";
          std::ofstream f(dag_path);
          f << as->dag_twin(merged).dump();
          f.close();
          params["dag_path"] = dag_path;
        }
        client.submit(e.app, e.mode, params);
      }

      // shutdown after the last completion
      for (;;) {
        auto st = client.status();
        bool all_done = true;
        for (const auto& a : st.at("apps")) {
          auto s = a.at("state").get<std::string>();
          if (s == "RECEIVED" || s == "RUNNING") {
            all_done = false;
            break;
          }
        }
        if (all_done && st.at("apps").size() == arrivals.size()) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
      client.shutdown();
    } catch (...) {
      rt.request_shutdown();
      daemon.join();
      server.stop();
      throw;
    }
    daemon.join();
    server.stop();

    bundle.header["harness"] = {{"rate_mbps", rate_mbps},
                                {"trial", trial},
                                {"scheduler", to_string(cfg.scheduler)},
                                {"workload", spec.to_json()}};
    bundle.write(run_dir);
    result.bundle = std::move(bundle);
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

std::vector<RunResult> run_workload(const WorkloadSpec& spec, const RuntimeConfig& base,
                                    const std::string& out_dir) {
  spec.validate();
  std::vector<RunResult> results;
  for (double rate : spec.rates_mbps) {
    for (int trial = 0; trial < spec.trials; ++trial) {
      std::ostringstream dir;
      dir << out_dir << "/r" << rate << "_s" << to_string(base.scheduler) << "_t" << trial;
      results.push_back(run_trial(spec, base, rate, trial, dir.str()));
    }
  }
  return results;
}

// ---- metrics --------------------------------------------------------------------

TrialMetrics trial_metrics(const LogBundle& bundle) {
  TrialMetrics tm;
  double exec_sum = 0, sched_sum = 0;
  for (const auto& a : bundle.apps) {
    if (a.state != "DONE") {
      ++tm.apps_excluded;
      continue;
    }
    exec_sum += double(a.end_ns - a.start_ns);
    sched_sum += double(a.sched_ns);
    ++tm.apps_counted;
  }
  if (tm.apps_counted == 0) return tm;
  const double n = double(tm.apps_counted);
  tm.exec_ms = exec_sum / n / 1e6;
  tm.sched_ms = sched_sum / n / 1e6;
  tm.overhead_ms = double(bundle.summary.total_mgmt_ns) / double(bundle.summary.n_apps) / 1e6;
  return tm;
}

namespace {

MetricStats stats_of(const std::vector<double>& xs) {
  MetricStats s;
  s.trials = int(xs.size());
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean_ms = sum / double(xs.size());
  double var = 0;
  for (double x : xs) var += (x - s.mean_ms) * (x - s.mean_ms);
  s.std_ms = xs.size() > 1 ? std::sqrt(var / double(xs.size() - 1)) : 0.0;
  return s;
}

}  // namespace

MetricsReport compute_metrics(const std::vector<RunResult>& runs) {
  MetricsReport report;
  std::map<std::pair<double, std::string>, std::vector<TrialMetrics>> grouped;
  for (const auto& r : runs) {
    if (r.failed) continue;
    auto tm = trial_metrics(r.bundle);
    report.excluded_incomplete += tm.apps_excluded;
    grouped[{r.rate_mbps, r.scheduler}].push_back(tm);
  }
  for (auto& [key, tms] : grouped) {
    std::vector<double> exec, sched, over;
    for (const auto& t : tms) {
      if (t.apps_counted == 0) continue;
      exec.push_back(t.exec_ms);
      sched.push_back(t.sched_ms);
      over.push_back(t.overhead_ms);
    }
    MetricsCell cell;
    cell.exec_time = stats_of(exec);
    cell.sched_overhead = stats_of(sched);
    cell.runtime_overhead = stats_of(over);
    report.cells[key] = cell;
  }
  return report;
}

MetricsReport compute_metrics_from_dirs(const std::string& logs_dir) {
  std::vector<RunResult> runs;
  std::vector<std::string> dirs;
  for (const auto& entry : fs::directory_iterator(logs_dir))
    if (entry.is_directory() && fs::exists(entry.path() / "run.json"))
      dirs.push_back(entry.path().string());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    RunResult r;
    r.dir = d;
    try {
      r.bundle = LogBundle::load(d);
      const auto& h = r.bundle.header;
      r.scheduler = r.bundle.scheduler();
      if (h.contains("harness")) {
        r.rate_mbps = h["harness"].value("rate_mbps", 0.0);
        r.trial = h["harness"].value("trial", 0);
      }
    } catch (const std::exception& e) {
      r.failed = true;
      r.error = e.what();
    }
    runs.push_back(std::move(r));
  }
  return compute_metrics(runs);
}

void emit_report(const MetricsReport& report, const std::string& out_dir) {
  if (report.empty()) throw ConfigError("report: no metrics to emit");
  fs::create_directories(out_dir);

  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };

  {
    std::ofstream f(out_dir + "/metrics.csv");
    f << "rate_mbps,scheduler,metric,mean_ms,std_ms,trials\n";
    for (const auto& [key, cell] : report.cells) {
      const auto& [rate, sched] = key;
      auto row = [&](const char* metric, const MetricStats& s) {
        f << fmt(rate) << ',' << sched << ',' << metric << ',' << fmt(s.mean_ms) << ','
          << fmt(s.std_ms) << ',' << s.trials << "\n";
      };
      row("exec_time", cell.exec_time);
      row("sched_overhead", cell.sched_overhead);
      row("runtime_overhead", cell.runtime_overhead);
    }
  }

  // plot data: x = rate, one series per scheduler
  std::vector<double> rates;
  std::vector<std::string> scheds;
  for (const auto& [key, cell] : report.cells) {
    if (std::find(rates.begin(), rates.end(), key.first) == rates.end())
      rates.push_back(key.first);
    if (std::find(scheds.begin(), scheds.end(), key.second) == scheds.end())
      scheds.push_back(key.second);
  }
  std::sort(rates.begin(), rates.end());
  std::sort(scheds.begin(), scheds.end());

  auto emit_plot = [&](const std::string& name, auto pick) {
    std::ofstream f(out_dir + "/plot_" + name + ".csv");
    f << "rate_mbps";
    for (const auto& s : scheds) f << ',' << s;
    f << "\n";
    for (double r : rates) {
      f << fmt(r);
      for (const auto& s : scheds) {
        auto it = report.cells.find({r, s});
        f << ',' << (it == report.cells.end() ? "" : fmt(pick(it->second)));
      }
      f << "\n";
    }
  };
  emit_plot("exec_time", [](const MetricsCell& c) { return c.exec_time.mean_ms; });
  emit_plot("sched_overhead", [](const MetricsCell& c) { return c.sched_overhead.mean_ms; });
  emit_plot("runtime_overhead", [](const MetricsCell& c) { return c.runtime_overhead.mean_ms; });
}

// ---- scheduler scaling -------------------------------------------------------

double scheduler_growth_exponent(SchedulerKind kind, const std::vector<int>& queue_sizes,
                                 int pe_count, int repeats) {
  // synthetic model: two kernels, fixed entries
  CostModel model;
  model.set(KernelName::FFT, SizeKey{256}, PeClass::CPU, 180'000);
  model.set(KernelName::FFT, SizeKey{256}, PeClass::FFT_ACC, 22'500);
  model.set(KernelName::GEMM, SizeKey{32, 32, 32}, PeClass::CPU, 300'000);
  model.set(KernelName::GEMM, SizeKey{32, 32, 32}, PeClass::MMULT_ACC, 75'000);
  model.set(KernelName::ZIP, SizeKey{256}, PeClass::CPU, 40'000);

  std::vector<double> log_n, log_t;
  uint64_t rng = 0x9E3779B97F4A7C15ull;
  for (int n : queue_sizes) {
    ScheduleSnapshot snap;
    snap.now = 1'000'000;
    snap.model = &model;
    for (int p = 0; p < pe_count; ++p) {
      PeClass cls = p == 0 ? PeClass::FFT_ACC : PeClass::CPU;
      snap.pes.push_back({p, cls, int64_t(apps::next_unit(rng) * 1e6)});
    }
    snap.ready.reserve(size_t(n));
    for (int i = 0; i < n; ++i) {
      auto t = std::make_shared<Task>();
      double pick = apps::next_unit(rng);
      if (pick < 0.5) t->kernel = {KernelName::FFT, SizeKey{256}};
      else if (pick < 0.8) t->kernel = {KernelName::ZIP, SizeKey{256}};
      else t->kernel = {KernelName::GEMM, SizeKey{32, 32, 32}};
      t->supported_types = support_set(t->kernel.name);
      t->task_id = uint64_t(i) + 1;
      t->enqueue_ts = i;
      snap.ready.push_back(std::move(t));
    }

    std::vector<int64_t> samples;
    for (int r = 0; r < repeats; ++r) {
      auto sched = make_scheduler(kind);
      auto t0 = clock_type::now();
      auto out = sched->schedule(snap);
      auto ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - t0).count();
      if (out.size() != snap.ready.size())
        throw std::logic_error("scheduler dropped tasks during scaling measurement");
      samples.push_back(ns);
    }
    log_n.push_back(std::log(double(n)));
    log_t.push_back(std::log(double(median_ns(samples)) + 1.0));
  }

  // least-squares slope
  double mx = 0, my = 0;
  for (size_t i = 0; i < log_n.size(); ++i) {
    mx += log_n[i];
    my += log_t[i];
  }
  mx /= double(log_n.size());
  my /= double(log_t.size());
  double num = 0, den = 0;
  for (size_t i = 0; i < log_n.size(); ++i) {
    num += (log_n[i] - mx) * (log_t[i] - my);
    den += (log_n[i] - mx) * (log_n[i] - mx);
  }
  return num / den;
}

}  // namespace cedr::harness
