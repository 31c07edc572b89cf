// Long-running runtime daemon. Listens on the configured IPC endpoint until a
// shutdown command arrives, then drains, serializes logs, and exits.

#include <CLI11.hpp>

#include <cstdio>

#include "cedr/apps.hpp"
#include "cedr/harness.hpp"
#include "cedr/ipc.hpp"
#include "cedr/runtime.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"cedr daemon"};
  std::string config_path;
  std::string scheduler_override;
  bool list_apps = false;
  cli.add_option("--config", config_path, "runtime config JSON");
  cli.add_option("--scheduler", scheduler_override, "override scheduler {RR|EFT|ETF|HEFT_RT}");
  cli.add_flag("--list-apps", list_apps, "list registered applications and exit");
  CLI11_PARSE(cli, argc, argv);

  if (list_apps) {
    for (const auto& name : cedr::apps::registry().names()) std::printf("%s\n", name.c_str());
    return 0;
  }
  if (config_path.empty()) {
    std::fprintf(stderr, "cedr_daemon: --config is required\n");
    return 2;
  }

  try {
    cedr::RuntimeConfig cfg = cedr::RuntimeConfig::load(config_path);
    if (!scheduler_override.empty()) {
      auto s = cedr::scheduler_from_string(scheduler_override);
      if (!s) throw cedr::ConfigError("unknown scheduler " + scheduler_override);
      cfg.scheduler = *s;
    }
    if (cfg.ipc_endpoint.empty())
      throw cedr::ConfigError("config: daemon needs ipc_endpoint");

    cedr::CostModel model;
    if (!cfg.cost_model_path.empty()) {
      model = cedr::CostModel::load(cfg.cost_model_path);
    } else {
      std::fprintf(stderr, "cedr_daemon: no cost_model_path, profiling this host...\n");
      model = cedr::harness::profile_cost_model();
    }

    cedr::Runtime rt(cfg, std::move(model), &cedr::apps::registry());
    rt.start();
    cedr::IpcServer server(rt, cfg.ipc_endpoint);
    server.start();
    std::fprintf(stderr, "cedr_daemon: listening on %s, scheduler %s\n",
                 cfg.ipc_endpoint.c_str(), to_string(cfg.scheduler));

    rt.wait_shutdown_requested();
    auto bundle = rt.shutdown();
    server.stop();
    std::fprintf(stderr, "cedr_daemon: %llu apps, %llu tasks, logs in %s\n",
                 static_cast<unsigned long long>(bundle.summary.n_apps),
                 static_cast<unsigned long long>(bundle.summary.n_tasks),
                 cfg.log_path.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cedr_daemon: %s\n", e.what());
    return 1;
  }
  return 0;
}
