#pragma once

#include <string>
#include <thread>

#include <json.hpp>

#include "cedr/runtime.hpp"

namespace cedr {

// Submission endpoint: a unix-domain stream socket speaking one JSON object
// per line. Commands:
//   {"cmd":"submit","app":<name>,"mode":"API"|"DAG","params":{...}} -> {"ok":true,"app_id":N}
//   {"cmd":"status"}   -> {"ok":true,"apps":[...],"live_api_threads":N,"ready_len":N}
//   {"cmd":"shutdown"} -> replies after the logs are serialized
class IpcServer {
 public:
  IpcServer(Runtime& rt, std::string endpoint);
  ~IpcServer();

  IpcServer(const IpcServer&) = delete;
  IpcServer& operator=(const IpcServer&) = delete;

  // Binds and starts the acceptor thread. Throws ConfigError when another
  // live server already owns the endpoint.
  void start();
  // Closes the listener and joins the acceptor. Safe to call twice.
  void stop();

  const std::string& endpoint() const { return endpoint_; }

 private:
  void accept_loop();
  nlohmann::json handle(const nlohmann::json& msg, bool& want_shutdown);

  Runtime& rt_;
  std::string endpoint_;
  int listen_fd_ = -1;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
};

// One connection per request; suitable for single-threaded orchestration.
class IpcClient {
 public:
  explicit IpcClient(std::string endpoint) : endpoint_(std::move(endpoint)) {}

  nlohmann::json request(const nlohmann::json& msg);

  uint32_t submit(const std::string& app, AppMode mode, nlohmann::json params);
  nlohmann::json status();
  // Returns once the daemon has drained and serialized its logs.
  nlohmann::json shutdown();

 private:
  std::string endpoint_;
};

}  // namespace cedr
