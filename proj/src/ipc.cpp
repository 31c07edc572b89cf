#include "cedr/ipc.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cstring>

namespace cedr {

namespace {

sockaddr_un make_addr(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path))
    throw ConfigError("ipc: endpoint path too long: " + path);
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  return addr;
}

bool endpoint_alive(const std::string& path) {
  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) return false;
  auto addr = make_addr(path);
  bool alive = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
  ::close(fd);
  return alive;
}

bool send_all(int fd, const std::string& data) {
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) return false;
    off += size_t(n);
  }
  return true;
}

bool recv_line(int fd, std::string& line) {
  line.clear();
  char c;
  for (;;) {
    ssize_t n = ::recv(fd, &c, 1, 0);
    if (n <= 0) return !line.empty();
    if (c == '\n') return true;
    line.push_back(c);
    if (line.size() > (1u << 22)) return false;  // runaway message
  }
}

}  // namespace

IpcServer::IpcServer(Runtime& rt, std::string endpoint)
    : rt_(rt), endpoint_(std::move(endpoint)) {}

IpcServer::~IpcServer() { stop(); }

void IpcServer::start() {
  if (endpoint_alive(endpoint_))
    throw ConfigError("ipc: endpoint busy: " + endpoint_);
  ::unlink(endpoint_.c_str());

  listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ConfigError("ipc: socket() failed");
  auto addr = make_addr(endpoint_);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw ConfigError("ipc: endpoint busy: " + endpoint_);
  }
  if (::listen(listen_fd_, 64) != 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw ConfigError("ipc: listen() failed on " + endpoint_);
  }
  thread_ = std::thread([this] { accept_loop(); });
}

void IpcServer::stop() {
  if (stopping_.exchange(true)) {
    if (thread_.joinable()) thread_.join();
    return;
  }
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  if (thread_.joinable()) thread_.join();
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  ::unlink(endpoint_.c_str());
}

nlohmann::json IpcServer::handle(const nlohmann::json& msg, bool& want_shutdown) {
  const std::string cmd = msg.value("cmd", std::string());
  if (cmd == "submit") {
    auto mode_s = msg.value("mode", std::string("API"));
    AppMode mode;
    if (mode_s == "API") mode = AppMode::API;
    else if (mode_s == "DAG") mode = AppMode::DAG;
    else return {{"ok", false}, {"error", "unknown mode '" + mode_s + "'"}};
    uint32_t id = rt_.submit(msg.value("app", std::string()), mode,
                             msg.value("params", nlohmann::json::object()));
    return {{"ok", true}, {"app_id", id}};
  }
  if (cmd == "status") {
    auto st = rt_.status();
    nlohmann::json apps = nlohmann::json::array();
    for (const auto& a : st.apps)
      apps.push_back({{"app_id", a.app_id},
                      {"name", a.name},
                      {"mode", to_string(a.mode)},
                      {"state", to_string(a.state)},
                      {"tasks", a.task_count}});
    return {{"ok", true},
            {"apps", apps},
            {"live_api_threads", st.live_api_threads},
            {"ready_len", st.ready_len},
            {"accepting", st.accepting}};
  }
  if (cmd == "shutdown") {
    want_shutdown = true;
    return {{"ok", true}, {"log_dir", rt_.config().log_path}};
  }
  return {{"ok", false}, {"error", "unknown cmd '" + cmd + "'"}};
}

void IpcServer::accept_loop() {
  for (;;) {
    int conn = ::accept(listen_fd_, nullptr, nullptr);
    if (conn < 0) return;  // listener closed
    std::string line;
    while (recv_line(conn, line)) {
      nlohmann::json reply;
      bool want_shutdown = false;
      try {
        reply = handle(nlohmann::json::parse(line), want_shutdown);
      } catch (const std::exception& e) {
        reply = {{"ok", false}, {"error", e.what()}};
      }
      if (want_shutdown) {
        // reply only after the daemon has finished serializing its logs
        rt_.request_shutdown();
        rt_.wait_terminated();
      }
      if (!send_all(conn, reply.dump() + "\n")) break;
      if (want_shutdown) {
        ::close(conn);
        return;
      }
    }
    ::close(conn);
  }
}

nlohmann::json IpcClient::request(const nlohmann::json& msg) {
  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw ConnectionError("ipc: socket() failed");
  auto addr = make_addr(endpoint_);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    throw ConnectionError("ipc: cannot connect to " + endpoint_);
  }
  bool ok = send_all(fd, msg.dump() + "\n");
  std::string line;
  ok = ok && recv_line(fd, line);
  ::close(fd);
  if (!ok) throw ConnectionError("ipc: request failed on " + endpoint_);
  return nlohmann::json::parse(line);
}

uint32_t IpcClient::submit(const std::string& app, AppMode mode, nlohmann::json params) {
  auto reply = request({{"cmd", "submit"},
                        {"app", app},
                        {"mode", to_string(mode)},
                        {"params", std::move(params)}});
  if (!reply.value("ok", false))
    throw ConnectionError("submit rejected: " + reply.value("error", std::string("?")));
  return reply.at("app_id").get<uint32_t>();
}

nlohmann::json IpcClient::status() { return request({{"cmd", "status"}}); }

nlohmann::json IpcClient::shutdown() { return request({{"cmd", "shutdown"}}); }

}  // namespace cedr
