#include "cedr/log.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace cedr {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void require_open(const std::ofstream& f, const std::string& path) {
  if (!f) throw ConfigError("log: cannot write " + path);
}

}  // namespace

void LogBundle::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    nlohmann::json j = header;
    j["summary"] = {{"total_mgmt_ns", summary.total_mgmt_ns},
                    {"total_sched_ns", summary.total_sched_ns},
                    {"n_apps", summary.n_apps},
                    {"n_tasks", summary.n_tasks},
                    {"incomplete_apps", summary.incomplete_apps},
                    {"incomplete_tasks", summary.incomplete_tasks},
                    {"span_ns", summary.span_ns}};
    std::ofstream f(dir + "/run.json");
    require_open(f, dir + "/run.json");
    f << j.dump(2) << "\n";
  }
  {
    std::ofstream f(dir + "/tasks.csv");
    require_open(f, dir + "/tasks.csv");
    f << "task_id,app_id,kernel,size,node_id,pe_id,pe_type,enqueue_ns,dispatch_ns,complete_ns,status\n";
    for (const auto& t : tasks)
      f << t.task_id << ',' << t.app_id << ',' << t.kernel << ',' << t.size << ','
        << t.node_id << ',' << t.pe_id << ',' << t.pe_type << ',' << t.enqueue_ns << ','
        << t.dispatch_ns << ',' << t.complete_ns << ',' << t.status << "\n";
  }
  {
    std::ofstream f(dir + "/apps.csv");
    require_open(f, dir + "/apps.csv");
    f << "app_id,name,mode,arrival_ns,start_ns,end_ns,state,task_count,mgmt_ns,sched_ns,digest\n";
    for (const auto& a : apps)
      f << a.app_id << ',' << a.name << ',' << a.mode << ',' << a.arrival_ns << ','
        << a.start_ns << ',' << a.end_ns << ',' << a.state << ',' << a.task_count << ','
        << a.mgmt_ns << ',' << a.sched_ns << ',' << a.digest << "\n";
  }
  {
    std::ofstream f(dir + "/sched.csv");
    require_open(f, dir + "/sched.csv");
    f << "seq,ts_ns,queue_len,batch,decision_ns\n";
    for (const auto& s : sched)
      f << s.seq << ',' << s.ts_ns << ',' << s.queue_len << ',' << s.batch << ','
        << s.decision_ns << "\n";
  }
}

LogBundle LogBundle::load(const std::string& dir) {
  LogBundle b;
  {
    std::ifstream f(dir + "/run.json");
    if (!f) throw ConfigError("log: cannot open " + dir + "/run.json");
    b.header = nlohmann::json::parse(f);
    if (b.header.contains("summary")) {
      const auto& s = b.header["summary"];
      b.summary.total_mgmt_ns = s.value("total_mgmt_ns", int64_t(0));
      b.summary.total_sched_ns = s.value("total_sched_ns", int64_t(0));
      b.summary.n_apps = s.value("n_apps", uint64_t(0));
      b.summary.n_tasks = s.value("n_tasks", uint64_t(0));
      b.summary.incomplete_apps = s.value("incomplete_apps", uint64_t(0));
      b.summary.incomplete_tasks = s.value("incomplete_tasks", uint64_t(0));
      b.summary.span_ns = s.value("span_ns", int64_t(0));
    }
  }
  auto view = [](const std::string& s) { return s; };
  {
    std::ifstream f(dir + "/tasks.csv");
    if (!f) throw ConfigError("log: cannot open " + dir + "/tasks.csv");
    std::string line;
    std::getline(f, line);  // header
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      auto c = split_csv(line);
      if (c.size() != 11) throw ConfigError("log: malformed tasks.csv row: " + line);
      TaskRecord t;
      t.task_id = std::stoull(c[0]);
      t.app_id = uint32_t(std::stoul(c[1]));
      t.kernel = view(c[2]);
      t.size = view(c[3]);
      t.node_id = std::stoi(c[4]);
      t.pe_id = std::stoi(c[5]);
      t.pe_type = view(c[6]);
      t.enqueue_ns = std::stoll(c[7]);
      t.dispatch_ns = std::stoll(c[8]);
      t.complete_ns = std::stoll(c[9]);
      t.status = view(c[10]);
      b.tasks.push_back(std::move(t));
    }
  }
  {
    std::ifstream f(dir + "/apps.csv");
    if (!f) throw ConfigError("log: cannot open " + dir + "/apps.csv");
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      auto c = split_csv(line);
      if (c.size() != 11) throw ConfigError("log: malformed apps.csv row: " + line);
      AppRecord a;
      a.app_id = uint32_t(std::stoul(c[0]));
      a.name = c[1];
      a.mode = c[2];
      a.arrival_ns = std::stoll(c[3]);
      a.start_ns = std::stoll(c[4]);
      a.end_ns = std::stoll(c[5]);
      a.state = c[6];
      a.task_count = std::stoull(c[7]);
      a.mgmt_ns = std::stoll(c[8]);
      a.sched_ns = std::stoll(c[9]);
      a.digest = std::stoull(c[10]);
      b.apps.push_back(std::move(a));
    }
  }
  {
    std::ifstream f(dir + "/sched.csv");
    if (!f) throw ConfigError("log: cannot open " + dir + "/sched.csv");
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      auto c = split_csv(line);
      if (c.size() != 5) throw ConfigError("log: malformed sched.csv row: " + line);
      SchedRecord s;
      s.seq = std::stoull(c[0]);
      s.ts_ns = std::stoll(c[1]);
      s.queue_len = uint32_t(std::stoul(c[2]));
      s.batch = uint32_t(std::stoul(c[3]));
      s.decision_ns = std::stoll(c[4]);
      b.sched.push_back(s);
    }
  }
  return b;
}

std::vector<std::string> check_task_accounting(const LogBundle& b) {
  std::vector<std::string> problems;
  std::map<uint64_t, int> seen;
  std::map<uint32_t, uint64_t> per_app;
  for (const auto& t : b.tasks) {
    if (++seen[t.task_id] > 1)
      problems.push_back("task_id " + std::to_string(t.task_id) + " appears more than once");
    ++per_app[t.app_id];
    if (t.status == "INCOMPLETE") continue;
    if (t.dispatch_ns < t.enqueue_ns)
      problems.push_back("task " + std::to_string(t.task_id) + ": dispatch before enqueue");
    if (t.complete_ns < t.dispatch_ns)
      problems.push_back("task " + std::to_string(t.task_id) + ": complete before dispatch");
    if (t.pe_id < 0)
      problems.push_back("task " + std::to_string(t.task_id) + ": completed without a PE");
  }
  for (const auto& a : b.apps) {
    auto it = per_app.find(a.app_id);
    uint64_t logged = it == per_app.end() ? 0 : it->second;
    if (logged != a.task_count)
      problems.push_back("app " + std::to_string(a.app_id) + ": task_count " +
                         std::to_string(a.task_count) + " but " + std::to_string(logged) +
                         " task records");
  }
  return problems;
}

std::vector<std::string> check_pe_exclusive(const LogBundle& b) {
  std::vector<std::string> problems;
  std::map<int, std::vector<std::pair<TimeNs, TimeNs>>> per_pe;
  for (const auto& t : b.tasks)
    if (t.status == "OK" || t.status == "ERROR")
      per_pe[t.pe_id].push_back({t.dispatch_ns, t.complete_ns});
  for (auto& [pe, spans] : per_pe) {
    std::sort(spans.begin(), spans.end());
    for (size_t i = 1; i < spans.size(); ++i) {
      if (spans[i].first < spans[i - 1].second) {
        problems.push_back("pe " + std::to_string(pe) + ": overlapping service intervals at " +
                           std::to_string(spans[i].first) + "ns");
      }
    }
  }
  return problems;
}

std::vector<std::string> check_kernel_support(const LogBundle& b) {
  std::vector<std::string> problems;
  for (const auto& t : b.tasks) {
    if (t.status == "INCOMPLETE") continue;
    auto pe = pe_class_from_string(t.pe_type);
    if (!pe) {
      problems.push_back("task " + std::to_string(t.task_id) + ": unknown pe_type " + t.pe_type);
      continue;
    }
    if (auto k = kernel_from_string(t.kernel)) {
      if (!supports(*pe, *k))
        problems.push_back("task " + std::to_string(t.task_id) + ": " + t.pe_type +
                           " does not support " + t.kernel);
    } else if (*pe != PeClass::CPU) {
      problems.push_back("task " + std::to_string(t.task_id) + ": composite off CPU");
    }
  }
  return problems;
}

std::vector<std::string> check_topological(const LogBundle& b, const AppDag& dag,
                                           uint32_t app_id) {
  std::vector<std::string> problems;
  std::map<int, const TaskRecord*> by_node;
  for (const auto& t : b.tasks)
    if (t.app_id == app_id && t.node_id >= 0) by_node[t.node_id] = &t;
  for (const auto& n : dag.nodes) {
    auto u = by_node.find(n.node_id);
    if (u == by_node.end()) {
      problems.push_back("node " + std::to_string(n.node_id) + " never executed");
      continue;
    }
    for (int s : n.successors) {
      auto v = by_node.find(s);
      if (v == by_node.end()) continue;
      if (u->second->complete_ns > v->second->dispatch_ns)
        problems.push_back("edge " + std::to_string(n.node_id) + "->" + std::to_string(s) +
                           " violates topological order");
    }
  }
  return problems;
}

int64_t wall_residual_ns(const LogBundle& b, uint32_t app_id) {
  const AppRecord* app = nullptr;
  for (const auto& a : b.apps)
    if (a.app_id == app_id) app = &a;
  if (!app) return 0;
  int64_t service = 0;
  for (const auto& t : b.tasks)
    if (t.app_id == app_id && t.status == "OK") service += t.complete_ns - t.dispatch_ns;
  return (app->end_ns - app->arrival_ns) - service - app->sched_ns;
}

}  // namespace cedr
