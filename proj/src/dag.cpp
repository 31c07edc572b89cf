#include "cedr/dag.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace cedr {

ComplexBuffer& FrameArena::cbuf(const std::string& name, size_t size_hint) {
  auto& b = cbufs_[name];
  if (b.size() < size_hint) b.resize(size_hint);
  return b;
}

Matrix& FrameArena::mat(const std::string& name, uint32_t rows, uint32_t cols) {
  auto& m = mats_[name];
  if (rows && cols && (m.rows != rows || m.cols != cols)) m = Matrix(rows, cols);
  return m;
}

uint64_t FrameArena::digest() const {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, size_t n) {
    const unsigned char* c = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& [name, b] : cbufs_) {
    mix(name.data(), name.size());
    mix(b.data(), b.size() * sizeof(cplx));
  }
  for (const auto& [name, m] : mats_) {
    mix(name.data(), name.size());
    mix(m.data.data(), m.data.size() * sizeof(double));
  }
  return h;
}

namespace {

SizeKey parse_size(const nlohmann::json& j) {
  SizeKey k;
  if (j.is_number_unsigned() || j.is_number_integer()) {
    auto v = j.get<int64_t>();
    if (v <= 0) throw ParseError("dag: size must be positive");
    k.dims.push_back(uint32_t(v));
  } else if (j.is_array()) {
    for (const auto& e : j) {
      auto v = e.get<int64_t>();
      if (v <= 0) throw ParseError("dag: size must be positive");
      k.dims.push_back(uint32_t(v));
    }
  } else {
    throw ParseError("dag: size must be an integer or array");
  }
  return k;
}

// Names one edge on a cycle among nodes that Kahn's algorithm never freed.
std::string find_back_edge(const AppDag& dag, const std::set<int>& stuck) {
  for (int u : stuck) {
    std::vector<int> color(dag.nodes.size(), 0);
    std::vector<std::pair<int, size_t>> stack{{u, 0}};
    color[size_t(u)] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      const auto& succ = dag.node(v).successors;
      if (i >= succ.size()) {
        color[size_t(v)] = 2;
        stack.pop_back();
        continue;
      }
      int w = succ[i++];
      if (!stuck.count(w)) continue;
      if (color[size_t(w)] == 1)
        return std::to_string(v) + "->" + std::to_string(w);
      if (color[size_t(w)] == 0) {
        color[size_t(w)] = 1;
        stack.push_back({w, 0});
      }
    }
  }
  return "?";
}

}  // namespace

AppDag parse_dag(const std::string& text, const std::vector<std::string>& composite_names) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("dag: ") + e.what());
  }

  AppDag dag;
  try {
    dag.app_name = doc.value("app_name", std::string("unnamed"));
    if (!doc.contains("nodes") || !doc["nodes"].is_array())
      throw ParseError("dag: missing 'nodes' array");

    std::map<int, nlohmann::json> by_id;
    for (const auto& n : doc["nodes"]) {
      int id = n.at("id").get<int>();
      if (by_id.count(id)) throw ParseError("dag: duplicate node id " + std::to_string(id));
      by_id[id] = n;
    }
    if (by_id.empty()) throw ParseError("dag: empty node list");
    // node ids must be dense 0..N-1 so node_id can index the table
    if (by_id.begin()->first != 0 || by_id.rbegin()->first != int(by_id.size()) - 1)
      throw ParseError("dag: node ids must be contiguous from 0");

    dag.nodes.resize(by_id.size());
    for (auto& [id, n] : by_id) {
      DagNode& node = dag.nodes[size_t(id)];
      node.node_id = id;
      std::string kname = n.at("kernel").get<std::string>();
      if (auto k = kernel_from_string(kname)) {
        node.composite = false;
        node.kernel.name = *k;
        node.kernel.size_key = parse_size(n.at("size"));
        node.inverse = (*k == KernelName::IFFT);
      } else if (std::find(composite_names.begin(), composite_names.end(), kname) !=
                 composite_names.end()) {
        node.composite = true;
        node.composite_fn = kname;
      } else {
        throw ParseError("dag: node " + std::to_string(id) + ": unknown kernel '" + kname + "'");
      }
      node.args = n.value("args", nlohmann::json::object());
      for (const auto& s : n.value("successors", std::vector<int>{})) {
        if (!by_id.count(s))
          throw ParseError("dag: node " + std::to_string(id) + ": dangling successor " +
                           std::to_string(s));
        if (s == id) throw ParseError("dag: cycle detected at back edge " + std::to_string(id) +
                                      "->" + std::to_string(s));
        node.successors.push_back(s);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("dag: ") + e.what());
  }

  for (auto& n : dag.nodes)
    for (int s : n.successors) dag.nodes[size_t(s)].predecessors.push_back(n.node_id);
  for (auto& n : dag.nodes) {
    n.remaining_deps = int(n.predecessors.size());
    if (n.remaining_deps == 0) dag.head_ids.push_back(n.node_id);
  }
  if (dag.head_ids.empty())
    throw ParseError("dag: cycle detected at back edge " +
                     find_back_edge(dag, [&] {
                       std::set<int> all;
                       for (const auto& n : dag.nodes) all.insert(n.node_id);
                       return all;
                     }()));

  // Kahn's algorithm: leftovers expose a cycle
  std::vector<int> indeg(dag.nodes.size());
  for (const auto& n : dag.nodes) indeg[size_t(n.node_id)] = int(n.predecessors.size());
  std::deque<int> q(dag.head_ids.begin(), dag.head_ids.end());
  size_t freed = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    ++freed;
    for (int s : dag.node(u).successors)
      if (--indeg[size_t(s)] == 0) q.push_back(s);
  }
  if (freed != dag.nodes.size()) {
    std::set<int> stuck;
    for (const auto& n : dag.nodes)
      if (indeg[size_t(n.node_id)] > 0) stuck.insert(n.node_id);
    throw ParseError("dag: cycle detected at back edge " + find_back_edge(dag, stuck));
  }
  return dag;
}

std::vector<int> release_ready(AppDag& dag, int completed) {
  DagNode& done = dag.node(completed);
  if (done.state == TaskState::COMPLETE)
    throw std::logic_error("dag: node " + std::to_string(completed) + " completed twice");
  done.state = TaskState::COMPLETE;
  ++dag.completed_count;

  std::vector<int> ready;
  for (int s : done.successors) {
    DagNode& succ = dag.node(s);
    if (succ.remaining_deps <= 0)
      throw std::logic_error("dag: successor " + std::to_string(s) + " over-released");
    if (--succ.remaining_deps == 0) ready.push_back(s);
  }
  return ready;
}

void compute_upward_ranks(AppDag& dag, const CostModel& model,
                          const std::vector<PeClass>& roster_classes) {
  // reverse topological sweep
  std::vector<int> order;
  order.reserve(dag.nodes.size());
  std::vector<int> indeg(dag.nodes.size());
  for (const auto& n : dag.nodes) indeg[size_t(n.node_id)] = int(n.predecessors.size());
  std::deque<int> q(dag.head_ids.begin(), dag.head_ids.end());
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    order.push_back(u);
    for (int s : dag.node(u).successors)
      if (--indeg[size_t(s)] == 0) q.push_back(s);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    DagNode& n = dag.node(*it);
    double own;
    if (n.composite) {
      own = double(model.composite_default_ns());
    } else {
      auto m = model.mean_estimate(n.kernel, roster_classes);
      own = m ? *m : double(model.composite_default_ns());
    }
    double succ_max = 0;
    for (int s : n.successors) succ_max = std::max(succ_max, dag.node(s).uprank);
    n.uprank = own + succ_max;
  }
}

namespace {

std::string arg_str(const nlohmann::json& args, const char* key, int node_id) {
  if (!args.contains(key))
    throw ParseError("dag: node " + std::to_string(node_id) + ": missing arg '" + key + "'");
  return args.at(key).get<std::string>();
}

}  // namespace

std::shared_ptr<Task> make_dag_task(AppDag& dag, int node_id, const CompositeResolver& resolve) {
  DagNode& n = dag.node(node_id);
  auto task = std::make_shared<Task>();
  task->node_id = node_id;
  task->rank_hint = n.uprank;
  FrameArena& arena = *dag.arena;

  if (n.composite) {
    task->composite_name = n.composite_fn;
    task->body = CompositeArgs{resolve(n.composite_fn, arena, n.args)};
    PeSupport s;
    s.add(PeClass::CPU);
    task->supported_types = s;
    return task;
  }

  task->kernel = n.kernel;
  task->supported_types = support_set(n.kernel.name);
  const auto& dims = n.kernel.size_key.dims;
  switch (n.kernel.name) {
    case KernelName::FFT:
    case KernelName::IFFT: {
      uint32_t len = dims.at(0);
      auto& in = arena.cbuf(arg_str(n.args, "in", node_id), len);
      auto& out = arena.cbuf(arg_str(n.args, "out", node_id), len);
      task->body = FftArgs{in.data(), out.data(), len, n.inverse};
      break;
    }
    case KernelName::ZIP: {
      uint32_t len = dims.at(0);
      auto& a = arena.cbuf(arg_str(n.args, "a", node_id), len);
      auto& b = arena.cbuf(arg_str(n.args, "b", node_id), len);
      auto& out = arena.cbuf(arg_str(n.args, "out", node_id), len);
      task->body = ZipArgs{a.data(), b.data(), out.data(), len};
      break;
    }
    case KernelName::GEMM: {
      uint32_t ra = dims.at(0), ca = dims.at(1), cb = dims.at(2);
      auto& a = arena.mat(arg_str(n.args, "a", node_id), ra, ca);
      auto& b = arena.mat(arg_str(n.args, "b", node_id), ca, cb);
      auto& c = arena.mat(arg_str(n.args, "c", node_id), ra, cb);
      task->body = GemmArgs{a.data.data(), b.data.data(), c.data.data(), ra, ca, cb};
      break;
    }
    case KernelName::CONV2D: {
      uint32_t h = dims.at(0), w = dims.at(1), m = dims.at(2);
      auto& in = arena.mat(arg_str(n.args, "in", node_id), h, w);
      auto& mask = arena.mat(arg_str(n.args, "mask", node_id), m, m);
      auto& out = arena.mat(arg_str(n.args, "out", node_id), h, w);
      task->body = Conv2dArgs{in.data.data(), mask.data.data(), out.data.data(), h, w, m};
      break;
    }
  }
  return task;
}

}  // namespace cedr
