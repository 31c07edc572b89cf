#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cedr/kernels.hpp"
#include "cedr/types.hpp"

namespace cedr {

// Named frame buffers owned by one DAG application instance. Nodes reference
// buffers by name; each buffer is touched by one task at a time (the DAG
// ordering provides the exclusion).
class FrameArena {
 public:
  ComplexBuffer& cbuf(const std::string& name, size_t size_hint = 0);
  Matrix& mat(const std::string& name, uint32_t rows = 0, uint32_t cols = 0);
  bool has_cbuf(const std::string& name) const { return cbufs_.count(name) > 0; }
  bool has_mat(const std::string& name) const { return mats_.count(name) > 0; }

  // Stable digest over every buffer, for output-equivalence checks.
  uint64_t digest() const;

 private:
  std::map<std::string, ComplexBuffer> cbufs_;
  std::map<std::string, Matrix> mats_;
};

struct DagNode {
  int node_id = 0;
  bool composite = false;
  KernelId kernel;                // valid when !composite
  bool inverse = false;           // FFT direction
  std::string composite_fn;       // registry function name when composite
  nlohmann::json args;            // buffer names / composite parameters
  std::vector<int> successors;
  std::vector<int> predecessors;
  int remaining_deps = 0;
  TaskState state = TaskState::CREATED;
  double uprank = -1.0;
};

struct AppDag {
  std::string app_name;
  std::vector<DagNode> nodes;  // node_id equals index
  std::vector<int> head_ids;
  int completed_count = 0;
  std::shared_ptr<FrameArena> arena = std::make_shared<FrameArena>();

  DagNode& node(int id) { return nodes.at(size_t(id)); }
  const DagNode& node(int id) const { return nodes.at(size_t(id)); }
};

// Parses and validates a JSON DAG document:
//   {"app_name": "...", "nodes": [{"id": 0, "kernel": "FFT", "size": [64],
//                                  "args": {...}, "successors": [1]}]}
// `kernel` is a closed-set kernel name or a name in `composite_names`.
// Throws ParseError on cycles (naming a back edge), unknown kernels, or
// dangling node references.
AppDag parse_dag(const std::string& text,
                 const std::vector<std::string>& composite_names = {});

// Marks `completed` complete, decrements successor counters, and returns the
// newly ready successors in successor-list order. Calling twice for one node
// is an invariant violation (std::logic_error).
std::vector<int> release_ready(AppDag& dag, int completed);

// Upward rank per node: mean cost on supporting classes plus the max successor
// rank. Used by HEFT_RT for DAG-mode tasks.
void compute_upward_ranks(AppDag& dag, const CostModel& model,
                          const std::vector<PeClass>& roster_classes);

// Resolves a composite function name to a callable bound to this instance.
using CompositeResolver =
    std::function<std::function<void()>(const std::string& fn, FrameArena& arena,
                                        const nlohmann::json& args)>;

// Builds the schedulable task for a node, binding kernel arguments into the
// arena (outputs allocated on demand).
std::shared_ptr<Task> make_dag_task(AppDag& dag, int node_id, const CompositeResolver& resolve);

}  // namespace cedr
