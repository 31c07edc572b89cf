#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cedr/types.hpp"

namespace cedr {

// Expected execution time per (kernel, size bucket, PE type), in nanoseconds.
//
// File format (one record per line, '#' comments allowed):
//   cedr-cost-model v1
//   FFT 256 CPU 180000
//   GEMM 16x16x16 MMULT_ACC 42000
class CostModel {
 public:
  struct Entry {
    SizeKey bucket;
    int64_t duration_ns = 0;
  };

  static CostModel load(const std::string& path);
  static CostModel parse(const std::string& text, const std::string& origin = "<string>");
  void save(const std::string& path) const;
  std::string serialize() const;

  // Throws ConfigError on any violated invariant: CPU row missing for a kernel
  // seen in the table, non-positive duration, unsupported (kernel, pe) pair.
  void validate() const;

  void set(KernelName k, const SizeKey& bucketed, PeClass pe, int64_t duration_ns);

  // Bucketed lookup; absent when the PE class does not support the kernel.
  // A supported pair whose exact bucket is missing falls back to the nearest
  // recorded bucket (larger preferred).
  std::optional<int64_t> estimate(const KernelId& kernel, PeClass pe) const;

  // Mean estimate across the PE classes in `classes` that support the kernel.
  std::optional<double> mean_estimate(const KernelId& kernel, const std::vector<PeClass>& classes) const;

  // True when every kernel of the closed set has an entry for `pe`
  // restricted to the kernels that PE supports.
  bool covers(PeClass pe) const;

  bool empty() const { return table_.empty(); }
  size_t size() const { return table_.size(); }

  // Flat cost for DAG composite nodes, which have no kernel identity.
  int64_t composite_default_ns() const { return composite_default_ns_; }
  void set_composite_default_ns(int64_t ns) { composite_default_ns_ = ns; }

  // FNV-1a over the serialized table; recorded in run headers.
  uint64_t content_hash() const;

 private:
  using Key = std::pair<KernelName, PeClass>;
  std::map<Key, std::vector<Entry>> table_;  // entries sorted by bucket dims
  int64_t composite_default_ns_ = 100'000;
};

}  // namespace cedr
