#pragma once

#include <atomic>
#include <complex>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cedr {

using std::int64_t;
using std::uint32_t;
using std::uint64_t;

// Monotonic nanoseconds since runtime epoch. Wall-clock appears only in log headers.
using TimeNs = int64_t;

enum class KernelName { FFT, IFFT, GEMM, CONV2D, ZIP };
enum class PeClass { CPU, FFT_ACC, MMULT_ACC, GPU_ACC };

constexpr int kKernelCount = 5;
constexpr int kPeClassCount = 4;

const char* to_string(KernelName k);
const char* to_string(PeClass p);
std::optional<KernelName> kernel_from_string(const std::string& s);
std::optional<PeClass> pe_class_from_string(const std::string& s);

// CPU supports every kernel; accelerators support their function class only.
// GPU_ACC mirrors the CUDA FFT/ZIP kernel pairing.
bool supports(PeClass pe, KernelName k);

// Round up to the next power of two (identity on powers of two).
uint32_t next_pow2(uint32_t v);
bool is_pow2(uint32_t v);

// Problem-size descriptor: FFT/ZIP {n}; GEMM {rows_a, cols_a, cols_b}; CONV2D {h, w, mask_dim}.
struct SizeKey {
  std::vector<uint32_t> dims;

  SizeKey() = default;
  SizeKey(std::initializer_list<uint32_t> d) : dims(d) {}

  bool operator==(const SizeKey&) const = default;
};

// Power-of-two bucket per dimension, e.g. {300} -> "512", {7,5,3} -> "8x8x4".
SizeKey bucket(const SizeKey& key);
std::string bucket_string(const SizeKey& bucketed);
std::optional<SizeKey> size_key_from_string(const std::string& s);

struct KernelId {
  KernelName name = KernelName::FFT;
  SizeKey size_key;

  bool operator==(const KernelId&) const = default;
};

// Bitmask of PeClass values.
struct PeSupport {
  uint32_t mask = 0;

  void add(PeClass p) { mask |= 1u << static_cast<int>(p); }
  bool contains(PeClass p) const { return mask & (1u << static_cast<int>(p)); }
  bool empty() const { return mask == 0; }
};

// Every PE class that supports `k`, CPU always included.
PeSupport support_set(KernelName k);

enum class TaskState { CREATED, READY, RUNNING, COMPLETE };
enum class TaskResult { PENDING, OK, ERROR };

const char* to_string(TaskState s);
const char* to_string(TaskResult r);

// One-shot completion signal: single signaler, at most one waiter.
class CompletionEvent {
 public:
  void signal(TaskResult r, std::string diagnostic = {});
  // Blocks until signaled; never returns PENDING.
  TaskResult wait();
  bool signaled() const;
  const std::string& diagnostic() const { return diagnostic_; }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  TaskResult result_ = TaskResult::PENDING;
  std::string diagnostic_;
};

struct FftArgs {
  const std::complex<double>* in = nullptr;
  std::complex<double>* out = nullptr;
  uint32_t n = 0;
  bool inverse = false;
};

struct ZipArgs {
  const std::complex<double>* a = nullptr;
  const std::complex<double>* b = nullptr;
  std::complex<double>* out = nullptr;
  uint32_t n = 0;
};

struct GemmArgs {
  const double* a = nullptr;
  const double* b = nullptr;
  double* c = nullptr;
  uint32_t rows_a = 0, cols_a = 0, cols_b = 0;
};

struct Conv2dArgs {
  const double* in = nullptr;
  const double* mask = nullptr;
  double* out = nullptr;
  uint32_t h = 0, w = 0, mask_dim = 0;
};

// DAG composite node body: whole-function unit of work, CPU only.
struct CompositeArgs {
  std::function<void()> fn;
};

using TaskBody = std::variant<FftArgs, ZipArgs, GemmArgs, Conv2dArgs, CompositeArgs>;

// One schedulable kernel invocation. Value-like apart from the completion event;
// buffers referenced by the body are exclusively lent to the runtime between
// enqueue and completion.
struct Task {
  uint64_t task_id = 0;
  uint32_t app_id = 0;
  KernelId kernel;
  std::string composite_name;  // nonempty iff body holds CompositeArgs
  TaskBody body;
  PeSupport supported_types;
  std::atomic<TaskState> state{TaskState::CREATED};

  TimeNs enqueue_ts = 0;
  TimeNs dispatch_ts = 0;
  TimeNs complete_ts = 0;
  int assigned_pe = -1;  // set only once RUNNING

  int node_id = -1;            // DAG node id, -1 for API tasks
  double rank_hint = -1.0;     // DAG upward rank (ns); <0 when absent

  CompletionEvent completion;

  bool is_composite() const { return std::holds_alternative<CompositeArgs>(body); }
};

struct ProcessingElement {
  int id = 0;
  PeClass pe_type = PeClass::CPU;
  TimeNs busy_until = 0;        // never decreases except at runtime reset
  uint64_t assigned_count = 0;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runtime rejected the call (not running, or shutting down).
class ConnectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cedr
