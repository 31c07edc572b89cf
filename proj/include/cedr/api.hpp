#pragma once

#include <memory>
#include <span>

#include "cedr/kernels.hpp"
#include "cedr/runtime.hpp"
#include "cedr/types.hpp"

namespace cedr {

// Handle for a non-blocking kernel call. wait() may be called at most once.
class TaskHandle {
 public:
  TaskHandle() = default;
  explicit TaskHandle(std::shared_ptr<Task> t) : task_(std::move(t)) {}

  // Blocks until the worker has fully written the outputs; returns OK or ERROR.
  TaskResult wait();
  TaskResult result() const;
  const std::string& diagnostic() const;
  uint64_t task_id() const { return task_ ? task_->task_id : 0; }
  bool valid() const { return task_ != nullptr; }

 private:
  std::shared_ptr<Task> task_;
  bool waited_ = false;
};

std::vector<TaskResult> wait_all(std::span<TaskHandle> handles);

// Kernel dispatch surface shared by the applications: the runtime-backed
// implementation enqueues tasks, the direct one calls the kernels inline so
// an application can be validated as an ordinary CPU library first.
class KernelExecutor {
 public:
  virtual ~KernelExecutor() = default;

  virtual void fft(const cplx* in, cplx* out, uint32_t n, bool inverse) = 0;
  virtual void zip(const cplx* a, const cplx* b, cplx* out, uint32_t n) = 0;
  virtual void gemm(const double* a, const double* b, double* c,
                    uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) = 0;
  virtual void conv2d(const double* in, const double* mask, double* out,
                      uint32_t h, uint32_t w, uint32_t mask_dim) = 0;

  virtual TaskHandle fft_nb(const cplx* in, cplx* out, uint32_t n, bool inverse) = 0;
  virtual TaskHandle zip_nb(const cplx* a, const cplx* b, cplx* out, uint32_t n) = 0;
  virtual TaskHandle gemm_nb(const double* a, const double* b, double* c,
                             uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) = 0;
};

// Calls kernels inline; non-blocking variants complete eagerly.
class DirectExecutor final : public KernelExecutor {
 public:
  void fft(const cplx* in, cplx* out, uint32_t n, bool inverse) override;
  void zip(const cplx* a, const cplx* b, cplx* out, uint32_t n) override;
  void gemm(const double* a, const double* b, double* c,
            uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) override;
  void conv2d(const double* in, const double* mask, double* out,
              uint32_t h, uint32_t w, uint32_t mask_dim) override;
  TaskHandle fft_nb(const cplx* in, cplx* out, uint32_t n, bool inverse) override;
  TaskHandle zip_nb(const cplx* a, const cplx* b, cplx* out, uint32_t n) override;
  TaskHandle gemm_nb(const double* a, const double* b, double* c,
                     uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) override;
};

// Dispatches through the runtime's ready queue. Blocking calls enqueue and
// wait; buffers stay caller-owned and are lent out until completion.
class RuntimeExecutor final : public KernelExecutor {
 public:
  explicit RuntimeExecutor(AppContext& ctx) : ctx_(ctx) {}

  void fft(const cplx* in, cplx* out, uint32_t n, bool inverse) override;
  void zip(const cplx* a, const cplx* b, cplx* out, uint32_t n) override;
  void gemm(const double* a, const double* b, double* c,
            uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) override;
  void conv2d(const double* in, const double* mask, double* out,
              uint32_t h, uint32_t w, uint32_t mask_dim) override;
  TaskHandle fft_nb(const cplx* in, cplx* out, uint32_t n, bool inverse) override;
  TaskHandle zip_nb(const cplx* a, const cplx* b, cplx* out, uint32_t n) override;
  TaskHandle gemm_nb(const double* a, const double* b, double* c,
                     uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) override;

 private:
  TaskHandle enqueue(std::shared_ptr<Task> t);
  AppContext& ctx_;
};

// Blocking libCEDR-style entry points.
void cedr_fft(AppContext& ctx, const cplx* in, cplx* out, uint32_t n, bool forward);
void cedr_ifft(AppContext& ctx, const cplx* in, cplx* out, uint32_t n);
void cedr_zip(AppContext& ctx, const cplx* a, const cplx* b, cplx* out, uint32_t n);
void cedr_gemm(AppContext& ctx, const double* a, const double* b, double* c,
               uint32_t rows_a, uint32_t cols_a, uint32_t cols_b);
void cedr_conv2d(AppContext& ctx, const double* in, uint32_t h, uint32_t w,
                 const double* mask, uint32_t mask_dim, double* out);

// Non-blocking variants.
TaskHandle cedr_fft_nb(AppContext& ctx, const cplx* in, cplx* out, uint32_t n, bool forward);
TaskHandle cedr_zip_nb(AppContext& ctx, const cplx* a, const cplx* b, cplx* out, uint32_t n);

// Task construction shared with tests.
std::shared_ptr<Task> make_fft_task(const cplx* in, cplx* out, uint32_t n, bool inverse);
std::shared_ptr<Task> make_zip_task(const cplx* a, const cplx* b, cplx* out, uint32_t n);
std::shared_ptr<Task> make_gemm_task(const double* a, const double* b, double* c,
                                     uint32_t rows_a, uint32_t cols_a, uint32_t cols_b);
std::shared_ptr<Task> make_conv2d_task(const double* in, const double* mask, double* out,
                                       uint32_t h, uint32_t w, uint32_t mask_dim);

}  // namespace cedr
