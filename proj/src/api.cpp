#include "cedr/api.hpp"

namespace cedr {

TaskResult TaskHandle::wait() {
  if (!task_) throw std::logic_error("wait on empty handle");
  if (waited_) throw std::logic_error("handle already waited");
  waited_ = true;
  return task_->completion.wait();
}

TaskResult TaskHandle::result() const {
  if (!task_) return TaskResult::PENDING;
  return task_->completion.signaled() ? task_->completion.wait() : TaskResult::PENDING;
}

const std::string& TaskHandle::diagnostic() const {
  static const std::string empty;
  return task_ ? task_->completion.diagnostic() : empty;
}

std::vector<TaskResult> wait_all(std::span<TaskHandle> handles) {
  std::vector<TaskResult> out;
  out.reserve(handles.size());
  for (auto& h : handles) out.push_back(h.wait());
  return out;
}

std::shared_ptr<Task> make_fft_task(const cplx* in, cplx* out, uint32_t n, bool inverse) {
  auto t = std::make_shared<Task>();
  t->kernel = {inverse ? KernelName::IFFT : KernelName::FFT, SizeKey{n}};
  t->body = FftArgs{in, out, n, inverse};
  t->supported_types = support_set(t->kernel.name);
  return t;
}

std::shared_ptr<Task> make_zip_task(const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  auto t = std::make_shared<Task>();
  t->kernel = {KernelName::ZIP, SizeKey{n}};
  t->body = ZipArgs{a, b, out, n};
  t->supported_types = support_set(KernelName::ZIP);
  return t;
}

std::shared_ptr<Task> make_gemm_task(const double* a, const double* b, double* c,
                                     uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) {
  auto t = std::make_shared<Task>();
  t->kernel = {KernelName::GEMM, SizeKey{rows_a, cols_a, cols_b}};
  t->body = GemmArgs{a, b, c, rows_a, cols_a, cols_b};
  t->supported_types = support_set(KernelName::GEMM);
  return t;
}

std::shared_ptr<Task> make_conv2d_task(const double* in, const double* mask, double* out,
                                       uint32_t h, uint32_t w, uint32_t mask_dim) {
  auto t = std::make_shared<Task>();
  t->kernel = {KernelName::CONV2D, SizeKey{h, w, mask_dim}};
  t->body = Conv2dArgs{in, mask, out, h, w, mask_dim};
  t->supported_types = support_set(KernelName::CONV2D);
  return t;
}

void DirectExecutor::fft(const cplx* in, cplx* out, uint32_t n, bool inverse) {
  kernels::fft(in, out, n, inverse);
}
void DirectExecutor::zip(const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  kernels::zip(a, b, out, n);
}
void DirectExecutor::gemm(const double* a, const double* b, double* c,
                          uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) {
  kernels::gemm(a, b, c, rows_a, cols_a, cols_b);
}
void DirectExecutor::conv2d(const double* in, const double* mask, double* out,
                            uint32_t h, uint32_t w, uint32_t mask_dim) {
  kernels::conv2d_freq(in, mask, out, h, w, mask_dim);
}

namespace {

TaskHandle completed_handle(std::shared_ptr<Task> t) {
  t->completion.signal(TaskResult::OK);
  return TaskHandle(std::move(t));
}

}  // namespace

TaskHandle DirectExecutor::fft_nb(const cplx* in, cplx* out, uint32_t n, bool inverse) {
  kernels::fft(in, out, n, inverse);
  return completed_handle(make_fft_task(in, out, n, inverse));
}
TaskHandle DirectExecutor::zip_nb(const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  kernels::zip(a, b, out, n);
  return completed_handle(make_zip_task(a, b, out, n));
}
TaskHandle DirectExecutor::gemm_nb(const double* a, const double* b, double* c,
                                   uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) {
  kernels::gemm(a, b, c, rows_a, cols_a, cols_b);
  return completed_handle(make_gemm_task(a, b, c, rows_a, cols_a, cols_b));
}

TaskHandle RuntimeExecutor::enqueue(std::shared_ptr<Task> t) {
  ctx_.rt.enqueue_task(ctx_, t);
  return TaskHandle(std::move(t));
}

namespace {

void wait_or_throw(TaskHandle h) {
  if (h.wait() == TaskResult::ERROR)
    throw std::runtime_error("kernel task failed: " + h.diagnostic());
}

}  // namespace

void RuntimeExecutor::fft(const cplx* in, cplx* out, uint32_t n, bool inverse) {
  wait_or_throw(enqueue(make_fft_task(in, out, n, inverse)));
}
void RuntimeExecutor::zip(const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  wait_or_throw(enqueue(make_zip_task(a, b, out, n)));
}
void RuntimeExecutor::gemm(const double* a, const double* b, double* c,
                           uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) {
  wait_or_throw(enqueue(make_gemm_task(a, b, c, rows_a, cols_a, cols_b)));
}
void RuntimeExecutor::conv2d(const double* in, const double* mask, double* out,
                             uint32_t h, uint32_t w, uint32_t mask_dim) {
  wait_or_throw(enqueue(make_conv2d_task(in, mask, out, h, w, mask_dim)));
}
TaskHandle RuntimeExecutor::fft_nb(const cplx* in, cplx* out, uint32_t n, bool inverse) {
  return enqueue(make_fft_task(in, out, n, inverse));
}
TaskHandle RuntimeExecutor::zip_nb(const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  return enqueue(make_zip_task(a, b, out, n));
}
TaskHandle RuntimeExecutor::gemm_nb(const double* a, const double* b, double* c,
                                    uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) {
  return enqueue(make_gemm_task(a, b, c, rows_a, cols_a, cols_b));
}

void cedr_fft(AppContext& ctx, const cplx* in, cplx* out, uint32_t n, bool forward) {
  RuntimeExecutor(ctx).fft(in, out, n, !forward);
}
void cedr_ifft(AppContext& ctx, const cplx* in, cplx* out, uint32_t n) {
  RuntimeExecutor(ctx).fft(in, out, n, true);
}
void cedr_zip(AppContext& ctx, const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  RuntimeExecutor(ctx).zip(a, b, out, n);
}
void cedr_gemm(AppContext& ctx, const double* a, const double* b, double* c,
               uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) {
  RuntimeExecutor(ctx).gemm(a, b, c, rows_a, cols_a, cols_b);
}
void cedr_conv2d(AppContext& ctx, const double* in, uint32_t h, uint32_t w,
                 const double* mask, uint32_t mask_dim, double* out) {
  RuntimeExecutor(ctx).conv2d(in, mask, out, h, w, mask_dim);
}

TaskHandle cedr_fft_nb(AppContext& ctx, const cplx* in, cplx* out, uint32_t n, bool forward) {
  return RuntimeExecutor(ctx).fft_nb(in, out, n, !forward);
}
TaskHandle cedr_zip_nb(AppContext& ctx, const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  return RuntimeExecutor(ctx).zip_nb(a, b, out, n);
}

}  // namespace cedr
