#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cedr/cost_model.hpp"
#include "cedr/types.hpp"

namespace cedr {

using cplx = std::complex<double>;
using ComplexBuffer = std::vector<cplx>;

struct Matrix {
  std::vector<double> data;  // row-major
  uint32_t rows = 0, cols = 0;

  Matrix() = default;
  Matrix(uint32_t r, uint32_t c) : data(size_t(r) * c, 0.0), rows(r), cols(c) {}

  double& at(uint32_t r, uint32_t c) { return data[size_t(r) * cols + c]; }
  double at(uint32_t r, uint32_t c) const { return data[size_t(r) * cols + c]; }
};

struct ComplexMatrix {
  std::vector<cplx> data;  // row-major
  uint32_t rows = 0, cols = 0;

  ComplexMatrix() = default;
  ComplexMatrix(uint32_t r, uint32_t c) : data(size_t(r) * c), rows(r), cols(c) {}

  cplx& at(uint32_t r, uint32_t c) { return data[size_t(r) * cols + c]; }
  const cplx& at(uint32_t r, uint32_t c) const { return data[size_t(r) * cols + c]; }
};

namespace kernels {

constexpr uint32_t kMaxFftPoints = 1u << 20;

// Iterative radix-2 DFT; inverse applies the 1/N scale. Input is not modified.
// Throws std::invalid_argument unless n is a power of two <= 2^20.
void fft(const cplx* in, cplx* out, uint32_t n, bool inverse);
ComplexBuffer fft(const ComplexBuffer& in, bool inverse);

// Element-wise complex product.
void zip(const cplx* a, const cplx* b, cplx* out, uint32_t n);
ComplexBuffer zip(const ComplexBuffer& a, const ComplexBuffer& b);

// C = A x B.
void gemm(const double* a, const double* b, double* c,
          uint32_t rows_a, uint32_t cols_a, uint32_t cols_b);
Matrix gemm(const Matrix& a, const Matrix& b);

// Circular 2D convolution via IFFT(ZIP(FFT(input), FFT(padded mask))).
// Dimensions must be powers of two; mask_dim odd and <= min(h, w).
void conv2d_freq(const double* in, const double* mask, double* out,
                 uint32_t h, uint32_t w, uint32_t mask_dim);
Matrix conv2d_freq(const Matrix& input, const Matrix& mask);

// Shared building blocks (also used by the app pipelines, so API-dispatched
// decompositions produce bit-identical grids).
void fft_rows(ComplexMatrix& m, bool inverse);
void fft_cols(ComplexMatrix& m, bool inverse);
ComplexMatrix to_complex(const Matrix& m);
ComplexMatrix transpose(const ComplexMatrix& m);
// Odd-dim mask embedded in an h x w grid centered at the origin (wrapped).
ComplexMatrix pad_mask_centered(const Matrix& mask, uint32_t h, uint32_t w);

}  // namespace kernels

enum class ChargeMode { SLEEP_REMAINDER, SLEEP_FULL };

// Emulated-accelerator latency source. Results are always computed by the
// portable kernels; PEs charge the modeled duration from the cost model so
// wall-clock behavior tracks the table the schedulers plan with.
struct AcceleratorProfile {
  const CostModel* model = nullptr;
  ChargeMode charge_mode = ChargeMode::SLEEP_REMAINDER;
};

struct ExecOutcome {
  TaskResult result = TaskResult::OK;
  std::string diagnostic;
  int64_t modeled_ns = 0;  // 0 when no cost entry applied
};

// Runs the task body on the calling (worker) thread and charges modeled
// latency. Does not touch task state or timestamps; the worker owns those.
// An unsupported (kernel, PE) pairing is a scheduler bug and comes back ERROR.
ExecOutcome execute_on_pe(Task& task, PeClass pe_class, const AcceleratorProfile& profile);

// Busy-accurate pad: sleeps coarse remainders, spins the tail.
void pad_until(std::chrono::steady_clock::time_point target);

}  // namespace cedr
