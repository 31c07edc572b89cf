#include "cedr/kernels.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace cedr {
namespace kernels {

namespace {

uint32_t bit_reverse(uint32_t x, int log2n) {
  uint32_t r = 0;
  for (int i = 0; i < log2n; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

void fft(const cplx* in, cplx* out, uint32_t n, bool inverse) {
  if (!is_pow2(n) || n > kMaxFftPoints)
    throw std::invalid_argument("fft: length must be a power of two <= 2^20, got " +
                                std::to_string(n));
  int log2n = 0;
  while ((1u << log2n) < n) ++log2n;

  for (uint32_t i = 0; i < n; ++i) out[bit_reverse(i, log2n)] = in[i];

  const double sign = inverse ? 1.0 : -1.0;
  for (uint32_t m = 2; m <= n; m <<= 1) {
    const uint32_t half = m >> 1;
    const cplx wm = std::polar(1.0, sign * 2.0 * std::numbers::pi / double(m));
    for (uint32_t k = 0; k < n; k += m) {
      cplx w{1.0, 0.0};
      for (uint32_t j = 0; j < half; ++j) {
        cplx t = w * out[k + j + half];
        cplx u = out[k + j];
        out[k + j] = u + t;
        out[k + j + half] = u - t;
        w *= wm;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / double(n);
    for (uint32_t i = 0; i < n; ++i) out[i] *= scale;
  }
}

ComplexBuffer fft(const ComplexBuffer& in, bool inverse) {
  ComplexBuffer out(in.size());
  fft(in.data(), out.data(), static_cast<uint32_t>(in.size()), inverse);
  return out;
}

void zip(const cplx* a, const cplx* b, cplx* out, uint32_t n) {
  for (uint32_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

ComplexBuffer zip(const ComplexBuffer& a, const ComplexBuffer& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("zip: length mismatch " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  ComplexBuffer out(a.size());
  zip(a.data(), b.data(), out.data(), static_cast<uint32_t>(a.size()));
  return out;
}

void gemm(const double* a, const double* b, double* c,
          uint32_t rows_a, uint32_t cols_a, uint32_t cols_b) {
  if (rows_a == 0 || cols_a == 0 || cols_b == 0)
    throw std::invalid_argument("gemm: zero dimension");
  for (uint32_t i = 0; i < rows_a; ++i)
    for (uint32_t j = 0; j < cols_b; ++j) c[size_t(i) * cols_b + j] = 0.0;
  for (uint32_t i = 0; i < rows_a; ++i) {
    for (uint32_t k = 0; k < cols_a; ++k) {
      const double aik = a[size_t(i) * cols_a + k];
      const double* brow = b + size_t(k) * cols_b;
      double* crow = c + size_t(i) * cols_b;
      for (uint32_t j = 0; j < cols_b; ++j) crow[j] += aik * brow[j];
    }
  }
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    throw std::invalid_argument("gemm: inner dimensions differ: " + std::to_string(a.cols) +
                                " vs " + std::to_string(b.rows));
  Matrix c(a.rows, b.cols);
  gemm(a.data.data(), b.data.data(), c.data.data(), a.rows, a.cols, b.cols);
  return c;
}

ComplexMatrix to_complex(const Matrix& m) {
  ComplexMatrix out(m.rows, m.cols);
  for (size_t i = 0; i < m.data.size(); ++i) out.data[i] = cplx(m.data[i], 0.0);
  return out;
}

ComplexMatrix transpose(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols, m.rows);
  for (uint32_t r = 0; r < m.rows; ++r)
    for (uint32_t c = 0; c < m.cols; ++c) out.at(c, r) = m.at(r, c);
  return out;
}

void fft_rows(ComplexMatrix& m, bool inverse) {
  ComplexBuffer tmp(m.cols);
  for (uint32_t r = 0; r < m.rows; ++r) {
    fft(&m.at(r, 0), tmp.data(), m.cols, inverse);
    std::copy(tmp.begin(), tmp.end(), &m.at(r, 0));
  }
}

void fft_cols(ComplexMatrix& m, bool inverse) {
  ComplexBuffer col(m.rows), tmp(m.rows);
  for (uint32_t c = 0; c < m.cols; ++c) {
    for (uint32_t r = 0; r < m.rows; ++r) col[r] = m.at(r, c);
    fft(col.data(), tmp.data(), m.rows, inverse);
    for (uint32_t r = 0; r < m.rows; ++r) m.at(r, c) = tmp[r];
  }
}

ComplexMatrix pad_mask_centered(const Matrix& mask, uint32_t h, uint32_t w) {
  ComplexMatrix out(h, w);
  const int m = int(mask.rows);
  const int half = m / 2;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      int r = ((a - half) % int(h) + int(h)) % int(h);
      int c = ((b - half) % int(w) + int(w)) % int(w);
      out.at(uint32_t(r), uint32_t(c)) = cplx(mask.at(uint32_t(a), uint32_t(b)), 0.0);
    }
  }
  return out;
}

void conv2d_freq(const double* in, const double* mask, double* out,
                 uint32_t h, uint32_t w, uint32_t mask_dim) {
  if (mask_dim % 2 == 0)
    throw std::invalid_argument("conv2d_freq: mask dimension must be odd, got " +
                                std::to_string(mask_dim));
  if (mask_dim > h || mask_dim > w)
    throw std::invalid_argument("conv2d_freq: mask larger than image");
  if (!is_pow2(h) || !is_pow2(w))
    throw std::invalid_argument("conv2d_freq: image dimensions must be powers of two");

  Matrix im(h, w);
  std::copy(in, in + size_t(h) * w, im.data.begin());
  Matrix mk(mask_dim, mask_dim);
  std::copy(mask, mask + size_t(mask_dim) * mask_dim, mk.data.begin());

  ComplexMatrix fin = to_complex(im);
  fft_rows(fin, false);
  fft_cols(fin, false);

  ComplexMatrix fmask = pad_mask_centered(mk, h, w);
  fft_rows(fmask, false);
  fft_cols(fmask, false);

  for (size_t i = 0; i < fin.data.size(); ++i) fin.data[i] *= fmask.data[i];

  fft_rows(fin, true);
  fft_cols(fin, true);

  for (size_t i = 0; i < fin.data.size(); ++i) out[i] = fin.data[i].real();
}

Matrix conv2d_freq(const Matrix& input, const Matrix& mask) {
  if (mask.rows != mask.cols) throw std::invalid_argument("conv2d_freq: mask must be square");
  Matrix out(input.rows, input.cols);
  conv2d_freq(input.data.data(), mask.data.data(), out.data.data(),
              input.rows, input.cols, mask.rows);
  return out;
}

}  // namespace kernels

void pad_until(std::chrono::steady_clock::time_point target) {
  using namespace std::chrono;
  // sleep granularity on this class of host is ~1 ms; spin the tail
  for (;;) {
    auto remaining = target - steady_clock::now();
    if (remaining <= nanoseconds(0)) return;
    if (remaining > microseconds(1600)) {
      std::this_thread::sleep_for(remaining - microseconds(1300));
    } else {
      break;
    }
  }
  while (steady_clock::now() < target) {
#if defined(__x86_64__) || defined(__i386__)
    _mm_pause();
#else
    std::this_thread::yield();
#endif
  }
}

ExecOutcome execute_on_pe(Task& task, PeClass pe_class, const AcceleratorProfile& profile) {
  const auto start = std::chrono::steady_clock::now();

  if (!task.is_composite() && !supports(pe_class, task.kernel.name)) {
    return {TaskResult::ERROR,
            std::string("invariant violation: ") + to_string(pe_class) +
                " cannot execute " + to_string(task.kernel.name),
            0};
  }
  if (task.is_composite() && pe_class != PeClass::CPU) {
    return {TaskResult::ERROR, "invariant violation: composite task off CPU", 0};
  }

  int64_t modeled = 0;
  if (profile.model) {
    if (task.is_composite()) {
      modeled = profile.model->composite_default_ns();
    } else if (auto e = profile.model->estimate(task.kernel, pe_class)) {
      modeled = *e;
    }
  }

  ExecOutcome out;
  out.modeled_ns = modeled;
  try {
    if (profile.charge_mode == ChargeMode::SLEEP_FULL && modeled > 0)
      pad_until(start + std::chrono::nanoseconds(modeled));

    std::visit(
        [&](auto& args) {
          using T = std::decay_t<decltype(args)>;
          if constexpr (std::is_same_v<T, FftArgs>) {
            kernels::fft(args.in, args.out, args.n, args.inverse);
          } else if constexpr (std::is_same_v<T, ZipArgs>) {
            kernels::zip(args.a, args.b, args.out, args.n);
          } else if constexpr (std::is_same_v<T, GemmArgs>) {
            kernels::gemm(args.a, args.b, args.c, args.rows_a, args.cols_a, args.cols_b);
          } else if constexpr (std::is_same_v<T, Conv2dArgs>) {
            kernels::conv2d_freq(args.in, args.mask, args.out, args.h, args.w, args.mask_dim);
          } else if constexpr (std::is_same_v<T, CompositeArgs>) {
            args.fn();
          }
        },
        task.body);

    if (profile.charge_mode == ChargeMode::SLEEP_REMAINDER && modeled > 0)
      pad_until(start + std::chrono::nanoseconds(modeled));
  } catch (const std::exception& e) {
    out.result = TaskResult::ERROR;
    out.diagnostic = e.what();
  }
  return out;
}

}  // namespace cedr
