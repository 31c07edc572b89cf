#include "cedr/types.hpp"

#include <sstream>

namespace cedr {

const char* to_string(KernelName k) {
  switch (k) {
    case KernelName::FFT: return "FFT";
    case KernelName::IFFT: return "IFFT";
    case KernelName::GEMM: return "GEMM";
    case KernelName::CONV2D: return "CONV2D";
    case KernelName::ZIP: return "ZIP";
  }
  return "?";
}

const char* to_string(PeClass p) {
  switch (p) {
    case PeClass::CPU: return "CPU";
    case PeClass::FFT_ACC: return "FFT_ACC";
    case PeClass::MMULT_ACC: return "MMULT_ACC";
    case PeClass::GPU_ACC: return "GPU_ACC";
  }
  return "?";
}

const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::CREATED: return "CREATED";
    case TaskState::READY: return "READY";
    case TaskState::RUNNING: return "RUNNING";
    case TaskState::COMPLETE: return "COMPLETE";
  }
  return "?";
}

const char* to_string(TaskResult r) {
  switch (r) {
    case TaskResult::PENDING: return "PENDING";
    case TaskResult::OK: return "OK";
    case TaskResult::ERROR: return "ERROR";
  }
  return "?";
}

std::optional<KernelName> kernel_from_string(const std::string& s) {
  if (s == "FFT") return KernelName::FFT;
  if (s == "IFFT") return KernelName::IFFT;
  if (s == "GEMM") return KernelName::GEMM;
  if (s == "CONV2D") return KernelName::CONV2D;
  if (s == "ZIP") return KernelName::ZIP;
  return std::nullopt;
}

std::optional<PeClass> pe_class_from_string(const std::string& s) {
  if (s == "CPU") return PeClass::CPU;
  if (s == "FFT_ACC") return PeClass::FFT_ACC;
  if (s == "MMULT_ACC") return PeClass::MMULT_ACC;
  if (s == "GPU_ACC") return PeClass::GPU_ACC;
  return std::nullopt;
}

bool supports(PeClass pe, KernelName k) {
  switch (pe) {
    case PeClass::CPU:
      return true;
    case PeClass::FFT_ACC:
      return k == KernelName::FFT || k == KernelName::IFFT;
    case PeClass::MMULT_ACC:
      return k == KernelName::GEMM;
    case PeClass::GPU_ACC:
      return k == KernelName::FFT || k == KernelName::IFFT || k == KernelName::ZIP;
  }
  return false;
}

PeSupport support_set(KernelName k) {
  PeSupport s;
  for (int i = 0; i < kPeClassCount; ++i) {
    auto pe = static_cast<PeClass>(i);
    if (supports(pe, k)) s.add(pe);
  }
  return s;
}

bool is_pow2(uint32_t v) { return v != 0 && (v & (v - 1)) == 0; }

uint32_t next_pow2(uint32_t v) {
  if (v <= 1) return 1;
  uint32_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

SizeKey bucket(const SizeKey& key) {
  SizeKey b;
  b.dims.reserve(key.dims.size());
  for (uint32_t d : key.dims) b.dims.push_back(next_pow2(d));
  return b;
}

std::string bucket_string(const SizeKey& bucketed) {
  std::ostringstream os;
  for (size_t i = 0; i < bucketed.dims.size(); ++i) {
    if (i) os << 'x';
    os << bucketed.dims[i];
  }
  return os.str();
}

std::optional<SizeKey> size_key_from_string(const std::string& s) {
  SizeKey k;
  uint64_t cur = 0;
  bool have_digit = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      cur = cur * 10 + static_cast<uint64_t>(c - '0');
      if (cur > 0xffffffffull) return std::nullopt;
      have_digit = true;
    } else if (c == 'x' && have_digit) {
      k.dims.push_back(static_cast<uint32_t>(cur));
      cur = 0;
      have_digit = false;
    } else {
      return std::nullopt;
    }
  }
  if (!have_digit) return std::nullopt;
  k.dims.push_back(static_cast<uint32_t>(cur));
  return k;
}

void CompletionEvent::signal(TaskResult r, std::string diagnostic) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    result_ = r;
    diagnostic_ = std::move(diagnostic);
  }
  cv_.notify_all();
}

TaskResult CompletionEvent::wait() {
  std::unique_lock<std::mutex> lk(mu_);
  cv_.wait(lk, [&] { return result_ != TaskResult::PENDING; });
  return result_;
}

bool CompletionEvent::signaled() const {
  std::lock_guard<std::mutex> lk(mu_);
  return result_ != TaskResult::PENDING;
}

}  // namespace cedr
