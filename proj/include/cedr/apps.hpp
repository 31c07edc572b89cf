#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cedr/api.hpp"
#include "cedr/kernels.hpp"
#include "cedr/runtime.hpp"

namespace cedr::apps {

// Deterministic input synthesis (stable across platforms, unlike <random>
// distributions).
uint64_t mix_seed(uint64_t seed, uint64_t salt);
double next_unit(uint64_t& state);  // [0, 1)
ComplexBuffer synth_complex(uint64_t seed, size_t n);
Matrix synth_image(uint64_t seed, uint32_t h, uint32_t w);
std::vector<uint8_t> synth_bits(uint64_t seed, size_t n);

uint64_t digest_bytes(const void* p, size_t n, uint64_t h = 1469598103934665603ull);
uint64_t digest_cbuf(const ComplexBuffer& b, uint64_t h = 1469598103934665603ull);
uint64_t digest_matrix(const Matrix& m, uint64_t h = 1469598103934665603ull);

// ---- Pulse Doppler ----------------------------------------------------
struct PdParams {
  uint32_t num_pulses = 64;
  uint32_t samples_per_pulse = 64;
};

// frame is num_pulses x samples_per_pulse, row-major. Stage 1 runs a range
// FFT per pulse (non-blocking wave), stage 2 a Doppler FFT per range bin.
// Returns the |.| map indexed [doppler_bin x range_bin].
Matrix pulse_doppler(KernelExecutor& ex, const ComplexBuffer& frame, const PdParams& p);

// Synthetic moving target: phase step 2*pi*k/num_pulses between pulses.
ComplexBuffer pd_target_frame(const PdParams& p, uint32_t doppler_bin, uint64_t seed);
// Doppler bin holding the map's global maximum.
uint32_t pd_peak_bin(const Matrix& map);

// ---- WiFi TX ----------------------------------------------------------
struct TxParams {
  uint32_t num_packets = 16;
  uint8_t scramble_seed = 0x5d;  // 7-bit LFSR state
};
constexpr uint32_t kTxPacketBits = 64;
constexpr uint32_t kTxSymbolLen = 128;

// x^7 + x^4 + 1 additive scrambler; applying twice with one seed restores input.
std::vector<uint8_t> scramble(const std::vector<uint8_t>& bits, uint8_t seed);
// rate-1/2 convolutional encoder, constraint length 7, generators 133/171 octal.
std::vector<uint8_t> conv_encode(const std::vector<uint8_t>& bits);

// 64-bit packets -> scramble -> encode -> BPSK -> 128-point IFFT per packet.
// Returns the concatenated time-domain symbols (num_packets * 128 samples).
ComplexBuffer wifi_tx(KernelExecutor& ex, const std::vector<uint8_t>& payload_bits,
                      const TxParams& p);

// ---- Lane Detection ---------------------------------------------------
struct LdParams {
  uint32_t image_h = 128;
  uint32_t image_w = 64;
  uint32_t mask_dim = 3;
  double threshold_frac = 0.25;  // of the peak combined response
};

// Frequency-domain convolution with four directional edge masks, decomposed
// into row/column FFT, ZIP and IFFT tasks dispatched non-blocking; thresholds
// the combined response into a binary mask.
Matrix lane_detection(KernelExecutor& ex, const Matrix& image, const LdParams& p);
// Spatial-domain reference with identical padding and threshold rule.
Matrix lane_detection_spatial(const Matrix& image, const LdParams& p);
std::vector<Matrix> ld_masks(uint32_t mask_dim);

// ---- Fig-2 style loop demo ---------------------------------------------
// n iterations of FFT -> ZIP -> IFFT over one buffer; returns a checksum.
uint64_t loop_demo(KernelExecutor& ex, uint32_t iterations, uint64_t seed);

// ---- task-count formulas (exact, any parameterization) -----------------
uint64_t pd_task_count(const PdParams& p);           // FFT tasks
uint64_t tx_task_count(const TxParams& p);           // IFFT tasks
uint64_t ld_fft_task_count(const LdParams& p);       // forward FFT tasks
uint64_t ld_ifft_task_count(const LdParams& p);      // inverse FFT tasks
uint64_t loop_demo_task_count(uint32_t iterations);  // API-mode tasks

// Registered application table (entries, DAG twins, composites, frame sizes).
const AppRegistry& registry();

}  // namespace cedr::apps
