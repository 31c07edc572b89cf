#include "cedr/apps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace cedr::apps {

namespace {

uint64_t xorshift64s(uint64_t& s) {
  s ^= s >> 12;
  s ^= s << 25;
  s ^= s >> 27;
  return s * 0x2545F4914F6CDD1Dull;
}

}  // namespace

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t s = seed ^ (salt * 0x9E3779B97F4A7C15ull) ^ 0x6A09E667F3BCC909ull;
  xorshift64s(s);
  return s ? s : 1;
}

double next_unit(uint64_t& state) {
  return double(xorshift64s(state) >> 11) * 0x1.0p-53;
}

ComplexBuffer synth_complex(uint64_t seed, size_t n) {
  uint64_t s = seed ? seed : 1;
  ComplexBuffer out(n);
  for (auto& c : out)
    c = cplx(2.0 * next_unit(s) - 1.0, 2.0 * next_unit(s) - 1.0);
  return out;
}

Matrix synth_image(uint64_t seed, uint32_t h, uint32_t w) {
  uint64_t s = seed ? seed : 1;
  Matrix m(h, w);
  // smooth-ish road scene: horizontal gradient with lane-like bright bands
  for (uint32_t r = 0; r < h; ++r)
    for (uint32_t c = 0; c < w; ++c) {
      double v = 0.3 + 0.2 * double(r) / h;
      if ((c + r / 4) % 16 < 2) v += 0.5;
      v += 0.05 * (2.0 * next_unit(s) - 1.0);
      m.at(r, c) = v;
    }
  return m;
}

std::vector<uint8_t> synth_bits(uint64_t seed, size_t n) {
  uint64_t s = seed ? seed : 1;
  std::vector<uint8_t> out(n);
  for (auto& b : out) b = uint8_t(xorshift64s(s) & 1);
  return out;
}

uint64_t digest_bytes(const void* p, size_t n, uint64_t h) {
  const unsigned char* c = static_cast<const unsigned char*>(p);
  for (size_t i = 0; i < n; ++i) {
    h ^= c[i];
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t digest_cbuf(const ComplexBuffer& b, uint64_t h) {
  return digest_bytes(b.data(), b.size() * sizeof(cplx), h);
}

uint64_t digest_matrix(const Matrix& m, uint64_t h) {
  return digest_bytes(m.data.data(), m.data.size() * sizeof(double), h);
}

// ---- Pulse Doppler ----------------------------------------------------

Matrix pulse_doppler(KernelExecutor& ex, const ComplexBuffer& frame, const PdParams& p) {
  const uint32_t P = p.num_pulses, S = p.samples_per_pulse;
  if (!is_pow2(P) || !is_pow2(S))
    throw std::invalid_argument("pulse_doppler: dimensions must be powers of two");
  if (frame.size() != size_t(P) * S)
    throw std::invalid_argument("pulse_doppler: frame size mismatch");

  // stage 1: range FFT per pulse
  std::vector<ComplexBuffer> range(P, ComplexBuffer(S));
  {
    std::vector<TaskHandle> hs;
    hs.reserve(P);
    for (uint32_t i = 0; i < P; ++i)
      hs.push_back(ex.fft_nb(frame.data() + size_t(i) * S, range[i].data(), S, false));
    wait_all(hs);
  }

  // stage 2: Doppler FFT per range bin
  std::vector<ComplexBuffer> dop_in(S, ComplexBuffer(P)), dop_out(S, ComplexBuffer(P));
  for (uint32_t s = 0; s < S; ++s)
    for (uint32_t i = 0; i < P; ++i) dop_in[s][i] = range[i][s];
  {
    std::vector<TaskHandle> hs;
    hs.reserve(S);
    for (uint32_t s = 0; s < S; ++s)
      hs.push_back(ex.fft_nb(dop_in[s].data(), dop_out[s].data(), P, false));
    wait_all(hs);
  }

  Matrix map(P, S);
  for (uint32_t d = 0; d < P; ++d)
    for (uint32_t s = 0; s < S; ++s) map.at(d, s) = std::abs(dop_out[s][d]);
  return map;
}

ComplexBuffer pd_target_frame(const PdParams& p, uint32_t doppler_bin, uint64_t seed) {
  ComplexBuffer base = synth_complex(mix_seed(seed, 17), p.samples_per_pulse);
  ComplexBuffer frame(size_t(p.num_pulses) * p.samples_per_pulse);
  for (uint32_t i = 0; i < p.num_pulses; ++i) {
    const cplx rot =
        std::polar(1.0, 2.0 * std::numbers::pi * double(doppler_bin) * i / p.num_pulses);
    for (uint32_t s = 0; s < p.samples_per_pulse; ++s)
      frame[size_t(i) * p.samples_per_pulse + s] = base[s] * rot;
  }
  return frame;
}

uint32_t pd_peak_bin(const Matrix& map) {
  uint32_t best_d = 0;
  double best = -1;
  for (uint32_t d = 0; d < map.rows; ++d)
    for (uint32_t s = 0; s < map.cols; ++s)
      if (map.at(d, s) > best) {
        best = map.at(d, s);
        best_d = d;
      }
  return best_d;
}

// ---- WiFi TX ----------------------------------------------------------

std::vector<uint8_t> scramble(const std::vector<uint8_t>& bits, uint8_t seed) {
  uint8_t state = seed & 0x7f;
  std::vector<uint8_t> out(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) {
    uint8_t fb = ((state >> 6) ^ (state >> 3)) & 1;  // x^7 + x^4 + 1
    state = uint8_t(((state << 1) | fb) & 0x7f);
    out[i] = bits[i] ^ fb;
  }
  return out;
}

std::vector<uint8_t> conv_encode(const std::vector<uint8_t>& bits) {
  // generators 133/171 (octal), newest bit in the register MSB
  constexpr uint32_t g0 = 0b1011011, g1 = 0b1111001;
  uint32_t reg = 0;
  std::vector<uint8_t> out;
  out.reserve(bits.size() * 2);
  for (uint8_t b : bits) {
    reg = ((reg << 1) | (b & 1)) & 0x7f;
    out.push_back(uint8_t(std::popcount(reg & g0) & 1));
    out.push_back(uint8_t(std::popcount(reg & g1) & 1));
  }
  return out;
}

ComplexBuffer wifi_tx(KernelExecutor& ex, const std::vector<uint8_t>& payload_bits,
                      const TxParams& p) {
  if (payload_bits.empty()) throw std::invalid_argument("wifi_tx: empty payload");
  if (payload_bits.size() != size_t(p.num_packets) * kTxPacketBits)
    throw std::invalid_argument("wifi_tx: payload must be num_packets * 64 bits");

  ComplexBuffer out(size_t(p.num_packets) * kTxSymbolLen);
  std::vector<uint8_t> packet(kTxPacketBits);
  ComplexBuffer freq(kTxSymbolLen);
  for (uint32_t i = 0; i < p.num_packets; ++i) {
    std::copy_n(payload_bits.begin() + size_t(i) * kTxPacketBits, kTxPacketBits, packet.begin());
    auto coded = conv_encode(scramble(packet, p.scramble_seed));
    for (uint32_t k = 0; k < kTxSymbolLen; ++k)
      freq[k] = cplx(coded[k] ? -1.0 : 1.0, 0.0);  // BPSK
    ex.fft(freq.data(), out.data() + size_t(i) * kTxSymbolLen, kTxSymbolLen, true);
  }
  return out;
}

// ---- Lane Detection ---------------------------------------------------

std::vector<Matrix> ld_masks(uint32_t mask_dim) {
  if (mask_dim % 2 == 0 || mask_dim < 3)
    throw std::invalid_argument("ld_masks: mask_dim must be odd and >= 3");
  // sobel-style horizontal/vertical/diagonal kernels centered in mask_dim^2
  const double g[4][3][3] = {
      {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}},
      {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}},
      {{0, 1, 2}, {-1, 0, 1}, {-2, -1, 0}},
      {{-2, -1, 0}, {-1, 0, 1}, {0, 1, 2}},
  };
  std::vector<Matrix> masks;
  const uint32_t off = (mask_dim - 3) / 2;
  for (int m = 0; m < 4; ++m) {
    Matrix mk(mask_dim, mask_dim);
    for (uint32_t r = 0; r < 3; ++r)
      for (uint32_t c = 0; c < 3; ++c) mk.at(r + off, c + off) = g[m][r][c];
    masks.push_back(std::move(mk));
  }
  return masks;
}

namespace {

// forward 2D FFT decomposed into non-blocking row FFT waves; `grid` ends up
// transposed (w x h) to keep every 1D transform contiguous
ComplexMatrix fft2_rows_then_cols(KernelExecutor& ex, const ComplexMatrix& in, bool inverse) {
  ComplexMatrix stage = in;
  {
    std::vector<TaskHandle> hs;
    hs.reserve(stage.rows);
    ComplexMatrix out(stage.rows, stage.cols);
    for (uint32_t r = 0; r < stage.rows; ++r)
      hs.push_back(ex.fft_nb(&stage.at(r, 0), &out.at(r, 0), stage.cols, inverse));
    wait_all(hs);
    stage = std::move(out);
  }
  ComplexMatrix t = kernels::transpose(stage);
  {
    std::vector<TaskHandle> hs;
    hs.reserve(t.rows);
    ComplexMatrix out(t.rows, t.cols);
    for (uint32_t r = 0; r < t.rows; ++r)
      hs.push_back(ex.fft_nb(&t.at(r, 0), &out.at(r, 0), t.cols, inverse));
    wait_all(hs);
    return out;  // transposed domain
  }
}

Matrix pad_image_pow2(const Matrix& image, uint32_t& ph, uint32_t& pw) {
  ph = next_pow2(image.rows);
  pw = next_pow2(image.cols);
  Matrix padded(ph, pw);
  for (uint32_t r = 0; r < image.rows; ++r)
    for (uint32_t c = 0; c < image.cols; ++c) padded.at(r, c) = image.at(r, c);
  return padded;
}

Matrix threshold_mask(const std::vector<Matrix>& responses, const Matrix& image,
                      const LdParams& p) {
  Matrix combined(responses[0].rows, responses[0].cols);
  for (const auto& r : responses)
    for (size_t i = 0; i < combined.data.size(); ++i) combined.data[i] += std::abs(r.data[i]);
  double peak = 0;
  for (double v : combined.data) peak = std::max(peak, v);
  const double thr = p.threshold_frac * peak;
  Matrix mask(image.rows, image.cols);
  for (uint32_t r = 0; r < image.rows; ++r)
    for (uint32_t c = 0; c < image.cols; ++c)
      mask.at(r, c) = combined.at(r, c) > thr && thr > 0 ? 1.0 : 0.0;
  return mask;
}

}  // namespace

Matrix lane_detection(KernelExecutor& ex, const Matrix& image, const LdParams& p) {
  if (p.mask_dim > image.rows || p.mask_dim > image.cols)
    throw std::invalid_argument("lane_detection: mask larger than image");
  uint32_t ph = 0, pw = 0;
  Matrix padded = pad_image_pow2(image, ph, pw);

  std::vector<Matrix> responses;
  for (const Matrix& mk : ld_masks(p.mask_dim)) {
    // FFT(image) and FFT(mask), both decomposed row/column-wise
    ComplexMatrix fimg = fft2_rows_then_cols(ex, kernels::to_complex(padded), false);
    ComplexMatrix fmask =
        fft2_rows_then_cols(ex, kernels::pad_mask_centered(mk, ph, pw), false);

    // pointwise product, one ZIP task per (transposed) row
    ComplexMatrix prod(fimg.rows, fimg.cols);
    {
      std::vector<TaskHandle> hs;
      hs.reserve(fimg.rows);
      for (uint32_t r = 0; r < fimg.rows; ++r)
        hs.push_back(ex.zip_nb(&fimg.at(r, 0), &fmask.at(r, 0), &prod.at(r, 0), fimg.cols));
      wait_all(hs);
    }

    // inverse transform; input is transposed, so start from the natural layout
    ComplexMatrix natural = kernels::transpose(prod);
    ComplexMatrix back = fft2_rows_then_cols(ex, natural, true);  // transposed again
    ComplexMatrix spatial = kernels::transpose(back);

    Matrix resp(ph, pw);
    for (size_t i = 0; i < spatial.data.size(); ++i) resp.data[i] = spatial.data[i].real();
    responses.push_back(std::move(resp));
  }
  return threshold_mask(responses, image, p);
}

Matrix lane_detection_spatial(const Matrix& image, const LdParams& p) {
  uint32_t ph = 0, pw = 0;
  Matrix padded = pad_image_pow2(image, ph, pw);
  std::vector<Matrix> responses;
  for (const Matrix& mk : ld_masks(p.mask_dim)) {
    // circular convolution with the origin-centered padded mask, by definition
    Matrix resp(ph, pw);
    const int half = int(p.mask_dim) / 2;
    for (uint32_t r = 0; r < ph; ++r) {
      for (uint32_t c = 0; c < pw; ++c) {
        double acc = 0;
        for (uint32_t a = 0; a < p.mask_dim; ++a) {
          for (uint32_t b = 0; b < p.mask_dim; ++b) {
            int dr = int(a) - half, dc = int(b) - half;
            int rr = (int(r) - dr % int(ph) + int(ph)) % int(ph);
            int cc = (int(c) - dc % int(pw) + int(pw)) % int(pw);
            acc += mk.at(a, b) * padded.at(uint32_t(rr), uint32_t(cc));
          }
        }
        resp.at(r, c) = acc;
      }
    }
    responses.push_back(std::move(resp));
  }
  return threshold_mask(responses, image, p);
}

// ---- loop demo ----------------------------------------------------------

uint64_t loop_demo(KernelExecutor& ex, uint32_t iterations, uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("loop_demo: iterations must be >= 1");
  const uint32_t n = 64;
  ComplexBuffer x = synth_complex(mix_seed(seed, 1), n);
  ComplexBuffer coeff = synth_complex(mix_seed(seed, 2), n);
  ComplexBuffer y(n), z(n);
  for (uint32_t i = 0; i < iterations; ++i) {
    ex.fft(x.data(), y.data(), n, false);
    ex.zip(y.data(), coeff.data(), z.data(), n);
    ex.fft(z.data(), x.data(), n, true);
  }
  return digest_cbuf(x);
}

// ---- task-count formulas ------------------------------------------------

uint64_t pd_task_count(const PdParams& p) { return uint64_t(p.num_pulses) + p.samples_per_pulse; }
uint64_t tx_task_count(const TxParams& p) { return p.num_packets; }

uint64_t ld_fft_task_count(const LdParams& p) {
  return 4ull * 2 * (next_pow2(p.image_h) + next_pow2(p.image_w));
}
uint64_t ld_ifft_task_count(const LdParams& p) {
  return 4ull * (next_pow2(p.image_h) + next_pow2(p.image_w));
}
uint64_t loop_demo_task_count(uint32_t iterations) { return 3ull * iterations; }

// ---- registry -----------------------------------------------------------

namespace {

PdParams pd_from(const nlohmann::json& j) {
  PdParams p;
  p.num_pulses = j.value("num_pulses", p.num_pulses);
  p.samples_per_pulse = j.value("samples_per_pulse", p.samples_per_pulse);
  return p;
}

TxParams tx_from(const nlohmann::json& j) {
  TxParams p;
  p.num_packets = j.value("num_packets", p.num_packets);
  p.scramble_seed = uint8_t(j.value("scramble_seed", int(p.scramble_seed)));
  return p;
}

LdParams ld_from(const nlohmann::json& j) {
  LdParams p;
  p.image_h = j.value("image_h", p.image_h);
  p.image_w = j.value("image_w", p.image_w);
  p.mask_dim = j.value("mask_dim", p.mask_dim);
  return p;
}

void pd_entry(AppContext& ctx) {
  PdParams p = pd_from(ctx.params);
  ComplexBuffer frame = synth_complex(mix_seed(ctx.seed, 11), size_t(p.num_pulses) * p.samples_per_pulse);
  RuntimeExecutor ex(ctx);
  Matrix map = pulse_doppler(ex, frame, p);
  ctx.digest = digest_matrix(map);
}

void tx_entry(AppContext& ctx) {
  TxParams p = tx_from(ctx.params);
  auto payload = synth_bits(mix_seed(ctx.seed, 12), size_t(p.num_packets) * kTxPacketBits);
  RuntimeExecutor ex(ctx);
  ComplexBuffer out = wifi_tx(ex, payload, p);
  ctx.digest = digest_cbuf(out);
}

void ld_entry(AppContext& ctx) {
  LdParams p = ld_from(ctx.params);
  Matrix image = synth_image(mix_seed(ctx.seed, 13), p.image_h, p.image_w);
  RuntimeExecutor ex(ctx);
  Matrix mask = lane_detection(ex, image, p);
  ctx.digest = digest_matrix(mask);
}

void loop_entry(AppContext& ctx) {
  uint32_t iters = ctx.params.value("iterations", 10u);
  RuntimeExecutor ex(ctx);
  ctx.digest = loop_demo(ex, iters, ctx.seed);
}

// DAG twins. Non-kernel stages become composite nodes, mirroring the original
// flow where the whole application runs on worker threads.

nlohmann::json pd_dag_twin(const nlohmann::json& params) {
  PdParams p = pd_from(params);
  uint64_t seed = params.value("seed", uint64_t(1));
  nlohmann::json nodes = nlohmann::json::array();
  const int P = int(p.num_pulses), S = int(p.samples_per_pulse);
  const int prep = 0, gather = P + 1;
  std::vector<int> stage1_ids, stage2_ids;
  for (int i = 0; i < P; ++i) stage1_ids.push_back(1 + i);
  for (int s = 0; s < S; ++s) stage2_ids.push_back(gather + 1 + s);
  const int mag = gather + 1 + S;

  nodes.push_back({{"id", prep},
                   {"kernel", "pd_prepare"},
                   {"args", {{"seed", seed}, {"num_pulses", P}, {"samples_per_pulse", S}}},
                   {"successors", stage1_ids}});
  for (int i = 0; i < P; ++i)
    nodes.push_back({{"id", stage1_ids[size_t(i)]},
                     {"kernel", "FFT"},
                     {"size", S},
                     {"args", {{"in", "pulse_" + std::to_string(i)},
                               {"out", "range_" + std::to_string(i)}}},
                     {"successors", {gather}}});
  nodes.push_back({{"id", gather},
                   {"kernel", "pd_gather"},
                   {"args", {{"num_pulses", P}, {"samples_per_pulse", S}}},
                   {"successors", stage2_ids}});
  for (int s = 0; s < S; ++s)
    nodes.push_back({{"id", stage2_ids[size_t(s)]},
                     {"kernel", "FFT"},
                     {"size", P},
                     {"args", {{"in", "dop_in_" + std::to_string(s)},
                               {"out", "dop_out_" + std::to_string(s)}}},
                     {"successors", {mag}}});
  nodes.push_back({{"id", mag},
                   {"kernel", "pd_magnitude"},
                   {"args", {{"num_pulses", P}, {"samples_per_pulse", S}}},
                   {"successors", nlohmann::json::array()}});
  return {{"app_name", "pulse_doppler"}, {"nodes", nodes}};
}

nlohmann::json tx_dag_twin(const nlohmann::json& params) {
  TxParams p = tx_from(params);
  uint64_t seed = params.value("seed", uint64_t(1));
  nlohmann::json nodes = nlohmann::json::array();
  const int N = int(p.num_packets);
  std::vector<int> iffts;
  for (int i = 0; i < N; ++i) iffts.push_back(1 + i);
  const int collect = N + 1;
  nodes.push_back({{"id", 0},
                   {"kernel", "tx_prepare"},
                   {"args", {{"seed", seed},
                             {"num_packets", N},
                             {"scramble_seed", int(p.scramble_seed)}}},
                   {"successors", iffts}});
  for (int i = 0; i < N; ++i)
    nodes.push_back({{"id", iffts[size_t(i)]},
                     {"kernel", "IFFT"},
                     {"size", int(kTxSymbolLen)},
                     {"args", {{"in", "freq_" + std::to_string(i)},
                               {"out", "td_" + std::to_string(i)}}},
                     {"successors", {collect}}});
  nodes.push_back({{"id", collect},
                   {"kernel", "tx_collect"},
                   {"args", {{"num_packets", N}}},
                   {"successors", nlohmann::json::array()}});
  return {{"app_name", "wifi_tx"}, {"nodes", nodes}};
}

nlohmann::json loop_dag_twin(const nlohmann::json& params) {
  // the whole for-loop collapses to a single schedulable unit
  nlohmann::json node = {{"id", 0},
                         {"kernel", "loop_demo_fused"},
                         {"args", {{"iterations", params.value("iterations", 10u)},
                                   {"seed", params.value("seed", uint64_t(1))}}},
                         {"successors", nlohmann::json::array()}};
  return {{"app_name", "loop_demo"}, {"nodes", nlohmann::json::array({node})}};
}

double cplx_mb(size_t samples) { return double(samples) * 128.0 / 1e6; }

AppRegistry build_registry() {
  AppRegistry reg;

  reg.add("pulse_doppler",
          {pd_entry,
           {{"num_pulses", 64}, {"samples_per_pulse", 64}},
           pd_dag_twin,
           [](const nlohmann::json& j) {
             PdParams p = pd_from(j);
             return cplx_mb(size_t(p.num_pulses) * p.samples_per_pulse);
           }});
  reg.add("wifi_tx",
          {tx_entry,
           {{"num_packets", 16}},
           tx_dag_twin,
           [](const nlohmann::json& j) {
             TxParams p = tx_from(j);
             return cplx_mb(size_t(p.num_packets) * kTxSymbolLen);
           }});
  reg.add("lane_detection",
          {ld_entry,
           {{"image_h", 128}, {"image_w", 64}, {"mask_dim", 3}},
           nullptr,
           [](const nlohmann::json& j) {
             LdParams p = ld_from(j);
             return cplx_mb(size_t(p.image_h) * p.image_w);
           }});
  reg.add("loop_demo",
          {loop_entry,
           {{"iterations", 10}},
           loop_dag_twin,
           [](const nlohmann::json& j) { return cplx_mb(64 * j.value("iterations", 10u)); }});

  reg.add_composite("pd_prepare", [](FrameArena& arena, const nlohmann::json& args) {
    return [&arena, args] {
      const uint32_t P = args.at("num_pulses").get<uint32_t>();
      const uint32_t S = args.at("samples_per_pulse").get<uint32_t>();
      auto frame = synth_complex(mix_seed(args.at("seed").get<uint64_t>(), 11), size_t(P) * S);
      for (uint32_t i = 0; i < P; ++i) {
        auto& row = arena.cbuf("pulse_" + std::to_string(i), S);
        std::copy_n(frame.begin() + size_t(i) * S, S, row.begin());
      }
    };
  });
  reg.add_composite("pd_gather", [](FrameArena& arena, const nlohmann::json& args) {
    return [&arena, args] {
      const uint32_t P = args.at("num_pulses").get<uint32_t>();
      const uint32_t S = args.at("samples_per_pulse").get<uint32_t>();
      for (uint32_t s = 0; s < S; ++s) {
        auto& col = arena.cbuf("dop_in_" + std::to_string(s), P);
        for (uint32_t i = 0; i < P; ++i) col[i] = arena.cbuf("range_" + std::to_string(i), S)[s];
      }
    };
  });
  reg.add_composite("pd_magnitude", [](FrameArena& arena, const nlohmann::json& args) {
    return [&arena, args] {
      const uint32_t P = args.at("num_pulses").get<uint32_t>();
      const uint32_t S = args.at("samples_per_pulse").get<uint32_t>();
      auto& map = arena.mat("pd_map", P, S);
      for (uint32_t d = 0; d < P; ++d)
        for (uint32_t s = 0; s < S; ++s)
          map.at(d, s) = std::abs(arena.cbuf("dop_out_" + std::to_string(s), P)[d]);
    };
  });
  reg.add_composite("tx_prepare", [](FrameArena& arena, const nlohmann::json& args) {
    return [&arena, args] {
      const uint32_t N = args.at("num_packets").get<uint32_t>();
      const uint8_t sseed = uint8_t(args.value("scramble_seed", 0x5d));
      auto payload = synth_bits(mix_seed(args.at("seed").get<uint64_t>(), 12),
                                size_t(N) * kTxPacketBits);
      std::vector<uint8_t> packet(kTxPacketBits);
      for (uint32_t i = 0; i < N; ++i) {
        std::copy_n(payload.begin() + size_t(i) * kTxPacketBits, kTxPacketBits, packet.begin());
        auto coded = conv_encode(scramble(packet, sseed));
        auto& freq = arena.cbuf("freq_" + std::to_string(i), kTxSymbolLen);
        for (uint32_t k = 0; k < kTxSymbolLen; ++k)
          freq[k] = cplx(coded[k] ? -1.0 : 1.0, 0.0);
      }
    };
  });
  reg.add_composite("tx_collect", [](FrameArena& arena, const nlohmann::json& args) {
    return [&arena, args] {
      const uint32_t N = args.at("num_packets").get<uint32_t>();
      auto& power = arena.mat("tx_power", 1, N);
      for (uint32_t i = 0; i < N; ++i) {
        double acc = 0;
        for (const cplx& c : arena.cbuf("td_" + std::to_string(i), kTxSymbolLen))
          acc += std::norm(c);
        power.at(0, i) = acc;
      }
    };
  });
  reg.add_composite("loop_demo_fused", [](FrameArena& arena, const nlohmann::json& args) {
    return [&arena, args] {
      DirectExecutor ex;
      uint64_t digest = loop_demo(ex, args.at("iterations").get<uint32_t>(),
                                  args.at("seed").get<uint64_t>());
      auto& out = arena.mat("loop_digest", 1, 1);
      out.at(0, 0) = double(digest);
    };
  });
  return reg;
}

}  // namespace

const AppRegistry& registry() {
  static AppRegistry reg = build_registry();
  return reg;
}

}  // namespace cedr::apps
