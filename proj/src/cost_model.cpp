#include "cedr/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cedr {

namespace {

constexpr const char* kHeader = "cedr-cost-model v1";

bool dims_less(const SizeKey& a, const SizeKey& b) {
  return a.dims < b.dims;
}

double log_distance(const SizeKey& a, const SizeKey& b) {
  if (a.dims.size() != b.dims.size()) return 1e18;
  double d = 0;
  for (size_t i = 0; i < a.dims.size(); ++i)
    d += std::abs(std::log2(double(a.dims[i])) - std::log2(double(b.dims[i])));
  return d;
}

}  // namespace

CostModel CostModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cost model: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

CostModel CostModel::parse(const std::string& text, const std::string& origin) {
  CostModel m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (!header_seen) {
      std::string version;
      ls >> version;
      if (first != "cedr-cost-model" || version != "v1")
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected header '" +
                          kHeader + "'");
      header_seen = true;
      continue;
    }
    std::string bucket_s, pe_s;
    int64_t ns = 0;
    if (!(ls >> bucket_s >> pe_s >> ns))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed record");
    auto k = kernel_from_string(first);
    if (!k) throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown kernel '" + first + "'");
    auto pe = pe_class_from_string(pe_s);
    if (!pe) throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown PE type '" + pe_s + "'");
    auto sz = size_key_from_string(bucket_s);
    if (!sz) throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad size bucket '" + bucket_s + "'");
    if (ns <= 0) throw ConfigError(origin + ":" + std::to_string(lineno) + ": non-positive duration");
    if (!supports(*pe, *k))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + pe_s +
                        " does not support " + first);
    m.set(*k, *sz, *pe, ns);
  }
  if (!header_seen) throw ConfigError(origin + ": empty cost model (missing header)");
  m.validate();
  return m;
}

void CostModel::set(KernelName k, const SizeKey& bucketed, PeClass pe, int64_t duration_ns) {
  auto& v = table_[{k, pe}];
  auto it = std::find_if(v.begin(), v.end(),
                         [&](const Entry& e) { return e.bucket == bucketed; });
  if (it != v.end()) {
    it->duration_ns = duration_ns;
    return;
  }
  v.push_back({bucketed, duration_ns});
  std::sort(v.begin(), v.end(),
            [](const Entry& a, const Entry& b) { return dims_less(a.bucket, b.bucket); });
}

void CostModel::validate() const {
  for (const auto& [key, v] : table_) {
    for (const auto& e : v) {
      if (e.duration_ns <= 0)
        throw ConfigError("cost model: non-positive duration for " +
                          std::string(to_string(key.first)));
    }
  }
  // every kernel present anywhere must have a CPU row
  for (const auto& [key, v] : table_) {
    if (table_.find({key.first, PeClass::CPU}) == table_.end())
      throw ConfigError("cost model: kernel " + std::string(to_string(key.first)) +
                        " lacks a CPU entry");
  }
}

std::optional<int64_t> CostModel::estimate(const KernelId& kernel, PeClass pe) const {
  if (!supports(pe, kernel.name)) return std::nullopt;
  auto it = table_.find({kernel.name, pe});
  if (it == table_.end() || it->second.empty()) return std::nullopt;
  SizeKey want = bucket(kernel.size_key);
  const Entry* best = nullptr;
  double best_d = 0;
  bool best_ge = false;
  for (const auto& e : it->second) {
    if (e.bucket == want) return e.duration_ns;
    double d = log_distance(want, e.bucket);
    bool ge = e.bucket.dims.size() == want.dims.size() &&
              std::equal(want.dims.begin(), want.dims.end(), e.bucket.dims.begin(),
                         [](uint32_t w, uint32_t h) { return h >= w; });
    // prefer covering buckets, then smaller log distance
    if (!best || (ge && !best_ge) || (ge == best_ge && d < best_d)) {
      best = &e;
      best_d = d;
      best_ge = ge;
    }
  }
  if (!best) return std::nullopt;
  return best->duration_ns;
}

std::optional<double> CostModel::mean_estimate(const KernelId& kernel,
                                               const std::vector<PeClass>& classes) const {
  double sum = 0;
  int n = 0;
  for (PeClass pe : classes) {
    if (auto e = estimate(kernel, pe)) {
      sum += double(*e);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

bool CostModel::covers(PeClass pe) const {
  for (int i = 0; i < kKernelCount; ++i) {
    auto k = static_cast<KernelName>(i);
    if (!supports(pe, k)) continue;
    auto it = table_.find({k, pe});
    if (it == table_.end() || it->second.empty()) return false;
  }
  return true;
}

std::string CostModel::serialize() const {
  std::ostringstream os;
  os << kHeader << "\n";
  for (const auto& [key, v] : table_) {
    for (const auto& e : v) {
      os << to_string(key.first) << ' ' << bucket_string(e.bucket) << ' '
         << to_string(key.second) << ' ' << e.duration_ns << "\n";
    }
  }
  return os.str();
}

void CostModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cost model: cannot write " + path);
  out << serialize();
}

uint64_t CostModel::content_hash() const {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : serialize()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace cedr
