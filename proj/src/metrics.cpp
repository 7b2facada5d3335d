#include "mvpipe/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mvpipe {

namespace {

std::unordered_map<Key, uint64_t, KeyHasher> truth_index(const GroundTruth& truth) {
  std::unordered_map<Key, uint64_t, KeyHasher> idx;
  idx.reserve(truth.entries.size());
  for (const auto& e : truth.entries) idx.emplace(e.key, e.exact);
  return idx;
}

}  // namespace

AccuracyResult accuracy(const HHHReport& reported, const GroundTruth& truth) {
  if (!(reported.spec == truth.spec))
    throw std::invalid_argument("accuracy: report and truth use different hierarchy specs");
  const auto idx = truth_index(truth);
  AccuracyResult r;
  double err_sum = 0.0;
  for (const auto& e : reported.entries) {
    auto it = idx.find(e.key);
    if (it == idx.end()) {
      ++r.fp;
      continue;
    }
    ++r.tp;
    if (it->second > 0)
      err_sum += std::abs(double(e.estimate) - double(it->second)) / double(it->second);
  }
  r.fn = truth.entries.size() - r.tp;
  r.precision = (r.tp + r.fp) == 0 ? 1.0 : double(r.tp) / double(r.tp + r.fp);
  r.recall = (r.tp + r.fn) == 0 ? 1.0 : double(r.tp) / double(r.tp + r.fn);
  r.relative_error = r.tp == 0 ? 0.0 : err_sum / double(r.tp);
  return r;
}

std::vector<double> per_key_relative_errors(const HHHReport& reported, const GroundTruth& truth) {
  if (!(reported.spec == truth.spec))
    throw std::invalid_argument("accuracy: report and truth use different hierarchy specs");
  const auto idx = truth_index(truth);
  std::vector<double> errs;
  for (const auto& e : reported.entries) {
    auto it = idx.find(e.key);
    if (it != idx.end() && it->second > 0)
      errs.push_back(std::abs(double(e.estimate) - double(it->second)) / double(it->second));
  }
  return errs;
}

double ThroughputResult::median() const {
  if (updates_per_sec.empty()) return 0.0;
  std::vector<double> s = updates_per_sec;
  std::sort(s.begin(), s.end());
  const size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

double ThroughputResult::min() const {
  return updates_per_sec.empty() ? 0.0
                                 : *std::min_element(updates_per_sec.begin(), updates_per_sec.end());
}

double ThroughputResult::max() const {
  return updates_per_sec.empty() ? 0.0
                                 : *std::max_element(updates_per_sec.begin(), updates_per_sec.end());
}

ThroughputResult throughput(const Sketch1DConfig& config, std::span<const PacketRecord> records,
                            int repetitions) {
  ThroughputResult out;
  if (records.empty() || repetitions <= 0) return out;

  using clock = std::chrono::steady_clock;
  Sketch1D sketch(config);
  for (int rep = 0; rep < repetitions; ++rep) {
    sketch.reset();
    const auto t0 = clock::now();
    for (const auto& r : records) sketch.update(r.src, r.value);
    const auto t1 = clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    out.updates_per_sec.push_back(double(records.size()) / (secs > 0 ? secs : 1e-9));
  }
  out.mean_traversed = [&] {
    uint64_t updates = 0, nodes = 0;
    const auto& hist = sketch.traversal_stats();
    for (size_t k = 0; k < hist.size(); ++k) {
      updates += hist[k];
      nodes += hist[k] * k;
    }
    return updates == 0 ? 0.0 : double(nodes) / double(updates);
  }();
  const auto d0 = clock::now();
  (void)sketch.detect(UINT64_MAX);  // worst-case walk: nothing reports, everything pushes
  const auto d1 = clock::now();
  out.detect_seconds = std::chrono::duration<double>(d1 - d0).count();
  out.valid = true;
  return out;
}

}  // namespace mvpipe
