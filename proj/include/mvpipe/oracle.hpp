#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvpipe/hashing.hpp"
#include "mvpipe/hierarchy.hpp"
#include "mvpipe/sketch1d.hpp"
#include "mvpipe/sketch2d.hpp"
#include "mvpipe/trace.hpp"

namespace mvpipe {

struct KeyHasher {
  size_t operator()(const Key& k) const {
    const uint64_t a = (uint64_t(k.src) << 32) | k.dst;
    const uint64_t c = (uint64_t(k.coord.src) << 8) | k.coord.dst;
    return size_t(mix64(a + mix64(c)));
  }
};

// Exact count S(x) for every key of every node reachable from the stream.
struct ExactCounts {
  HierarchySpec spec;
  std::unordered_map<Key, uint64_t, KeyHasher> counts;
  uint64_t total = 0;

  uint64_t at(const Key& k) const {
    auto it = counts.find(k);
    return it == counts.end() ? 0 : it->second;
  }
};

ExactCounts exact_counts(std::span<const PacketRecord> records, const HierarchySpec& spec);

struct TruthEntry {
  Key key;
  int level = 0;
  uint64_t conditioned = 0;  // conditioned count against the lower-level HHH set
  uint64_t exact = 0;        // exact full count S(key)
};

struct GroundTruth {
  HierarchySpec spec;
  uint64_t threshold = 0;
  uint64_t total = 0;
  std::vector<TruthEntry> entries;

  bool contains(const Key& k) const;
  const TruthEntry* find(const Key& k) const;
};

// Inductive HHH set per level: level-0 flows first, then each level's keys
// judged by their conditioned count against everything already declared.
GroundTruth exact_hhh(std::span<const PacketRecord> records, const HierarchySpec& spec,
                      uint64_t abs_threshold);
GroundTruth exact_hhh_phi(std::span<const PacketRecord> records, const HierarchySpec& spec,
                          double phi);

// Shared phi -> absolute threshold resolution (also used by the harness).
uint64_t resolve_threshold(double phi, uint64_t total);

// Sum of flow values under x that no key in `hhhs` covers.
uint64_t conditioned_count(const HierarchySpec& spec, const Key& x, std::span<const Key> hhhs,
                           std::span<const PacketRecord> records);

// CSV export: key,level,exact_count,conditioned_count
std::string truth_csv(const GroundTruth& truth);

// Exact per-bucket, per-key inflow totals, built by observing the sketch's
// own routing decisions through its inflow hook. Non-copyable: the hook
// holds a pointer to this object.
class ShadowTracker {
 public:
  explicit ShadowTracker(Sketch1D& sketch);
  explicit ShadowTracker(Sketch2D& sketch);
  ShadowTracker(const ShadowTracker&) = delete;
  ShadowTracker& operator=(const ShadowTracker&) = delete;

  const std::unordered_map<uint64_t, uint64_t>& deltas(int node, uint32_t slot) const;
  uint64_t delta(int node, uint32_t slot, uint32_t key_src, uint32_t key_dst) const;
  void clear();

 private:
  void record(int node, uint32_t slot, uint32_t ks, uint32_t kd, uint64_t v);

  std::vector<size_t> offsets_;
  std::vector<std::unordered_map<uint64_t, uint64_t>> maps_;
};

// Per-bucket majority-vote bounds against the shadow truth (full mode, call
// before detect). Returns a description of the first violation found.
std::optional<std::string> check_mjrty_bounds(const Sketch1D& sketch, const ShadowTracker& shadow);
// estimate(x) >= Delta(x) for every stored candidate.
std::optional<std::string> check_estimate_upper_bound(const Sketch1D& sketch,
                                                      const ShadowTracker& shadow);

struct ShadowRun {
  std::unique_ptr<Sketch1D> sketch;
  std::unique_ptr<ShadowTracker> tracker;
};

// Co-simulates a sketch over the records and returns both halves.
ShadowRun shadow_replay(std::span<const PacketRecord> records, const Sketch1DConfig& config);

}  // namespace mvpipe
