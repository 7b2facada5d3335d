#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mvpipe/bucket.hpp"
#include "mvpipe/hierarchy.hpp"
#include "mvpipe/report.hpp"

namespace mvpipe {

struct Sketch2DConfig {
  HierarchySpec spec;            // dims == 2
  std::vector<uint32_t> widths;  // size H, node-index order; clamped to key space
  uint64_t seed = 1;
  int ancestor_depth = 4;  // destination-direction ancestors checked by estimate
};

// One bucket array per lattice node, source-major. A key generalizes along
// the source direction only at the bottom nodes (s, 0); every bottom miss
// also climbs that column in the destination direction. Column pushes never
// move rightward.
//
// Single-writer: one caller at a time may run update/detect/reset.
class Sketch2D {
 public:
  using InflowHook =
      std::function<void(int node, uint32_t slot, uint32_t key_src, uint32_t key_dst, uint64_t value)>;

  explicit Sketch2D(Sketch2DConfig cfg);

  void update(uint32_t src, uint32_t dst, uint64_t value);

  // Estimated conditioned count of the candidate stored at node `at`;
  // ancestors are consulted along the destination direction within the
  // key's column.
  int64_t estimate(uint32_t key_src, uint32_t key_dst, Coordinate at) const {
    return estimate(key_src, key_dst, at, t_);
  }
  int64_t estimate(uint32_t key_src, uint32_t key_dst, Coordinate at, int t) const;

  HHHReport detect(uint64_t threshold);
  void reset();

  const HierarchySpec& spec() const { return spec_; }
  const std::vector<uint32_t>& widths() const { return widths_; }
  uint64_t seed() const { return seed_; }
  int ancestor_depth() const { return t_; }
  int nodes() const { return int(widths_.size()); }

  uint32_t slot_of(int node, uint32_t key_src, uint32_t key_dst) const;
  const Bucket& bucket_at(int node, uint32_t slot) const;
  Bucket& bucket_at(int node, uint32_t slot);

  uint64_t records_processed() const { return records_; }
  uint64_t node_inflow(int node) const { return inflow_[size_t(node)]; }
  uint64_t node_value_sum(int node) const;
  uint64_t node_cumulative_sum(int node) const;
  const std::vector<uint64_t>& traversal_stats() const { return hist_; }
  std::vector<uint64_t> occupancy() const;
  std::vector<uint8_t> serialize_state() const;

  void set_inflow_hook(InflowHook hook) { hook_ = std::move(hook); }

 private:
  // Inserts (ks, kd, v) at bottom nodes from `s` rightward until admitted.
  void bottom_chain(int s, uint32_t ks, uint32_t kd, uint64_t v, size_t& visited);
  // Standard upward push within column s, destination degrees from_t..d-1.
  void column_push(int s, int from_t, uint32_t ks, uint32_t kd, uint64_t v, size_t& visited);

  HierarchySpec spec_;
  std::vector<uint32_t> widths_;
  std::vector<size_t> offsets_;
  std::vector<uint64_t> seeds_;
  std::vector<Bucket> buckets_;
  uint64_t seed_;
  int t_;

  bool detected_ = false;
  uint64_t records_ = 0;
  std::vector<uint64_t> inflow_;
  std::vector<uint64_t> hist_;
  InflowHook hook_;
};

}  // namespace mvpipe
