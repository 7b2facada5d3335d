#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mvpipe/bucket.hpp"
#include "mvpipe/hierarchy.hpp"
#include "mvpipe/report.hpp"

namespace mvpipe {

enum class SketchMode : uint8_t { Full, HwFaithful };

struct Sketch1DConfig {
  HierarchySpec spec;            // dims == 1
  std::vector<uint32_t> widths;  // size H; each level clamped to its key space
  uint64_t seed = 1;
  int ancestor_depth = 2;  // t: ancestors consulted by estimate()
  SketchMode mode = SketchMode::Full;
};

// One array of majority-vote buckets per hierarchy level. Values enter at
// level 0 and climb until some candidate admits them; detect() walks the
// arrays bottom-up and inverts the structure into an HHH set.
//
// Single-writer: one caller at a time may run update/detect/reset.
class Sketch1D {
 public:
  // Observes every (key, value) routed into a bucket; used by the shadow
  // oracle and by access-pattern tests.
  using InflowHook =
      std::function<void(int node, uint32_t slot, uint32_t key_src, uint32_t key_dst, uint64_t value)>;

  explicit Sketch1D(Sketch1DConfig cfg);

  void update(uint32_t addr, uint64_t value);
  // Carries (key, value) from `level` upward; returns nodes visited.
  size_t push(uint32_t key, uint64_t value, int level);

  // Estimated conditioned count of `key`, the candidate stored at its
  // hashed bucket in level `level`.
  int64_t estimate(uint32_t key, int level) const { return estimate(key, level, t_); }
  int64_t estimate(uint32_t key, int level, int t) const;

  // Invertibility walk; mutates the sketch (below-threshold candidates are
  // pushed upward) so it runs once per epoch. Throws std::logic_error on a
  // second call without reset().
  HHHReport detect(uint64_t threshold);

  void reset();

  const HierarchySpec& spec() const { return spec_; }
  const std::vector<uint32_t>& widths() const { return widths_; }
  SketchMode mode() const { return mode_; }
  uint64_t seed() const { return seed_; }
  int ancestor_depth() const { return t_; }
  int levels() const { return int(widths_.size()); }

  uint32_t slot_of(int level, uint32_t key) const;
  const Bucket& bucket_at(int level, uint32_t slot) const;
  Bucket& bucket_at(int level, uint32_t slot);  // direct state access for tests/tools
  bool bucket_occupied(int level, const Bucket& b) const;

  uint64_t records_processed() const { return records_; }
  uint64_t level_inflow(int level) const { return inflow_[size_t(level)]; }
  uint64_t level_value_sum(int level) const;
  const std::vector<uint64_t>& traversal_stats() const { return hist_; }
  std::vector<uint64_t> occupancy() const;

  // Little-endian flat dump: levels in index order, per bucket K (src, dst,
  // occupied byte), V, I, C.
  std::vector<uint8_t> serialize_state() const;

  void set_inflow_hook(InflowHook hook) { hook_ = std::move(hook); }

 private:
  size_t push_full(uint32_t key, uint64_t value, int level);
  size_t push_hw(uint32_t key, uint64_t value, int level);
  void init_buckets();

  HierarchySpec spec_;
  std::vector<uint32_t> widths_;
  std::vector<size_t> offsets_;
  std::vector<uint64_t> seeds_;
  std::vector<Bucket> buckets_;
  uint64_t seed_;
  int t_;
  SketchMode mode_;

  bool detected_ = false;
  uint64_t records_ = 0;
  std::vector<uint64_t> inflow_;
  std::vector<uint64_t> hist_;
  InflowHook hook_;
};

}  // namespace mvpipe
