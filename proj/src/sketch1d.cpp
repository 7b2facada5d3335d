#include "mvpipe/sketch1d.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "mvpipe/hashing.hpp"

namespace mvpipe {

Sketch1D::Sketch1D(Sketch1DConfig cfg)
    : spec_(cfg.spec),
      widths_(std::move(cfg.widths)),
      seed_(cfg.seed),
      t_(cfg.ancestor_depth),
      mode_(cfg.mode) {
  if (spec_.dims != 1) throw std::invalid_argument("Sketch1D: spec must be 1D");
  if (widths_.size() != spec_.node_count)
    throw std::invalid_argument("Sketch1D: widths size must equal the level count");
  if (t_ < 0) throw std::invalid_argument("Sketch1D: ancestor depth must be >= 0");
  if (mode_ == SketchMode::HwFaithful &&
      !(spec_.step_bits == 8 && spec_.addr_bits == 32))
    throw std::invalid_argument("Sketch1D: hw-faithful mode is 1D-byte only");

  const int h = levels();
  offsets_.resize(size_t(h) + 1, 0);
  seeds_.resize(size_t(h));
  for (int i = 0; i < h; ++i) {
    if (widths_[size_t(i)] == 0) throw std::invalid_argument("Sketch1D: zero-width level");
    const uint64_t space = key_space_size(spec_, Coordinate{uint8_t(i), 0});
    widths_[size_t(i)] = uint32_t(std::min<uint64_t>(widths_[size_t(i)], space));
    offsets_[size_t(i) + 1] = offsets_[size_t(i)] + widths_[size_t(i)];
    seeds_[size_t(i)] = derive_seed(seed_, uint64_t(i));
  }
  buckets_.resize(offsets_.back());
  inflow_.resize(size_t(h), 0);
  hist_.resize(size_t(h) + 1, 0);
  init_buckets();
}

void Sketch1D::init_buckets() {
  std::fill(buckets_.begin(), buckets_.end(), Bucket{});
  if (mode_ == SketchMode::HwFaithful)
    for (auto& b : buckets_) b.key_src = kHwEmptyKey;
}

uint32_t Sketch1D::slot_of(int level, uint32_t key) const {
  return reduce_slot(hash_key(seeds_[size_t(level)], key, 0), widths_[size_t(level)]);
}

const Bucket& Sketch1D::bucket_at(int level, uint32_t slot) const {
  return buckets_[offsets_[size_t(level)] + slot];
}

Bucket& Sketch1D::bucket_at(int level, uint32_t slot) {
  return buckets_[offsets_[size_t(level)] + slot];
}

bool Sketch1D::bucket_occupied(int level, const Bucket& b) const {
  if (mode_ == SketchMode::Full) return b.occupied;
  if (level == levels() - 1) return b.total > 0;
  return b.key_src != kHwEmptyKey;
}

void Sketch1D::update(uint32_t addr, uint64_t value) {
  if (value == 0) throw std::invalid_argument("update: value must be > 0");
  const size_t visited = push(addr, value, 0);
  ++records_;
  ++hist_[std::min(visited, hist_.size() - 1)];
}

size_t Sketch1D::push(uint32_t key, uint64_t value, int level) {
  return mode_ == SketchMode::Full ? push_full(key, value, level)
                                   : push_hw(key, value, level);
}

size_t Sketch1D::push_full(uint32_t key, uint64_t value, int level) {
  const int h = levels();
  uint32_t x = key;
  uint64_t v = value;
  size_t visited = 0;
  for (int i = level; i < h; ++i) {
    x = mask_addr(spec_, x, i);
    const uint32_t slot = slot_of(i, x);
    Bucket& b = bucket_at(i, slot);
    ++visited;
    inflow_[size_t(i)] += v;
    if (hook_) hook_(i, slot, x, 0, v);
    uint32_t ev_src, ev_dst;
    uint64_t ev_val;
    switch (bucket_insert(b, x, 0, v, ev_src, ev_dst, ev_val)) {
      case InsertOutcome::Admitted:
        return visited;
      case InsertOutcome::Passed:
        break;
      case InsertOutcome::Evicted:
        x = ev_src;
        v = ev_val;
        break;
    }
  }
  return visited;
}

size_t Sketch1D::push_hw(uint32_t key, uint64_t value, int level) {
  const int h = levels();
  uint32_t x = key;
  uint64_t v = value;
  size_t visited = 0;
  for (int i = level; i < h; ++i) {
    x = mask_addr(spec_, x, i);
    const uint32_t slot = slot_of(i, x);
    Bucket& b = bucket_at(i, slot);
    ++visited;
    inflow_[size_t(i)] += v;
    if (hook_) hook_(i, slot, x, 0, v);
    if (i == h - 1) {
      // top level keeps a single total counter
      b.total += v;
      return visited;
    }
    uint32_t ev_key;
    uint64_t ev_val;
    switch (bucket_insert_hw(b, x, v, ev_key, ev_val)) {
      case InsertOutcome::Admitted:
        return visited;
      case InsertOutcome::Passed:
        break;
      case InsertOutcome::Evicted:
        if (ev_val == 0) return visited;  // init sentinel carried out; nothing to push
        x = ev_key;
        v = ev_val;
        break;
    }
  }
  return visited;
}

int64_t Sketch1D::estimate(uint32_t key, int level, int t) const {
  const int h = levels();
  const bool hw = mode_ == SketchMode::HwFaithful;
  if (hw && level == h - 1) {
    return int64_t(bucket_at(h - 1, slot_of(h - 1, 0)).total);
  }
  const Bucket& b0 = bucket_at(level, slot_of(level, key));
  assert(bucket_occupied(level, b0) && b0.key_src == key);
  int64_t best = (int64_t(b0.total) + b0.indicator) / 2;
  int64_t carry = int64_t(b0.cumulative);
  const int last = std::min(level + t, h - 1);
  for (int i = level + 1; i <= last; ++i) {
    const uint32_t y = mask_addr(spec_, key, i);
    const Bucket& a = bucket_at(i, slot_of(i, y));
    int64_t u;
    if (hw && i == h - 1) {
      // the wildcard always contains the key's generalization
      u = int64_t(a.total) + carry;
    } else if (bucket_occupied(i, a) && a.key_src == y) {
      u = (int64_t(a.total) + a.indicator) / 2 + carry;
      carry += int64_t(a.cumulative);
    } else {
      u = (int64_t(a.total) - a.indicator) / 2 + carry;
    }
    best = std::min(best, u);
  }
  return best;
}

HHHReport Sketch1D::detect(uint64_t threshold) {
  if (detected_) throw std::logic_error("detect: already run this epoch; reset() first");
  detected_ = true;

  const int h = levels();
  const bool hw = mode_ == SketchMode::HwFaithful;
  struct Reported {
    uint32_t key;
    int level;
    uint64_t c_snap;
  };
  std::vector<Reported> reported;

  HHHReport report;
  report.spec = spec_;
  report.threshold = threshold;
  report.records = records_;
  report.traversal_hist = hist_;
  report.occupancy = occupancy();

  for (int i = 0; i < h; ++i) {
    const size_t prior = reported.size();  // entries from levels < i
    for (uint32_t j = 0; j < widths_[size_t(i)]; ++j) {
      Bucket& b = bucket_at(i, j);
      if (!bucket_occupied(i, b)) continue;
      const uint32_t x = (hw && i == h - 1) ? 0 : b.key_src;
      const int64_t cond =
          (hw && i == h - 1) ? int64_t(b.total) : estimate(x, i, t_);
      if (cond >= int64_t(threshold)) {
        uint64_t total_est = uint64_t(cond);
        const Key xk{x, 0, Coordinate{uint8_t(i), 0}};
        for (size_t r = 0; r < prior; ++r) {
          const Key rk{reported[r].key, 0, Coordinate{uint8_t(reported[r].level), 0}};
          if (covers(spec_, rk, xk)) total_est += reported[r].c_snap;
        }
        reported.push_back({x, i, b.cumulative});
        report.entries.push_back({xk, total_est});
      } else if (i + 1 < h) {
        push(x, b.cumulative, i + 1);
      }
    }
  }
  return report;
}

void Sketch1D::reset() {
  init_buckets();
  std::fill(inflow_.begin(), inflow_.end(), 0);
  std::fill(hist_.begin(), hist_.end(), 0);
  records_ = 0;
  detected_ = false;
}

uint64_t Sketch1D::level_value_sum(int level) const {
  uint64_t sum = 0;
  for (uint32_t j = 0; j < widths_[size_t(level)]; ++j) sum += bucket_at(level, j).total;
  return sum;
}

std::vector<uint64_t> Sketch1D::occupancy() const {
  std::vector<uint64_t> occ(size_t(levels()), 0);
  for (int i = 0; i < levels(); ++i)
    for (uint32_t j = 0; j < widths_[size_t(i)]; ++j)
      if (bucket_occupied(i, bucket_at(i, j))) ++occ[size_t(i)];
  return occ;
}

std::vector<uint8_t> Sketch1D::serialize_state() const {
  std::vector<uint8_t> out;
  out.reserve(buckets_.size() * 33);
  auto put32 = [&](uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(uint8_t(v >> (8 * k)));
  };
  auto put64 = [&](uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(uint8_t(v >> (8 * k)));
  };
  for (const Bucket& b : buckets_) {
    put32(b.key_src);
    put32(b.key_dst);
    out.push_back(b.occupied ? 1 : 0);
    put64(b.total);
    put64(uint64_t(b.indicator));
    put64(b.cumulative);
  }
  return out;
}

}  // namespace mvpipe
