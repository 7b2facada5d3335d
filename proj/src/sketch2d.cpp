#include "mvpipe/sketch2d.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "mvpipe/hashing.hpp"

namespace mvpipe {

Sketch2D::Sketch2D(Sketch2DConfig cfg)
    : spec_(cfg.spec), widths_(std::move(cfg.widths)), seed_(cfg.seed), t_(cfg.ancestor_depth) {
  if (spec_.dims != 2) throw std::invalid_argument("Sketch2D: spec must be 2D");
  if (widths_.size() != spec_.node_count)
    throw std::invalid_argument("Sketch2D: widths size must equal the node count");
  if (t_ < 0) throw std::invalid_argument("Sketch2D: ancestor depth must be >= 0");

  const int h = nodes();
  offsets_.resize(size_t(h) + 1, 0);
  seeds_.resize(size_t(h));
  for (int i = 0; i < h; ++i) {
    if (widths_[size_t(i)] == 0) throw std::invalid_argument("Sketch2D: zero-width node");
    const uint64_t space = key_space_size(spec_, coord_at(spec_, i));
    widths_[size_t(i)] = uint32_t(std::min<uint64_t>(widths_[size_t(i)], space));
    offsets_[size_t(i) + 1] = offsets_[size_t(i)] + widths_[size_t(i)];
    seeds_[size_t(i)] = derive_seed(seed_, uint64_t(i));
  }
  buckets_.resize(offsets_.back());
  inflow_.resize(size_t(h), 0);
  hist_.resize(size_t(h) + 1, 0);
}

uint32_t Sketch2D::slot_of(int node, uint32_t key_src, uint32_t key_dst) const {
  return reduce_slot(hash_key(seeds_[size_t(node)], key_src, key_dst), widths_[size_t(node)]);
}

const Bucket& Sketch2D::bucket_at(int node, uint32_t slot) const {
  return buckets_[offsets_[size_t(node)] + slot];
}

Bucket& Sketch2D::bucket_at(int node, uint32_t slot) {
  return buckets_[offsets_[size_t(node)] + slot];
}

void Sketch2D::update(uint32_t src, uint32_t dst, uint64_t value) {
  if (value == 0) throw std::invalid_argument("update: value must be > 0");
  size_t visited = 0;
  bottom_chain(0, src, dst, value, visited);
  ++records_;
  ++hist_[std::min(visited, hist_.size() - 1)];
}

void Sketch2D::column_push(int s, int from_t, uint32_t ks, uint32_t kd, uint64_t v,
                           size_t& visited) {
  const int d = spec_.depth;
  uint32_t xs = ks;  // source degree is fixed at s within the column
  uint32_t xd = kd;
  uint64_t val = v;
  for (int tdeg = from_t; tdeg < d; ++tdeg) {
    xd = mask_addr(spec_, xd, tdeg);
    const int node = node_index(spec_, Coordinate{uint8_t(s), uint8_t(tdeg)});
    const uint32_t slot = slot_of(node, xs, xd);
    Bucket& b = bucket_at(node, slot);
    ++visited;
    inflow_[size_t(node)] += val;
    if (hook_) hook_(node, slot, xs, xd, val);
    uint32_t ev_src, ev_dst;
    uint64_t ev_val;
    switch (bucket_insert(b, xs, xd, val, ev_src, ev_dst, ev_val)) {
      case InsertOutcome::Admitted:
        return;
      case InsertOutcome::Passed:
        break;
      case InsertOutcome::Evicted:
        xs = ev_src;
        xd = ev_dst;
        val = ev_val;
        break;
    }
  }
  // a pair not admitted at the column top is dropped there (counted in V);
  // coverage rides on the bottom chain, which ends at the global wildcard
}

void Sketch2D::bottom_chain(int s, uint32_t ks, uint32_t kd, uint64_t v, size_t& visited) {
  const int d = spec_.depth;
  uint32_t xs = ks;
  uint64_t val = v;
  for (int sdeg = s; sdeg < d; ++sdeg) {
    xs = mask_addr(spec_, xs, sdeg);
    const int node = node_index(spec_, Coordinate{uint8_t(sdeg), 0});
    const uint32_t slot = slot_of(node, xs, kd);
    Bucket& b = bucket_at(node, slot);
    ++visited;
    inflow_[size_t(node)] += val;
    if (hook_) hook_(node, slot, xs, kd, val);
    uint32_t ev_src, ev_dst;
    uint64_t ev_val;
    switch (bucket_insert(b, xs, kd, val, ev_src, ev_dst, ev_val)) {
      case InsertOutcome::Admitted:
        return;  // admitted by a bottom candidate: the progression stops
      case InsertOutcome::Passed:
        // the same pair climbs this column and moves to the next bottom node
        column_push(sdeg, 1, xs, kd, val, visited);
        break;
      case InsertOutcome::Evicted:
        // the arriving key is admitted; the withheld candidate now receives
        // the same two-direction treatment as any non-admitted key
        column_push(sdeg, 1, ev_src, ev_dst, ev_val, visited);
        xs = ev_src;
        kd = ev_dst;
        val = ev_val;
        break;
    }
  }
}

int64_t Sketch2D::estimate(uint32_t key_src, uint32_t key_dst, Coordinate at, int t) const {
  const int d = spec_.depth;
  const int node0 = node_index(spec_, at);
  const Bucket& b0 = bucket_at(node0, slot_of(node0, key_src, key_dst));
  assert(b0.occupied && b0.key_src == key_src && b0.key_dst == key_dst);
  int64_t best = (int64_t(b0.total) + b0.indicator) / 2;
  int64_t carry = int64_t(b0.cumulative);
  const int last = std::min(int(at.dst) + t, d - 1);
  for (int tdeg = int(at.dst) + 1; tdeg <= last; ++tdeg) {
    const uint32_t yd = mask_addr(spec_, key_dst, tdeg);
    const int node = node_index(spec_, Coordinate{at.src, uint8_t(tdeg)});
    const Bucket& a = bucket_at(node, slot_of(node, key_src, yd));
    int64_t u;
    if (a.occupied && a.key_src == key_src && a.key_dst == yd) {
      u = (int64_t(a.total) + a.indicator) / 2 + carry;
      carry += int64_t(a.cumulative);
    } else {
      u = (int64_t(a.total) - a.indicator) / 2 + carry;
    }
    best = std::min(best, u);
  }
  return best;
}

HHHReport Sketch2D::detect(uint64_t threshold) {
  if (detected_) throw std::logic_error("detect: already run this epoch; reset() first");
  detected_ = true;

  const int d = spec_.depth;
  struct Reported {
    Key key;
    uint64_t c_snap;
  };
  std::vector<Reported> reported;

  HHHReport report;
  report.spec = spec_;
  report.threshold = threshold;
  report.records = records_;
  report.traversal_hist = hist_;
  report.occupancy = occupancy();

  size_t ignored = 0;
  for (int node = 0; node < nodes(); ++node) {
    const Coordinate c = coord_at(spec_, node);
    const size_t prior = reported.size();
    for (uint32_t j = 0; j < widths_[size_t(node)]; ++j) {
      Bucket& b = bucket_at(node, j);
      if (!b.occupied) continue;
      const Key xk{b.key_src, b.key_dst, c};
      const int64_t cond = estimate(b.key_src, b.key_dst, c, t_);
      if (cond >= int64_t(threshold)) {
        // add back the counts withheld by descendants whose flows never
        // re-entered this column: same-column lower candidates and earlier
        // bottom-node candidates; other columns' interior HHHs fed their
        // mass rightward already, so it is inside this column's counts
        uint64_t total_est = uint64_t(cond);
        for (size_t r = 0; r < prior; ++r) {
          const Key& hk = reported[r].key;
          const bool same_column_below = hk.coord.src == c.src && hk.coord.dst < c.dst;
          const bool earlier_bottom = hk.coord.dst == 0 && hk.coord.src < c.src;
          if ((same_column_below || earlier_bottom) && covers(spec_, hk, xk))
            total_est += reported[r].c_snap;
        }
        reported.push_back({xk, b.cumulative});
        report.entries.push_back({xk, total_est});
      } else {
        if (c.dst > 0) {
          if (c.dst + 1 < d) column_push(c.src, c.dst + 1, b.key_src, b.key_dst, b.cumulative, ignored);
          // the global wildcard's leftovers have nowhere to go
        } else {
          column_push(c.src, 1, b.key_src, b.key_dst, b.cumulative, ignored);
          if (c.src + 1 < d) bottom_chain(c.src + 1, b.key_src, b.key_dst, b.cumulative, ignored);
        }
      }
    }
  }
  return report;
}

void Sketch2D::reset() {
  std::fill(buckets_.begin(), buckets_.end(), Bucket{});
  std::fill(inflow_.begin(), inflow_.end(), 0);
  std::fill(hist_.begin(), hist_.end(), 0);
  records_ = 0;
  detected_ = false;
}

uint64_t Sketch2D::node_value_sum(int node) const {
  uint64_t sum = 0;
  for (uint32_t j = 0; j < widths_[size_t(node)]; ++j) sum += bucket_at(node, j).total;
  return sum;
}

uint64_t Sketch2D::node_cumulative_sum(int node) const {
  uint64_t sum = 0;
  for (uint32_t j = 0; j < widths_[size_t(node)]; ++j) {
    const Bucket& b = bucket_at(node, j);
    if (b.occupied) sum += b.cumulative;
  }
  return sum;
}

std::vector<uint64_t> Sketch2D::occupancy() const {
  std::vector<uint64_t> occ(size_t(nodes()), 0);
  for (int i = 0; i < nodes(); ++i)
    for (uint32_t j = 0; j < widths_[size_t(i)]; ++j)
      if (bucket_at(i, j).occupied) ++occ[size_t(i)];
  return occ;
}

std::vector<uint8_t> Sketch2D::serialize_state() const {
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
