#include "mvpipe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace mvpipe {

namespace {

struct FlowAgg {
  uint64_t id;  // src << 32 | dst
  uint64_t value;
};

uint32_t flow_src(uint64_t id) { return uint32_t(id >> 32); }
uint32_t flow_dst(uint64_t id) { return uint32_t(id); }

// Level-0 aggregation, sorted by flow id for deterministic iteration.
std::pair<std::vector<FlowAgg>, uint64_t> aggregate(std::span<const PacketRecord> records,
                                                    const HierarchySpec& spec) {
  std::unordered_map<uint64_t, uint64_t> agg;
  agg.reserve(records.size());
  uint64_t total = 0;
  for (const auto& r : records) {
    const uint64_t id = (uint64_t(r.src) << 32) | (spec.dims == 2 ? r.dst : 0);
    agg[id] += r.value;
    total += r.value;
  }
  std::vector<FlowAgg> flows;
  flows.reserve(agg.size());
  for (const auto& [id, v] : agg) flows.push_back({id, v});
  std::sort(flows.begin(), flows.end(), [](const FlowAgg& a, const FlowAgg& b) { return a.id < b.id; });
  return {std::move(flows), total};
}

std::vector<Coordinate> coords_at_level(const HierarchySpec& spec, int level) {
  std::vector<Coordinate> out;
  if (spec.dims == 1) {
    if (level < spec.depth) out.push_back(Coordinate{uint8_t(level), 0});
    return out;
  }
  for (int s = 0; s < spec.depth; ++s) {
    const int t = level - s;
    if (t >= 0 && t < spec.depth) out.push_back(Coordinate{uint8_t(s), uint8_t(t)});
  }
  return out;
}

Key flow_key(const HierarchySpec& spec, const FlowAgg& f, Coordinate c) {
  return generalize(spec, Key{flow_src(f.id), flow_dst(f.id), Coordinate{0, 0}}, c);
}

}  // namespace

ExactCounts exact_counts(std::span<const PacketRecord> records, const HierarchySpec& spec) {
  ExactCounts out;
  out.spec = spec;
  auto [flows, total] = aggregate(records, spec);
  out.total = total;
  for (int node = 0; node < spec.node_count; ++node) {
    const Coordinate c = coord_at(spec, node);
    for (const auto& f : flows) out.counts[flow_key(spec, f, c)] += f.value;
  }
  return out;
}

bool GroundTruth::contains(const Key& k) const { return find(k) != nullptr; }

const TruthEntry* GroundTruth::find(const Key& k) const {
  for (const auto& e : entries)
    if (e.key == k) return &e;
  return nullptr;
}

uint64_t resolve_threshold(double phi, uint64_t total) {
  if (phi <= 0 || phi >= 1) throw std::invalid_argument("phi must be in (0, 1)");
  const long long t = std::llround(phi * double(total));
  return t < 1 ? 1 : uint64_t(t);
}

GroundTruth exact_hhh(std::span<const PacketRecord> records, const HierarchySpec& spec,
                      uint64_t abs_threshold) {
  GroundTruth truth;
  truth.spec = spec;
  truth.threshold = abs_threshold;

  auto [flows, total] = aggregate(records, spec);
  truth.total = total;
  std::vector<char> covered(flows.size(), 0);

  const int max_level = (spec.depth - 1) * spec.dims;
  for (int level = 0; level <= max_level; ++level) {
    const auto coords = coords_at_level(spec, level);

    std::unordered_map<Key, uint64_t, KeyHasher> cond;
    for (size_t i = 0; i < flows.size(); ++i) {
      if (covered[i]) continue;
      for (const Coordinate c : coords) cond[flow_key(spec, flows[i], c)] += flows[i].value;
    }

    std::vector<Key> fresh;
    for (const auto& [k, v] : cond)
      if (v >= abs_threshold) fresh.push_back(k);
    if (fresh.empty()) continue;
    std::sort(fresh.begin(), fresh.end(), [](const Key& a, const Key& b) {
      if (a.coord.src != b.coord.src) return a.coord.src < b.coord.src;
      if (a.coord.dst != b.coord.dst) return a.coord.dst < b.coord.dst;
      if (a.src != b.src) return a.src < b.src;
      return a.dst < b.dst;
    });

    // exact S(x) for the new members only: one pass over all flows
    std::unordered_map<Key, uint64_t, KeyHasher> exact;
    for (const Key& k : fresh) exact[k] = 0;
    for (const auto& f : flows)
      for (const Coordinate c : coords) {
        auto it = exact.find(flow_key(spec, f, c));
        if (it != exact.end()) it->second += f.value;
      }

    for (const Key& k : fresh)
      truth.entries.push_back({k, level, cond[k], exact[k]});

    std::unordered_set<Key, KeyHasher> fresh_set(fresh.begin(), fresh.end());
    for (size_t i = 0; i < flows.size(); ++i) {
      if (covered[i]) continue;
      for (const Coordinate c : coords)
        if (fresh_set.count(flow_key(spec, flows[i], c))) {
          covered[i] = 1;
          break;
        }
    }
  }
  return truth;
}

GroundTruth exact_hhh_phi(std::span<const PacketRecord> records, const HierarchySpec& spec,
                          double phi) {
  uint64_t total = 0;
  for (const auto& r : records) total += r.value;
  return exact_hhh(records, spec, resolve_threshold(phi, total));
}

uint64_t conditioned_count(const HierarchySpec& spec, const Key& x, std::span<const Key> hhhs,
                           std::span<const PacketRecord> records) {
  auto [flows, total] = aggregate(records, spec);
  (void)total;
  uint64_t sum = 0;
  for (const auto& f : flows) {
    const Key fk{flow_src(f.id), flow_dst(f.id), Coordinate{0, 0}};
    if (!covers(spec, fk, x)) continue;
    bool excluded = false;
    for (const Key& y : hhhs)
      if (covers(spec, fk, y)) {
        excluded = true;
        break;
      }
    if (!excluded) sum += f.value;
  }
  return sum;
}

std::string truth_csv(const GroundTruth& truth) {
  std::string out = "key,level,exact_count,conditioned_count\n";
  for (const auto& e : truth.entries)
    out += format_key(truth.spec, e.key) + "," + std::to_string(e.level) + "," +
           std::to_string(e.exact) + "," + std::to_string(e.conditioned) + "\n";
  return out;
}

ShadowTracker::ShadowTracker(Sketch1D& sketch) {
  offsets_.resize(size_t(sketch.levels()) + 1, 0);
  for (int i = 0; i < sketch.levels(); ++i)
    offsets_[size_t(i) + 1] = offsets_[size_t(i)] + sketch.widths()[size_t(i)];
  maps_.resize(offsets_.back());
  sketch.set_inflow_hook([this](int node, uint32_t slot, uint32_t ks, uint32_t kd, uint64_t v) {
    record(node, slot, ks, kd, v);
  });
}

ShadowTracker::ShadowTracker(Sketch2D& sketch) {
  offsets_.resize(size_t(sketch.nodes()) + 1, 0);
  for (int i = 0; i < sketch.nodes(); ++i)
    offsets_[size_t(i) + 1] = offsets_[size_t(i)] + sketch.widths()[size_t(i)];
  maps_.resize(offsets_.back());
  sketch.set_inflow_hook([this](int node, uint32_t slot, uint32_t ks, uint32_t kd, uint64_t v) {
    record(node, slot, ks, kd, v);
  });
}

void ShadowTracker::record(int node, uint32_t slot, uint32_t ks, uint32_t kd, uint64_t v) {
  maps_[offsets_[size_t(node)] + slot][(uint64_t(ks) << 32) | kd] += v;
}

const std::unordered_map<uint64_t, uint64_t>& ShadowTracker::deltas(int node, uint32_t slot) const {
  return maps_[offsets_[size_t(node)] + slot];
}

uint64_t ShadowTracker::delta(int node, uint32_t slot, uint32_t key_src, uint32_t key_dst) const {
  const auto& m = deltas(node, slot);
  auto it = m.find((uint64_t(key_src) << 32) | key_dst);
  return it == m.end() ? 0 : it->second;
}

void ShadowTracker::clear() {
  for (auto& m : maps_) m.clear();
}

namespace {

std::string bucket_tag(int level, uint32_t slot) {
  return "level " + std::to_string(level) + " slot " + std::to_string(slot);
}

}  // namespace

std::optional<std::string> check_mjrty_bounds(const Sketch1D& sketch, const ShadowTracker& shadow) {
  for (int i = 0; i < sketch.levels(); ++i) {
    for (uint32_t j = 0; j < sketch.widths()[size_t(i)]; ++j) {
      const Bucket& b = sketch.bucket_at(i, j);
      const auto& dmap = shadow.deltas(i, j);
      uint64_t inflow_sum = 0;
      for (const auto& [key, dv] : dmap) inflow_sum += dv;
      if (inflow_sum != b.total)
        return "shadow inflow " + std::to_string(inflow_sum) + " != V " +
               std::to_string(b.total) + " at " + bucket_tag(i, j);
      const int64_t upper_match = (int64_t(b.total) + b.indicator) / 2;
      const int64_t upper_other = (int64_t(b.total) - b.indicator) / 2;
      if (b.occupied) {
        const uint64_t dk = shadow.delta(i, j, b.key_src, b.key_dst);
        if (int64_t(b.cumulative) > int64_t(dk))
          return "C " + std::to_string(b.cumulative) + " > delta(K) " + std::to_string(dk) +
                 " at " + bucket_tag(i, j);
        if (int64_t(dk) > upper_match)
          return "delta(K) " + std::to_string(dk) + " > (V+I)/2 " + std::to_string(upper_match) +
                 " at " + bucket_tag(i, j);
      }
      const uint64_t cand = b.occupied ? ((uint64_t(b.key_src) << 32) | b.key_dst) : 0;
      for (const auto& [key, dv] : dmap) {
        if (b.occupied && key == cand) continue;
        if (int64_t(dv) > upper_other)
          return "delta(non-candidate) " + std::to_string(dv) + " > (V-I)/2 " +
                 std::to_string(upper_other) + " at " + bucket_tag(i, j);
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_estimate_upper_bound(const Sketch1D& sketch,
                                                      const ShadowTracker& shadow) {
  for (int i = 0; i < sketch.levels(); ++i) {
    for (uint32_t j = 0; j < sketch.widths()[size_t(i)]; ++j) {
      const Bucket& b = sketch.bucket_at(i, j);
      if (!b.occupied) continue;
      const int64_t est = sketch.estimate(b.key_src, i);
      const uint64_t dk = shadow.delta(i, j, b.key_src, b.key_dst);
      if (est < int64_t(dk))
        return "estimate " + std::to_string(est) + " < delta " + std::to_string(dk) + " at " +
               bucket_tag(i, j);
    }
  }
  return std::nullopt;
}

ShadowRun shadow_replay(std::span<const PacketRecord> records, const Sketch1DConfig& config) {
  ShadowRun run;
  run.sketch = std::make_unique<Sketch1D>(config);
  run.tracker = std::make_unique<ShadowTracker>(*run.sketch);
  for (const auto& r : records) run.sketch->update(r.src, r.value);
  return run;
}

}  // namespace mvpipe
