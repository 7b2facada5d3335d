#include "mvpipe/widths.hpp"

#include <stdexcept>

namespace mvpipe {

std::vector<uint32_t> allocate_widths(uint64_t total_buckets, const HierarchySpec& spec) {
  const int h = spec.node_count;
  if (total_buckets < uint64_t(h))
    throw std::invalid_argument("allocate_widths: budget below one bucket per array");

  std::vector<uint32_t> widths(size_t(h), 0);
  uint64_t residual = total_buckets;
  int remaining = h;
  uint64_t w_avg = residual / uint64_t(remaining);
  for (int i = h - 1; i >= 0; --i) {
    const uint64_t space = key_space_size(spec, coord_at(spec, i));
    if (space < w_avg) {
      widths[size_t(i)] = uint32_t(space);
      residual -= space;
      --remaining;
      if (remaining > 0) w_avg = residual / uint64_t(remaining);
    } else {
      widths[size_t(i)] = uint32_t(w_avg);
      residual -= w_avg;
      --remaining;
    }
  }
  // floor-division leftover
  widths[0] += uint32_t(residual);
  return widths;
}

std::vector<uint32_t> allocate_widths_bytes(uint64_t budget_bytes, uint64_t bucket_size_bytes,
                                            const HierarchySpec& spec) {
  if (bucket_size_bytes == 0) throw std::invalid_argument("allocate_widths: zero bucket size");
  return allocate_widths(budget_bytes / bucket_size_bytes, spec);
}

}  // namespace mvpipe
