#pragma once

#include <cstdint>
#include <vector>

#include "mvpipe/hierarchy.hpp"

namespace mvpipe {

// Memory accounting used for budget-based configuration: four fields of
// four bytes each, plus four extra key bytes for the 2D address pair.
inline constexpr uint64_t bucket_accounting_bytes(const HierarchySpec& spec) {
  return spec.dims == 1 ? 16 : 20;
}

// Top-down width assignment: walk arrays from H-1 to 0; an array whose key
// space is smaller than the running average gets capped at the key space
// and the average is recomputed over the remaining arrays; leftover buckets
// from floor division go to array 0. Throws if total_buckets < H.
std::vector<uint32_t> allocate_widths(uint64_t total_buckets, const HierarchySpec& spec);

std::vector<uint32_t> allocate_widths_bytes(uint64_t budget_bytes, uint64_t bucket_size_bytes,
                                            const HierarchySpec& spec);

}  // namespace mvpipe
