#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvpipe/hierarchy.hpp"

namespace mvpipe {

struct HHHEntry {
  Key key;
  uint64_t estimate = 0;  // estimated full count of the reported key
};

struct HHHReport {
  HierarchySpec spec;
  uint64_t threshold = 0;
  std::vector<HHHEntry> entries;  // detection order: node index, then slot

  // instrumentation snapshot taken at detect time
  uint64_t records = 0;
  std::vector<uint64_t> traversal_hist;  // [k] = updates that visited k nodes
  std::vector<uint64_t> occupancy;       // occupied buckets per node

  double mean_traversed() const;
  bool contains(const Key& k) const;
};

// The report file body: a JSON array of {"key": "a.b.c.d/m", "count": N}.
std::string report_json(const HHHReport& report);
// CSV body with a "key,count" header.
std::string report_csv(const HHHReport& report);
// Instrumentation as a separate JSON object (deterministic, no timings).
std::string report_stats_json(const HHHReport& report);

}  // namespace mvpipe
