#include "mvpipe/report.hpp"

#include <algorithm>

#include "json.hpp"

namespace mvpipe {

double HHHReport::mean_traversed() const {
  uint64_t updates = 0, nodes = 0;
  for (size_t k = 0; k < traversal_hist.size(); ++k) {
    updates += traversal_hist[k];
    nodes += traversal_hist[k] * k;
  }
  return updates == 0 ? 0.0 : double(nodes) / double(updates);
}

bool HHHReport::contains(const Key& k) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const HHHEntry& e) { return e.key == k; });
}

std::string report_json(const HHHReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : report.entries)
    arr.push_back({{"key", format_key(report.spec, e.key)}, {"count", e.estimate}});
  return arr.dump(2) + "\n";
}

std::string report_csv(const HHHReport& report) {
  std::string out = "key,count\n";
  for (const auto& e : report.entries)
    out += format_key(report.spec, e.key) + "," + std::to_string(e.estimate) + "\n";
  return out;
}

std::string report_stats_json(const HHHReport& report) {
  nlohmann::json j;
  j["records"] = report.records;
  j["threshold"] = report.threshold;
  j["hhh_count"] = report.entries.size();
  j["mean_traversed"] = report.mean_traversed();
  nlohmann::json hist = nlohmann::json::object();
  for (size_t k = 0; k < report.traversal_hist.size(); ++k)
    if (report.traversal_hist[k] > 0) hist[std::to_string(k)] = report.traversal_hist[k];
  j["traversal_hist"] = hist;
  j["occupancy"] = report.occupancy;
  return j.dump(2) + "\n";
}

}  // namespace mvpipe
