#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvpipe/oracle.hpp"
#include "mvpipe/report.hpp"
#include "mvpipe/sketch1d.hpp"
#include "mvpipe/trace.hpp"

namespace mvpipe {

struct AccuracyResult {
  double precision = 1.0;  // TP/(TP+FP), 0/0 defined as 1
  double recall = 1.0;     // TP/(TP+FN), 0/0 defined as 1
  double relative_error = 0.0;  // mean |S_hat - S| / S over reported true HHHs
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
};

// Identity match requires key and coordinate both. Throws on spec mismatch.
AccuracyResult accuracy(const HHHReport& reported, const GroundTruth& truth);

// |S_hat - S| / S for each reported true HHH (for median statistics).
std::vector<double> per_key_relative_errors(const HHHReport& reported, const GroundTruth& truth);

struct ThroughputResult {
  bool valid = false;  // false for an empty trace: no rate to report
  std::vector<double> updates_per_sec;
  double detect_seconds = 0.0;
  double mean_traversed = 0.0;

  double median() const;
  double min() const;
  double max() const;
};

// Replays the in-memory records `repetitions` times on fresh sketch state,
// timing updates only; detect is timed once, separately.
ThroughputResult throughput(const Sketch1DConfig& config, std::span<const PacketRecord> records,
                            int repetitions);

}  // namespace mvpipe
