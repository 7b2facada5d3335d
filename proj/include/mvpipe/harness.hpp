#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mvpipe/metrics.hpp"
#include "mvpipe/oracle.hpp"
#include "mvpipe/report.hpp"
#include "mvpipe/sketch1d.hpp"
#include "mvpipe/sketch2d.hpp"
#include "mvpipe/trace.hpp"

namespace mvpipe {

// Exactly one of phi / absolute must be set.
struct ThresholdRule {
  std::optional<double> phi;
  std::optional<uint64_t> absolute;

  uint64_t resolve(uint64_t epoch_total) const;
};

// One sketch per epoch semantics: update the epoch's records, detect, reset.
std::vector<HHHReport> run_epochs_1d(const Trace& trace, const Sketch1DConfig& config,
                                     const ThresholdRule& rule);
std::vector<HHHReport> run_epochs_2d(const Trace& trace, const Sketch2DConfig& config,
                                     const ThresholdRule& rule);

struct EvalRow {
  size_t epoch = 0;
  uint64_t threshold = 0;
  uint64_t true_hhhs = 0;
  double mean_traversed = 0.0;
  AccuracyResult acc;
};

// Sketch versus the exact oracle, per epoch.
std::vector<EvalRow> eval_epochs_1d(const Trace& trace, const Sketch1DConfig& config,
                                    const ThresholdRule& rule);
std::vector<EvalRow> eval_epochs_2d(const Trace& trace, const Sketch2DConfig& config,
                                    const ThresholdRule& rule);

AccuracyResult average_rows(const std::vector<EvalRow>& rows);

}  // namespace mvpipe
