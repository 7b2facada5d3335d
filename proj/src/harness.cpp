#include "mvpipe/harness.hpp"

#include <stdexcept>

namespace mvpipe {

namespace {

uint64_t span_total(std::span<const PacketRecord> records) {
  uint64_t total = 0;
  for (const auto& r : records) total += r.value;
  return total;
}

}  // namespace

uint64_t ThresholdRule::resolve(uint64_t epoch_total) const {
  if (phi.has_value() == absolute.has_value())
    throw std::invalid_argument("threshold rule: set exactly one of phi / absolute");
  if (absolute) return *absolute;
  return resolve_threshold(*phi, epoch_total);
}

std::vector<HHHReport> run_epochs_1d(const Trace& trace, const Sketch1DConfig& config,
                                     const ThresholdRule& rule) {
  std::vector<HHHReport> reports;
  Sketch1D sketch(config);
  for (size_t e = 0; e < trace.epoch_count(); ++e) {
    const auto records = trace.epoch(e);
    for (const auto& r : records) sketch.update(r.src, r.value);
    reports.push_back(sketch.detect(rule.resolve(span_total(records))));
    sketch.reset();
  }
  return reports;
}

std::vector<HHHReport> run_epochs_2d(const Trace& trace, const Sketch2DConfig& config,
                                     const ThresholdRule& rule) {
  std::vector<HHHReport> reports;
  Sketch2D sketch(config);
  for (size_t e = 0; e < trace.epoch_count(); ++e) {
    const auto records = trace.epoch(e);
    for (const auto& r : records) sketch.update(r.src, r.dst, r.value);
    reports.push_back(sketch.detect(rule.resolve(span_total(records))));
    sketch.reset();
  }
  return reports;
}

std::vector<EvalRow> eval_epochs_1d(const Trace& trace, const Sketch1DConfig& config,
                                    const ThresholdRule& rule) {
  std::vector<EvalRow> rows;
  const auto reports = run_epochs_1d(trace, config, rule);
  for (size_t e = 0; e < reports.size(); ++e) {
    const GroundTruth truth = exact_hhh(trace.epoch(e), config.spec, reports[e].threshold);
    rows.push_back({e, reports[e].threshold, truth.entries.size(), reports[e].mean_traversed(),
                    accuracy(reports[e], truth)});
  }
  return rows;
}

std::vector<EvalRow> eval_epochs_2d(const Trace& trace, const Sketch2DConfig& config,
                                    const ThresholdRule& rule) {
  std::vector<EvalRow> rows;
  const auto reports = run_epochs_2d(trace, config, rule);
  for (size_t e = 0; e < reports.size(); ++e) {
    const GroundTruth truth = exact_hhh(trace.epoch(e), config.spec, reports[e].threshold);
    rows.push_back({e, reports[e].threshold, truth.entries.size(), reports[e].mean_traversed(),
                    accuracy(reports[e], truth)});
  }
  return rows;
}

AccuracyResult average_rows(const std::vector<EvalRow>& rows) {
  AccuracyResult avg;
  if (rows.empty()) return avg;
  avg.precision = avg.recall = avg.relative_error = 0;
  for (const auto& r : rows) {
    avg.precision += r.acc.precision;
    avg.recall += r.acc.recall;
    avg.relative_error += r.acc.relative_error;
    avg.tp += r.acc.tp;
    avg.fp += r.acc.fp;
    avg.fn += r.acc.fn;
  }
  avg.precision /= double(rows.size());
  avg.recall /= double(rows.size());
  avg.relative_error /= double(rows.size());
  return avg;
}

}  // namespace mvpipe
