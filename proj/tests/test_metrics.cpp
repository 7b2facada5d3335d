#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "mvpipe/harness.hpp"
#include "mvpipe/metrics.hpp"
#include "mvpipe/widths.hpp"

using namespace mvpipe;

namespace {

const HierarchySpec kByte1 = make_spec(1, Granularity::Byte);

GroundTruth make_truth(std::vector<TruthEntry> entries) {
  GroundTruth t;
  t.spec = kByte1;
  t.threshold = 10;
  t.total = 100;
  t.entries = std::move(entries);
  return t;
}

HHHReport make_report(std::vector<HHHEntry> entries) {
  HHHReport r;
  r.spec = kByte1;
  r.threshold = 10;
  r.entries = std::move(entries);
  return r;
}

const Key kA{0x01020304, 0, {0, 0}};
const Key kB{0x01020300, 0, {1, 0}};
const Key kC{0x0a000000, 0, {3, 0}};

}  // namespace

TEST_CASE("accuracy") {
  SUBCASE("perfect report") {
    auto truth = make_truth({{kA, 0, 20, 20}, {kB, 1, 15, 35}});
    auto rep = make_report({{kA, 20}, {kB, 35}});
    auto acc = accuracy(rep, truth);
    CHECK(acc.precision == 1.0);
    CHECK(acc.recall == 1.0);
    CHECK(acc.relative_error == 0.0);
    CHECK(acc.tp == 2);
  }
  SUBCASE("one hit one miss each way") {
    auto truth = make_truth({{kA, 0, 20, 20}, {kB, 1, 15, 35}});
    auto rep = make_report({{kA, 20}, {kC, 50}});
    auto acc = accuracy(rep, truth);
    CHECK(acc.precision == doctest::Approx(0.5));
    CHECK(acc.recall == doctest::Approx(0.5));
    CHECK(acc.tp == 1);
    CHECK(acc.fp == 1);
    CHECK(acc.fn == 1);
  }
  SUBCASE("coordinate is part of the identity") {
    auto truth = make_truth({{kA, 0, 20, 20}});
    // same address bits reported one level up: an error, not a match
    auto rep = make_report({{Key{0x01020304 & 0xffffff00, 0, {1, 0}}, 20}});
    auto acc = accuracy(rep, truth);
    CHECK(acc.tp == 0);
    CHECK(acc.precision == 0.0);
    CHECK(acc.recall == 0.0);
  }
  SUBCASE("relative error averages over reported true HHHs") {
    auto truth = make_truth({{kA, 0, 100, 100}});
    auto rep = make_report({{kA, 110}});
    CHECK(accuracy(rep, truth).relative_error == doctest::Approx(0.10));
  }
  SUBCASE("empty/empty defines 0/0 as one") {
    auto acc = accuracy(make_report({}), make_truth({}));
    CHECK(acc.precision == 1.0);
    CHECK(acc.recall == 1.0);
    CHECK(acc.relative_error == 0.0);
  }
  SUBCASE("set semantics: report order is irrelevant") {
    auto truth = make_truth({{kA, 0, 20, 20}, {kB, 1, 15, 35}, {kC, 3, 50, 50}});
    auto r1 = make_report({{kA, 21}, {kB, 36}, {kC, 50}});
    auto r2 = make_report({{kC, 50}, {kA, 21}, {kB, 36}});
    auto a1 = accuracy(r1, truth);
    auto a2 = accuracy(r2, truth);
    CHECK(a1.precision == a2.precision);
    CHECK(a1.recall == a2.recall);
    CHECK(a1.relative_error == a2.relative_error);
  }
  SUBCASE("spec mismatch is rejected") {
    auto truth = make_truth({});
    HHHReport rep;
    rep.spec = make_spec(1, Granularity::Bit);
    CHECK_THROWS_AS(accuracy(rep, truth), std::invalid_argument);
  }
  SUBCASE("per-key errors for medians") {
    auto truth = make_truth({{kA, 0, 100, 100}, {kB, 1, 15, 50}});
    auto rep = make_report({{kA, 105}, {kB, 50}, {kC, 7}});
    auto errs = per_key_relative_errors(rep, truth);
    REQUIRE(errs.size() == 2);
    std::sort(errs.begin(), errs.end());
    CHECK(errs[0] == doctest::Approx(0.0));
    CHECK(errs[1] == doctest::Approx(0.05));
  }
}

TEST_CASE("oracle fed back as a report scores perfectly") {
  auto trace = gen_zipf(5000, 1.1, 200, 3);
  auto truth = exact_hhh(trace.records, kByte1, 100);
  HHHReport rep;
  rep.spec = kByte1;
  rep.threshold = 100;
  for (const auto& e : truth.entries) rep.entries.push_back({e.key, e.exact});
  auto acc = accuracy(rep, truth);
  CHECK(acc.precision == 1.0);
  CHECK(acc.recall == 1.0);
  CHECK(acc.relative_error == 0.0);
}

TEST_CASE("throughput") {
  Sketch1DConfig cfg{kByte1, allocate_widths(1024, kByte1), 5, 2, SketchMode::Full};
  SUBCASE("empty trace reports not-applicable") {
    auto r = throughput(cfg, {}, 3);
    CHECK(!r.valid);
    CHECK(r.updates_per_sec.empty());
  }
  SUBCASE("one sample per repetition") {
    auto trace = gen_zipf(20000, 1.0, 1000, 9);
    auto r = throughput(cfg, trace.records, 3);
    CHECK(r.valid);
    CHECK(r.updates_per_sec.size() == 3);
    CHECK(r.median() > 0);
    CHECK(r.min() <= r.median());
    CHECK(r.median() <= r.max());
    CHECK(r.detect_seconds >= 0);
    CHECK(r.mean_traversed >= 1.0);
  }
}

TEST_CASE("harness epochs") {
  auto trace = split_epochs(gen_skew_controlled(3000, 5, 0.5, 17), 1000);
  Sketch1DConfig cfg{kByte1, allocate_widths(2048, kByte1), 5, 2, SketchMode::Full};
  SUBCASE("per-epoch reports with phi thresholds") {
    auto reports = run_epochs_1d(trace, cfg, ThresholdRule{0.05, std::nullopt});
    REQUIRE(reports.size() == 3);
    for (const auto& rep : reports) CHECK(rep.threshold == 50);  // 0.05 * 1000 records
  }
  SUBCASE("eval rows compare against the oracle per epoch") {
    auto rows = eval_epochs_1d(trace, cfg, ThresholdRule{std::nullopt, 120});
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      CHECK(row.threshold == 120);
      CHECK(row.acc.precision == 1.0);  // tiny trace, ample memory
      CHECK(row.acc.recall == 1.0);
    }
    auto avg = average_rows(rows);
    CHECK(avg.precision == 1.0);
    CHECK(avg.recall == 1.0);
  }
  SUBCASE("threshold rule validates exclusivity") {
    CHECK_THROWS_AS(run_epochs_1d(trace, cfg, ThresholdRule{0.1, uint64_t{5}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_epochs_1d(trace, cfg, ThresholdRule{}), std::invalid_argument);
  }
}
