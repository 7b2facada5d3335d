// Acceptance suite: one test case per criterion, one PASS/FAIL line each.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sys/wait.h>
#include <unordered_map>

#include "mvpipe/harness.hpp"
#include "mvpipe/widths.hpp"

using namespace mvpipe;

namespace {

const HierarchySpec kByte1 = make_spec(1, Granularity::Byte);
const HierarchySpec kBit1 = make_spec(1, Granularity::Bit);

void verdict(int criterion, const char* what, bool ok) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what);
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", criterion, " failed: ", what);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

std::vector<Key> enumerate_keys(const HierarchySpec& spec) {
  std::vector<Key> keys;
  for (int node = 0; node < spec.node_count; ++node) {
    const Coordinate c = coord_at(spec, node);
    const int sbits = int(c.src) * spec.step_bits;
    const int dbits = int(c.dst) * spec.step_bits;
    const uint32_t ns = uint32_t(1) << (spec.addr_bits - sbits);
    const uint32_t nd = spec.dims == 2 ? uint32_t(1) << (spec.addr_bits - dbits) : 1;
    for (uint32_t a = 0; a < ns; ++a)
      for (uint32_t b = 0; b < nd; ++b)
        keys.push_back(Key{a << sbits, spec.dims == 2 ? (b << dbits) : 0, c});
  }
  return keys;
}

// mixed toy workload: a few dominant flows over a uniform tail
Trace random_toy_trace(const HierarchySpec& spec, std::mt19937_64& rng, int n) {
  Trace t;
  const int heavies = 2 + int(rng() % 4);
  std::vector<PacketRecord> heavy_ids;
  for (int h = 0; h < heavies; ++h)
    heavy_ids.push_back({uint32_t(rng() % 16), spec.dims == 2 ? uint32_t(rng() % 16) : 0, 1});
  for (int i = 0; i < n; ++i) {
    PacketRecord r;
    if (rng() % 100 < 40) {
      r = heavy_ids[rng() % heavy_ids.size()];
    } else {
      r.src = uint32_t(rng() % 16);
      r.dst = spec.dims == 2 ? uint32_t(rng() % 16) : 0;
    }
    r.value = uint32_t(1 + rng() % 3);
    t.records.push_back(r);
  }
  return t;
}

struct SharedTraces {
  Trace skew5m = gen_skew_controlled(5000000, 300, 0.80, 1001);  // criteria 5, 8
  Trace zipf54 = gen_zipf(5000000, 0.9, 40000, 1234);            // criteria 6, 11
};

SharedTraces& shared() {
  static SharedTraces t;
  return t;
}

Sketch1DConfig accuracy_config(SketchMode mode) {
  return {kByte1, allocate_widths_bytes(262144, 16, kByte1), 4242, 2, mode};
}

}  // namespace

TEST_CASE("criterion 1: bucket-level majority vote equals the reference") {
  // all insertion sequences of length <= 8 over a 3-key alphabet
  bool ok = true;
  for (int len = 1; len <= 8 && ok; ++len) {
    const int total = [&] {
      int p = 1;
      for (int i = 0; i < len; ++i) p *= 3;
      return p;
    }();
    for (int code = 0; code < total && ok; ++code) {
      Bucket b;
      uint32_t ref_candidate = 0;
      int ref_counter = 0;
      uint64_t counts[3] = {0, 0, 0};
      int c = code;
      for (int i = 0; i < len; ++i) {
        const uint32_t key = uint32_t(c % 3) + 1;
        c /= 3;
        counts[key - 1] += 1;
        uint32_t es, ed;
        uint64_t ev;
        bucket_insert(b, key, 0, 1, es, ed, ev);
        if (ref_counter == 0) {
          ref_candidate = key;
          ref_counter = 1;
        } else if (ref_candidate == key) {
          ++ref_counter;
        } else {
          --ref_counter;
        }
      }
      ok = ok && b.key_src == ref_candidate && b.indicator == ref_counter &&
           b.total == uint64_t(len);
      // the majority guarantee itself
      for (int k = 0; k < 3; ++k)
        if (2 * counts[k] > uint64_t(len)) ok = ok && b.key_src == uint32_t(k + 1);
    }
  }
  verdict(1, "exhaustive MJRTY equivalence (3-key alphabet, length <= 8)", ok);
}

TEST_CASE("criterion 2: per-bucket count bounds hold under shadow replay") {
  bool ok = true;
  std::string why;
  for (uint64_t seed = 100; seed < 120 && ok; ++seed) {
    auto trace = gen_zipf(10000, 1.0, 2000, seed);
    Sketch1DConfig cfg{kByte1, std::vector<uint32_t>(5, 64), seed, 2, SketchMode::Full};
    Sketch1D sketch(cfg);
    ShadowTracker tracker(sketch);
    size_t next = 0;
    for (int checkpoint = 1; checkpoint <= 10 && ok; ++checkpoint) {
      const size_t until = trace.records.size() * size_t(checkpoint) / 10;
      for (; next < until; ++next) sketch.update(trace.records[next].src, trace.records[next].value);
      if (auto viol = check_mjrty_bounds(sketch, tracker)) {
        ok = false;
        why = *viol;
      }
    }
    if (ok) {
      if (auto viol = check_estimate_upper_bound(sketch, tracker)) {
        ok = false;
        why = *viol;
      }
    }
  }
  verdict(2, "zero bound violations on 20 seeded traces x 10 checkpoints", ok);
  if (!ok) MESSAGE(why);
}

namespace {

struct CoverageOutcome {
  bool covered = true;
  bool overestimate_only = true;  // 1D runs feed criterion 4
};

CoverageOutcome toy_coverage(const HierarchySpec& spec) {
  CoverageOutcome out;
  std::mt19937_64 rng(2026);
  const auto keys = enumerate_keys(spec);
  const std::vector<uint32_t> widths(size_t(spec.node_count), 4);
  for (int trial = 0; trial < 100; ++trial) {
    auto trace = random_toy_trace(spec, rng, 1000);
    uint64_t total = 0;
    for (const auto& r : trace.records) total += r.value;
    const uint64_t threshold = resolve_threshold(0.05, total);

    HHHReport report;
    if (spec.dims == 1) {
      Sketch1D sk({spec, widths, uint64_t(trial) + 7, 2, SketchMode::Full});
      for (const auto& r : trace.records) sk.update(r.src, r.value);
      report = sk.detect(threshold);
    } else {
      Sketch2D sk({spec, widths, uint64_t(trial) + 7, 4});
      for (const auto& r : trace.records) sk.update(r.src, r.dst, r.value);
      report = sk.detect(threshold);
    }

    std::vector<Key> reported;
    for (const auto& e : report.entries) reported.push_back(e.key);
    for (const Key& k : keys) {
      if (report.contains(k)) continue;
      if (conditioned_count(spec, k, reported, trace.records) >= threshold) out.covered = false;
    }
    if (spec.dims == 1) {
      const GroundTruth truth = exact_hhh(trace.records, spec, threshold);
      for (const auto& e : report.entries)
        if (const TruthEntry* te = truth.find(e.key))
          if (e.estimate < te->exact) out.overestimate_only = false;
    }
  }
  return out;
}

}  // namespace

static CoverageOutcome g_cov_1d;

TEST_CASE("criterion 3: coverage on the toy hierarchies") {
  g_cov_1d = toy_coverage(make_toy_spec(1));
  const auto cov2d = toy_coverage(make_toy_spec(2));
  verdict(3, "every non-reported key conditions below phi*S (100 traces, 1D and 2D)",
          g_cov_1d.covered && cov2d.covered);
}

TEST_CASE("criterion 4: reported true HHHs never underestimate (1D)") {
  verdict(4, "S_hat(x) >= S(x) for every reported true HHH in the criterion-3 1D runs",
          g_cov_1d.overestimate_only);
}

TEST_CASE("criterion 5: accuracy at desk scale") {
  const Trace& trace = shared().skew5m;
  bool ok = true;
  for (uint64_t threshold : {uint64_t(8000), uint64_t(9000)}) {
    const GroundTruth truth = exact_hhh(trace.records, kByte1, threshold);
    ok = ok && truth.entries.size() >= 200 && truth.entries.size() <= 1000;
    Sketch1D sk(accuracy_config(SketchMode::Full));
    for (const auto& r : trace.records) sk.update(r.src, r.value);
    const HHHReport report = sk.detect(threshold);
    const AccuracyResult acc = accuracy(report, truth);
    const double med = median_of(per_key_relative_errors(report, truth));
    std::printf("  threshold %llu: truth=%zu precision=%.4f recall=%.4f median_rel_err=%.4f\n",
                (unsigned long long)threshold, truth.entries.size(), acc.precision, acc.recall,
                med);
    ok = ok && acc.precision >= 0.90 && acc.recall >= 0.90 && med <= 0.05;
  }
  verdict(5, "5M-record skew trace at 256 KiB: precision/recall >= 0.90, median error <= 0.05",
          ok);
}

TEST_CASE("criterion 6: traversal depth tracks workload skew") {
  const Trace& skew54 = shared().zipf54;
  // confirm the trace deserves its 54% label
  std::unordered_map<uint64_t, uint64_t> counts;
  for (const auto& r : skew54.records) counts[(uint64_t(r.src) << 32) | r.dst] += 1;
  std::vector<uint64_t> sizes;
  sizes.reserve(counts.size());
  for (auto& [k, v] : counts) sizes.push_back(v);
  std::sort(sizes.rbegin(), sizes.rend());
  uint64_t top1000 = 0;
  for (size_t i = 0; i < 1000 && i < sizes.size(); ++i) top1000 += sizes[i];
  const double share = double(top1000) / double(skew54.records.size());

  Sketch1D sk(accuracy_config(SketchMode::Full));
  for (const auto& r : skew54.records) sk.update(r.src, r.value);
  const auto& hist = sk.traversal_stats();
  uint64_t updates = 0, nodes = 0;
  for (size_t k = 0; k < hist.size(); ++k) {
    updates += hist[k];
    nodes += hist[k] * k;
  }
  const double one_node = double(hist[1]) / double(updates);
  const double mean54 = double(nodes) / double(updates);

  Sketch1D sk10(accuracy_config(SketchMode::Full));
  const Trace skew10 = gen_skew_controlled(5000000, 1000, 0.10, 1234);
  for (const auto& r : skew10.records) sk10.update(r.src, r.value);
  const auto& hist10 = sk10.traversal_stats();
  uint64_t updates10 = 0, nodes10 = 0;
  for (size_t k = 0; k < hist10.size(); ++k) {
    updates10 += hist10[k];
    nodes10 += hist10[k] * k;
  }
  const double mean10 = double(nodes10) / double(updates10);

  std::printf("  top-1000 share=%.4f one-node=%.4f mean54=%.4f mean10=%.4f\n", share, one_node,
              mean54, mean10);
  verdict(6, "54%-skew: >= 60% one-node updates, mean <= 2.0; 10%-skew mean strictly larger",
          share >= 0.50 && share <= 0.58 && one_node >= 0.60 && mean54 <= 2.0 &&
              mean10 > mean54);
}

TEST_CASE("criterion 7: convergence across epoch sizes") {
  bool ok = true;
  for (uint64_t epoch : {uint64_t(500000), uint64_t(1000000), uint64_t(5000000)}) {
    Trace trace = split_epochs(gen_skew_controlled(2 * epoch, 40, 0.54, 2002), epoch);
    const auto rows =
        eval_epochs_1d(trace, accuracy_config(SketchMode::Full), ThresholdRule{0.01, std::nullopt});
    for (const auto& row : rows) {
      std::printf("  epoch_len %llu epoch %zu: precision=%.4f recall=%.4f\n",
                  (unsigned long long)epoch, row.epoch, row.acc.precision, row.acc.recall);
      ok = ok && row.acc.precision >= 0.95 && row.acc.recall >= 0.95;
    }
  }
  verdict(7, "precision and recall >= 0.95 at epoch sizes 0.5M, 1M, 5M", ok);
}

TEST_CASE("criterion 8: pipeline-stage-faithful mode stays close to full mode") {
  const Trace& trace = shared().skew5m;
  const uint64_t threshold = 8000;
  const GroundTruth truth = exact_hhh(trace.records, kByte1, threshold);
  AccuracyResult acc[2];
  int i = 0;
  for (SketchMode mode : {SketchMode::Full, SketchMode::HwFaithful}) {
    Sketch1D sk(accuracy_config(mode));
    for (const auto& r : trace.records) sk.update(r.src, r.value);
    acc[i++] = accuracy(sk.detect(threshold), truth);
  }
  const double dp = std::abs(acc[0].precision - acc[1].precision);
  const double dr = std::abs(acc[0].recall - acc[1].recall);
  std::printf("  |precision_full - precision_hw| = %.4f, |recall_full - recall_hw| = %.4f\n", dp,
              dr);
  verdict(8, "full-vs-hw precision and recall within 0.05 on the criterion-5 workload",
          dp <= 0.05 && dr <= 0.05);
}

TEST_CASE("criterion 9: identical flags give byte-identical report files") {
  const char* cli = std::getenv("MVPIPE_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "MVPIPE_CLI must point at the CLI binary");
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mvpipe_acceptance";
  fs::create_directories(dir);
  const std::string trace = (dir / "det.mvpt").string();
  auto shell = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  bool ok = shell("gen skew --n 200000 --topk 50 --fraction 0.6 --seed 77 --epoch-len 100000 "
                  "--out " + trace);
  const std::string flags =
      " --trace " + trace + " --spec 1d-byte --memory 65536 --phi 0.005 --seed 3 --out ";
  ok = ok && shell("run" + flags + (dir / "d1").string());
  ok = ok && shell("run" + flags + (dir / "d2").string());
  for (const char* f : {".epoch0.json", ".epoch1.json", ".stats.json"}) {
    const auto a = slurp(dir / ("d1" + std::string(f)));
    ok = ok && !a.empty() && a == slurp(dir / ("d2" + std::string(f)));
  }
  verdict(9, "cmd_run twice produces byte-identical per-epoch reports", ok);
}

TEST_CASE("criterion 10: width allocation walks the budget top-down") {
  const auto w = allocate_widths(16384, kByte1);
  verdict(10, "16384 buckets over 1D-byte -> [5377, 5375, 5375, 256, 1]",
          w == std::vector<uint32_t>{5377, 5375, 5375, 256, 1});
}

TEST_CASE("criterion 11: throughput floor and byte-over-bit ordering") {
  const Trace& trace = shared().zipf54;
  const auto byte_result = throughput(accuracy_config(SketchMode::Full), trace.records, 3);
  Sketch1DConfig bit_cfg{kBit1, allocate_widths_bytes(1048576, 16, kBit1), 4242, 8,
                         SketchMode::Full};
  const auto bit_result = throughput(bit_cfg, trace.records, 3);
  std::printf("  1d-byte median = %.2f Mups, 1d-bit median = %.2f Mups\n",
              byte_result.median() / 1e6, bit_result.median() / 1e6);
  verdict(11, "1D-byte sustains >= 5M updates/s and strictly beats 1D-bit",
          byte_result.valid && bit_result.valid && byte_result.median() >= 5e6 &&
              byte_result.median() > bit_result.median());
}
