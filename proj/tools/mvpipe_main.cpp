// Command-line harness: trace generation, HHH detection runs, oracle-backed
// evaluation, throughput benchmarks, and parameter sweeps.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvpipe/harness.hpp"
#include "mvpipe/widths.hpp"

using namespace mvpipe;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

HierarchySpec spec_by_name(const std::string& name) {
  if (name == "1d-byte") return make_spec(1, Granularity::Byte);
  if (name == "1d-bit") return make_spec(1, Granularity::Bit);
  if (name == "2d-byte") return make_spec(2, Granularity::Byte);
  if (name == "2d-bit") return make_spec(2, Granularity::Bit);
  throw UsageError("unknown --spec '" + name + "' (use 1d-byte|1d-bit|2d-byte|2d-bit)");
}

int default_ancestor_depth(const HierarchySpec& spec) {
  if (spec.step_bits == 1) return 8;  // bit hierarchies
  return spec.dims == 1 ? 2 : 4;
}

// flags shared by run/eval/bench/sweep
struct SketchOpts {
  std::string spec_name = "1d-byte";
  uint64_t memory_bytes = 0;
  std::vector<uint32_t> widths;
  int t = -1;
  std::string mode = "full";
  uint64_t seed = 1;

  void add_to(CLI::App* cmd, bool with_memory = true) {
    cmd->add_option("--spec", spec_name, "hierarchy: 1d-byte|1d-bit|2d-byte|2d-bit")
        ->capture_default_str();
    if (with_memory)
      cmd->add_option("--memory", memory_bytes, "memory budget in bytes");
    cmd->add_option("--widths", widths, "explicit per-array bucket counts (comma separated)")
        ->delimiter(',');
    cmd->add_option("--t", t, "ancestors checked per estimate (default per spec)");
    cmd->add_option("--mode", mode, "full|hw (hw: pipeline-stage-faithful updates, 1d-byte)")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "hash seed")->capture_default_str();
  }

  HierarchySpec spec() const { return spec_by_name(spec_name); }

  std::vector<uint32_t> resolve_widths(const HierarchySpec& spec) const {
    if ((memory_bytes != 0) == !widths.empty())
      throw UsageError("set exactly one of --memory / --widths");
    if (!widths.empty()) {
      if (widths.size() != spec.node_count)
        throw UsageError("--widths needs " + std::to_string(spec.node_count) + " entries for " +
                         spec_name);
      return widths;
    }
    return allocate_widths_bytes(memory_bytes, bucket_accounting_bytes(spec), spec);
  }

  SketchMode sketch_mode() const {
    if (mode == "full") return SketchMode::Full;
    if (mode == "hw") return SketchMode::HwFaithful;
    throw UsageError("unknown --mode '" + mode + "' (use full|hw)");
  }

  int ancestor_depth(const HierarchySpec& spec) const {
    return t >= 0 ? t : default_ancestor_depth(spec);
  }
};

struct ThresholdOpts {
  std::vector<double> phis;
  std::vector<uint64_t> thresholds;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--phi", phis, "fractional threshold(s) phi; absolute = phi * epoch total")
        ->delimiter(',');
    cmd->add_option("--threshold", thresholds, "absolute count threshold(s)")->delimiter(',');
  }

  std::vector<ThresholdRule> rules() const {
    if (phis.empty() == thresholds.empty())
      throw UsageError("set exactly one of --phi / --threshold");
    std::vector<ThresholdRule> out;
    for (double p : phis) out.push_back({p, std::nullopt});
    for (uint64_t t : thresholds) out.push_back({std::nullopt, t});
    return out;
  }

  ThresholdRule single_rule() const {
    auto r = rules();
    if (r.size() != 1) throw UsageError("this command takes exactly one --phi/--threshold");
    return r[0];
  }
};

Trace load_trace(const std::string& path, uint64_t epoch_len) {
  if (path.empty()) throw UsageError("--trace is required");
  Trace t = read_trace_auto(path);
  if (epoch_len > 0) t = split_epochs(std::move(t), epoch_len);
  return t;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << body;
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Expands "--config FILE" into the flags named by the file's flat key=value
// lines ('#' comments and blank lines skipped).
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) {
      path = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      args.push_back(std::move(a));
      continue;
    }
    std::ifstream in(path);
    if (!in) throw UsageError("--config " + path + ": cannot open");
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const size_t eq = line.find('=');
      if (eq == std::string::npos || eq == 0)
        throw UsageError("--config " + path + ":" + std::to_string(lineno) +
                         ": expected key=value");
      args.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
    }
  }
  return args;
}

// ---- gen ----

struct GenOpts {
  uint64_t n = 0;
  double alpha = 1.0;
  uint64_t universe = 100000;
  uint64_t topk = 1000;
  double fraction = 0.54;
  uint64_t seed = 1;
  uint64_t epoch_len = 0;
  std::string out;
  std::string format = "packed";
};

int cmd_gen(const std::string& kind, const GenOpts& g) {
  if (g.out.empty()) throw UsageError("--out is required");
  Trace t = kind == "zipf" ? gen_zipf(g.n, g.alpha, g.universe, g.seed)
                           : gen_skew_controlled(g.n, g.topk, g.fraction, g.seed);
  if (g.epoch_len > 0) t = split_epochs(std::move(t), g.epoch_len);
  const TraceFormat fmt = g.format == "csv" ? TraceFormat::Csv : TraceFormat::Packed;
  write_trace(g.out, t, fmt);
  std::printf("wrote %zu records (%zu epochs) to %s\n", t.records.size(), t.epoch_count(),
              g.out.c_str());
  return 0;
}

// ---- run ----

int cmd_run(const std::string& trace_path, uint64_t epoch_len, const SketchOpts& s,
            const ThresholdOpts& th, const std::string& out_prefix, const std::string& format) {
  if (out_prefix.empty()) throw UsageError("--out is required");
  if (format != "json" && format != "csv") throw UsageError("--format must be json|csv");
  const Trace trace = load_trace(trace_path, epoch_len);
  const HierarchySpec spec = s.spec();
  const ThresholdRule rule = th.single_rule();

  std::vector<HHHReport> reports;
  if (spec.dims == 1) {
    Sketch1DConfig cfg{spec, s.resolve_widths(spec), s.seed, s.ancestor_depth(spec),
                       s.sketch_mode()};
    reports = run_epochs_1d(trace, cfg, rule);
  } else {
    if (s.sketch_mode() != SketchMode::Full) throw UsageError("--mode hw is 1d-byte only");
    Sketch2DConfig cfg{spec, s.resolve_widths(spec), s.seed, s.ancestor_depth(spec)};
    reports = run_epochs_2d(trace, cfg, rule);
  }

  std::string stats = "[\n";
  for (size_t e = 0; e < reports.size(); ++e) {
    const std::string path =
        out_prefix + ".epoch" + std::to_string(e) + (format == "json" ? ".json" : ".csv");
    write_file(path, format == "json" ? report_json(reports[e]) : report_csv(reports[e]));
    stats += report_stats_json(reports[e]);
    if (e + 1 < reports.size()) stats += ",";
    std::printf("epoch %zu: %zu HHHs (threshold %llu) -> %s\n", e, reports[e].entries.size(),
                (unsigned long long)reports[e].threshold, path.c_str());
  }
  stats += "]\n";
  write_file(out_prefix + ".stats.json", stats);
  return 0;
}

// ---- eval ----

std::string eval_csv_header() {
  return "epoch,threshold,memory_bytes,mode,precision,recall,relative_error,tp,fp,fn,true_hhhs,"
         "mean_traversed\n";
}

std::string eval_csv_row(const std::string& epoch, uint64_t threshold, uint64_t memory,
                         const std::string& mode, const AccuracyResult& a, uint64_t true_hhhs,
                         double mean_traversed) {
  return epoch + "," + std::to_string(threshold) + "," + std::to_string(memory) + "," + mode +
         "," + fmt_double(a.precision) + "," + fmt_double(a.recall) + "," +
         fmt_double(a.relative_error) + "," + std::to_string(a.tp) + "," + std::to_string(a.fp) +
         "," + std::to_string(a.fn) + "," + std::to_string(true_hhhs) + "," +
         fmt_double(mean_traversed) + "\n";
}

std::vector<EvalRow> eval_any(const Trace& trace, const HierarchySpec& spec, const SketchOpts& s,
                              const ThresholdRule& rule) {
  if (spec.dims == 1) {
    Sketch1DConfig cfg{spec, s.resolve_widths(spec), s.seed, s.ancestor_depth(spec),
                       s.sketch_mode()};
    return eval_epochs_1d(trace, cfg, rule);
  }
  if (s.sketch_mode() != SketchMode::Full) throw UsageError("--mode hw is 1d-byte only");
  Sketch2DConfig cfg{spec, s.resolve_widths(spec), s.seed, s.ancestor_depth(spec)};
  return eval_epochs_2d(trace, cfg, rule);
}

int cmd_eval(const std::string& trace_path, uint64_t epoch_len, const SketchOpts& s,
             const ThresholdOpts& th, const std::string& out_path,
             const std::string& truth_prefix) {
  const Trace trace = load_trace(trace_path, epoch_len);
  const HierarchySpec spec = s.spec();

  std::string csv = eval_csv_header();
  for (const ThresholdRule& rule : th.rules()) {
    const auto rows = eval_any(trace, spec, s, rule);
    for (const auto& row : rows)
      csv += eval_csv_row(std::to_string(row.epoch), row.threshold, s.memory_bytes, s.mode,
                          row.acc, row.true_hhhs, row.mean_traversed);
    const auto avg = average_rows(rows);
    uint64_t thr_label = rows.empty() ? 0 : rows[0].threshold;
    uint64_t truths = 0;
    double mean_tr = 0;
    for (const auto& row : rows) {
      truths += row.true_hhhs;
      mean_tr += row.mean_traversed;
    }
    if (!rows.empty()) mean_tr /= double(rows.size());
    csv += eval_csv_row("avg", thr_label, s.memory_bytes, s.mode, avg, truths, mean_tr);

    if (!truth_prefix.empty()) {
      for (size_t e = 0; e < trace.epoch_count(); ++e) {
        uint64_t total = 0;
        for (const auto& r : trace.epoch(e)) total += r.value;
        const uint64_t thr = rule.resolve(total);
        const GroundTruth truth = exact_hhh(trace.epoch(e), spec, thr);
        write_file(truth_prefix + ".t" + std::to_string(thr) + ".epoch" + std::to_string(e) +
                       ".csv",
                   truth_csv(truth));
      }
    }
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(out_path, csv);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

// ---- bench ----

int cmd_bench(const std::string& trace_path, const SketchOpts& s, int reps,
              const std::string& out_path) {
  const Trace trace = load_trace(trace_path, 0);
  const HierarchySpec spec = s.spec();
  if (spec.dims != 1) throw UsageError("bench covers the 1D sketches");
  Sketch1DConfig cfg{spec, s.resolve_widths(spec), s.seed, s.ancestor_depth(spec),
                     s.sketch_mode()};
  const auto r = throughput(cfg, trace.records, reps);
  std::string csv =
      "spec,mode,records,reps,mups_median,mups_min,mups_max,detect_seconds,mean_traversed\n";
  if (!r.valid) {
    csv += s.spec_name + "," + s.mode + ",0," + std::to_string(reps) + ",n/a,n/a,n/a,n/a,n/a\n";
  } else {
    csv += s.spec_name + "," + s.mode + "," + std::to_string(trace.records.size()) + "," +
           std::to_string(reps) + "," + fmt_double(r.median() / 1e6) + "," +
           fmt_double(r.min() / 1e6) + "," + fmt_double(r.max() / 1e6) + "," +
           fmt_double(r.detect_seconds) + "," + fmt_double(r.mean_traversed) + "\n";
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(out_path, csv);
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

// ---- sweep ----

struct SweepOpts {
  std::string trace_path;
  std::vector<uint64_t> memories;
  std::vector<uint64_t> epoch_lens;
  // skew-point generation (instead of --trace)
  std::vector<double> fractions;
  uint64_t gen_n = 0;
  uint64_t gen_topk = 1000;
  uint64_t gen_seed = 1;
  bool with_throughput = false;
  int reps = 3;
  std::string out;
};

int cmd_sweep(const SweepOpts& sw, const SketchOpts& s, const ThresholdOpts& th) {
  const HierarchySpec spec = s.spec();
  if (!s.widths.empty()) throw UsageError("sweep varies --memory; --widths is not supported here");
  if (sw.trace_path.empty() == sw.fractions.empty())
    throw UsageError("set exactly one of --trace / --fraction (with --gen-n)");
  if (!sw.fractions.empty() && sw.gen_n == 0)
    throw UsageError("--fraction sweeps need --gen-n (and optionally --gen-topk, --gen-seed)");
  std::vector<uint64_t> memories = sw.memories;
  if (memories.empty()) {
    if (s.memory_bytes == 0) throw UsageError("--memory is required");
    memories.push_back(s.memory_bytes);
  }
  const auto epoch_lens = sw.epoch_lens.empty() ? std::vector<uint64_t>{0} : sw.epoch_lens;
  const auto rules = th.rules();

  std::string csv =
      "fraction,memory_bytes,threshold,epoch_len,mode,epochs,precision,recall,relative_error,"
      "mean_traversed";
  if (sw.with_throughput) csv += ",mups_median";
  csv += "\n";

  struct Point {
    double fraction;
    Trace trace;
  };
  std::vector<Point> points;
  if (!sw.trace_path.empty()) {
    points.push_back({0.0, read_trace_auto(sw.trace_path)});
  } else {
    for (double f : sw.fractions)
      points.push_back({f, gen_skew_controlled(sw.gen_n, sw.gen_topk, f, sw.gen_seed)});
  }

  for (const auto& point : points) {
    for (uint64_t epoch_len : epoch_lens) {
      Trace trace = point.trace;
      if (epoch_len > 0) trace = split_epochs(std::move(trace), epoch_len);
      for (uint64_t mem : memories) {
        SketchOpts cell = s;
        cell.memory_bytes = mem;
        cell.widths.clear();
        for (const auto& rule : rules) {
          const auto rows = eval_any(trace, spec, cell, rule);
          const auto avg = average_rows(rows);
          double mean_tr = 0;
          for (const auto& row : rows) mean_tr += row.mean_traversed;
          if (!rows.empty()) mean_tr /= double(rows.size());
          csv += fmt_double(point.fraction) + "," + std::to_string(mem) + "," +
                 std::to_string(rows.empty() ? 0 : rows[0].threshold) + "," +
                 std::to_string(epoch_len) + "," + s.mode + "," + std::to_string(rows.size()) +
                 "," + fmt_double(avg.precision) + "," + fmt_double(avg.recall) + "," +
                 fmt_double(avg.relative_error) + "," + fmt_double(mean_tr);
          if (sw.with_throughput) {
            if (spec.dims != 1) throw UsageError("--with-throughput covers the 1D sketches");
            Sketch1DConfig cfg{spec, cell.resolve_widths(spec), cell.seed,
                               cell.ancestor_depth(spec), cell.sketch_mode()};
            const auto r = throughput(cfg, trace.records, sw.reps);
            csv += "," + (r.valid ? fmt_double(r.median() / 1e6) : std::string("n/a"));
          }
          csv += "\n";
        }
      }
    }
  }
  if (sw.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file(sw.out, csv);
    std::printf("wrote %s\n", sw.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mvpipe: invertible-sketch hierarchical heavy hitter detection"};
  app.require_subcommand(1);
  app.footer("Any subcommand accepts --config FILE with flat key=value lines standing in for flags.");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic trace");
  gen->require_subcommand(1);
  GenOpts g;
  auto add_gen_common = [&](CLI::App* cmd) {
    cmd->add_option("--n", g.n, "record count")->required();
    cmd->add_option("--seed", g.seed, "generator seed")->capture_default_str();
    cmd->add_option("--epoch-len", g.epoch_len, "records per epoch (0: single epoch)");
    cmd->add_option("--out", g.out, "output trace path")->required();
    cmd->add_option("--format", g.format, "packed|csv")->capture_default_str();
  };
  auto* gen_zipf_cmd = gen->add_subcommand("zipf", "Zipf-distributed flow sizes");
  add_gen_common(gen_zipf_cmd);
  gen_zipf_cmd->add_option("--alpha", g.alpha, "Zipf exponent")->capture_default_str();
  gen_zipf_cmd->add_option("--universe", g.universe, "distinct flow count")->capture_default_str();
  auto* gen_skew_cmd =
      gen->add_subcommand("skew", "top-k flows own an exact fraction of the records");
  add_gen_common(gen_skew_cmd);
  gen_skew_cmd->add_option("--topk", g.topk, "designated heavy flow count")->capture_default_str();
  gen_skew_cmd->add_option("--fraction", g.fraction, "heavy record share in (0,1)")
      ->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "detect HHHs per epoch and write report files");
  SketchOpts run_s;
  ThresholdOpts run_th;
  std::string run_trace, run_out, run_format = "json";
  uint64_t run_epoch_len = 0;
  run->add_option("--trace", run_trace, "input trace (packed or csv)")->required();
  run->add_option("--epoch-len", run_epoch_len, "records per epoch (overrides embedded bounds)");
  run_s.add_to(run);
  run_th.add_to(run);
  run->add_option("--out", run_out, "output prefix for report files")->required();
  run->add_option("--format", run_format, "json|csv")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "run the sketch against the exact oracle");
  SketchOpts eval_s;
  ThresholdOpts eval_th;
  std::string eval_trace, eval_out, eval_truth;
  uint64_t eval_epoch_len = 0;
  eval->add_option("--trace", eval_trace, "input trace")->required();
  eval->add_option("--epoch-len", eval_epoch_len, "records per epoch");
  eval_s.add_to(eval);
  eval_th.add_to(eval);
  eval->add_option("--out", eval_out, "metrics CSV path (default: stdout)");
  eval->add_option("--truth-out", eval_truth, "also export ground truth CSVs with this prefix");

  // bench
  auto* bench = app.add_subcommand("bench", "update throughput on an in-memory trace");
  SketchOpts bench_s;
  std::string bench_trace, bench_out;
  int bench_reps = 3;
  bench->add_option("--trace", bench_trace, "input trace")->required();
  bench_s.add_to(bench);
  bench->add_option("--reps", bench_reps, "timed repetitions")->capture_default_str();
  bench->add_option("--out", bench_out, "CSV path (default: stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid of eval points over memory/threshold/epochs");
  SketchOpts sweep_s;
  ThresholdOpts sweep_th;
  SweepOpts sw;
  sweep->add_option("--trace", sw.trace_path, "input trace (alternative to --fraction)");
  sweep->add_option("--memory", sw.memories, "memory budgets in bytes")->delimiter(',');
  sweep->add_option("--epoch-len", sw.epoch_lens, "records-per-epoch values")->delimiter(',');
  sweep->add_option("--fraction", sw.fractions, "skew fractions (generates traces)")
      ->delimiter(',');
  sweep->add_option("--gen-n", sw.gen_n, "records per generated trace");
  sweep->add_option("--gen-topk", sw.gen_topk, "heavy flows per generated trace")
      ->capture_default_str();
  sweep->add_option("--gen-seed", sw.gen_seed, "generator seed")->capture_default_str();
  sweep->add_flag("--with-throughput", sw.with_throughput, "add a timed mups column (1D only)");
  sweep->add_option("--reps", sw.reps, "timed repetitions for --with-throughput")
      ->capture_default_str();
  sweep_s.add_to(sweep, /*with_memory=*/false);
  sweep_th.add_to(sweep);
  sweep->add_option("--out", sw.out, "CSV path (default: stdout)");

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11's vector overload pops from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen_zipf_cmd->parsed()) return cmd_gen("zipf", g);
    if (gen_skew_cmd->parsed()) return cmd_gen("skew", g);
    if (run->parsed()) return cmd_run(run_trace, run_epoch_len, run_s, run_th, run_out, run_format);
    if (eval->parsed())
      return cmd_eval(eval_trace, eval_epoch_len, eval_s, eval_th, eval_out, eval_truth);
    if (bench->parsed()) return cmd_bench(bench_trace, bench_s, bench_reps, bench_out);
    if (sweep->parsed()) return cmd_sweep(sw, sweep_s, sweep_th);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
