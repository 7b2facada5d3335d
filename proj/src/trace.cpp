#include "mvpipe/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "mvpipe/hashing.hpp"

namespace mvpipe {

namespace {

constexpr char kMagic[4] = {'M', 'V', 'P', 'T'};
constexpr uint8_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

struct ByteReader {
  const char* p;
  const char* end;
  std::string path;

  size_t offset(const char* base) const { return size_t(p - base); }
  void need(size_t n, const char* base, const char* what) {
    if (size_t(end - p) < n)
      throw TraceParseError(path + ": truncated packed trace at byte offset " +
                            std::to_string(offset(base)) + " while reading " + what);
  }
  uint32_t u32(const char* base, const char* what) {
    need(4, base, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(p[i])) << (8 * i);
    p += 4;
    return v;
  }
  uint64_t u64(const char* base, const char* what) {
    need(8, base, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(p[i])) << (8 * i);
    p += 8;
    return v;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceParseError(path + ": cannot open");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

uint32_t parse_addr(const std::string& path, size_t line, const std::string& field) {
  unsigned a0, a1, a2, a3;
  char tail;
  if (std::sscanf(field.c_str(), "%u.%u.%u.%u%c", &a0, &a1, &a2, &a3, &tail) != 4 ||
      a0 > 255 || a1 > 255 || a2 > 255 || a3 > 255)
    throw TraceParseError(path + ":" + std::to_string(line) + ": bad address '" + field + "'");
  return (a0 << 24) | (a1 << 16) | (a2 << 8) | a3;
}

Trace read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceParseError(path + ": cannot open");
  Trace t;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "src,dst,value") continue;
    size_t c1 = line.find(',');
    size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw TraceParseError(path + ":" + std::to_string(lineno) + ": expected src,dst,value");
    PacketRecord r;
    r.src = parse_addr(path, lineno, line.substr(0, c1));
    r.dst = parse_addr(path, lineno, line.substr(c1 + 1, c2 - c1 - 1));
    unsigned long long v = 0;
    try {
      v = std::stoull(line.substr(c2 + 1));
    } catch (...) {
      throw TraceParseError(path + ":" + std::to_string(lineno) + ": bad value field");
    }
    if (v == 0 || v > UINT32_MAX)
      throw TraceParseError(path + ":" + std::to_string(lineno) + ": value out of range [1, 2^32)");
    r.value = uint32_t(v);
    t.records.push_back(r);
  }
  return t;
}

Trace read_packed(const std::string& path) {
  std::string data = slurp(path);
  ByteReader rd{data.data(), data.data() + data.size(), path};
  const char* base = data.data();
  rd.need(5, base, "header");
  if (std::memcmp(rd.p, kMagic, 4) != 0)
    throw TraceParseError(path + ": bad magic, not a packed trace");
  rd.p += 4;
  uint8_t version = uint8_t(*rd.p++);
  if (version != kVersion)
    throw TraceParseError(path + ": unsupported packed trace version " + std::to_string(version));
  Trace t;
  const uint64_t count = rd.u64(base, "record count");
  const uint32_t nb = rd.u32(base, "boundary count");
  t.boundaries.reserve(nb);
  for (uint32_t i = 0; i < nb; ++i) {
    const uint64_t b = rd.u64(base, "boundary");
    if (b == 0 || b >= count || (!t.boundaries.empty() && b <= t.boundaries.back()))
      throw TraceParseError(path + ": epoch boundaries must be strictly increasing interior indices");
    t.boundaries.push_back(b);
  }
  t.records.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    PacketRecord r;
    r.src = rd.u32(base, "record src");
    r.dst = rd.u32(base, "record dst");
    r.value = rd.u32(base, "record value");
    if (r.value == 0)
      throw TraceParseError(path + ": record " + std::to_string(i) + " has zero value");
    t.records.push_back(r);
  }
  return t;
}

std::string ip_string(uint32_t a) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (a >> 24) & 255, (a >> 16) & 255,
                (a >> 8) & 255, a & 255);
  return buf;
}

// Fixed pseudo-random (src, dst) pair per flow id; distinct ids always map
// to distinct pairs (mix64 is bijective).
PacketRecord flow_identity(uint64_t stream_seed, uint64_t flow_id) {
  uint64_t pair = mix64(stream_seed + flow_id * 0x9e3779b97f4a7c15ULL);
  return PacketRecord{uint32_t(pair >> 32), uint32_t(pair), 1};
}

double canonical(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::pair<size_t, size_t> Trace::epoch_span(size_t epoch) const {
  size_t begin = epoch == 0 ? 0 : size_t(boundaries[epoch - 1]);
  size_t end = epoch < boundaries.size() ? size_t(boundaries[epoch]) : records.size();
  return {begin, end};
}

std::span<const PacketRecord> Trace::epoch(size_t epoch) const {
  auto [b, e] = epoch_span(epoch);
  return std::span<const PacketRecord>(records.data() + b, e - b);
}

Trace read_trace(const std::string& path, TraceFormat format) {
  return format == TraceFormat::Csv ? read_csv(path) : read_packed(path);
}

Trace read_trace_auto(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceParseError(path + ": cannot open");
  char head[4] = {0, 0, 0, 0};
  in.read(head, 4);
  in.close();
  bool packed = std::memcmp(head, kMagic, 4) == 0;
  return read_trace(path, packed ? TraceFormat::Packed : TraceFormat::Csv);
}

void write_trace(const std::string& path, const Trace& trace, TraceFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  if (format == TraceFormat::Csv) {
    out << "src,dst,value\n";
    for (const auto& r : trace.records)
      out << ip_string(r.src) << ',' << ip_string(r.dst) << ',' << r.value << '\n';
  } else {
    std::string buf;
    buf.reserve(17 + trace.boundaries.size() * 8 + trace.records.size() * 12);
    buf.append(kMagic, 4);
    buf.push_back(char(kVersion));
    put_u64(buf, trace.records.size());
    put_u32(buf, uint32_t(trace.boundaries.size()));
    for (uint64_t b : trace.boundaries) put_u64(buf, b);
    for (const auto& r : trace.records) {
      put_u32(buf, r.src);
      put_u32(buf, r.dst);
      put_u32(buf, r.value);
    }
    out.write(buf.data(), std::streamsize(buf.size()));
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

Trace gen_zipf(uint64_t n, double alpha, uint64_t universe_size, uint64_t seed) {
  if (alpha <= 0) throw std::invalid_argument("gen_zipf: alpha must be > 0");
  if (universe_size == 0) throw std::invalid_argument("gen_zipf: empty universe");
  std::vector<double> cdf(universe_size);
  double acc = 0;
  for (uint64_t i = 0; i < universe_size; ++i) {
    acc += std::pow(double(i + 1), -alpha);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;

  const uint64_t ids_seed = derive_seed(seed, 1);
  std::mt19937_64 rng(derive_seed(seed, 2));
  Trace t;
  t.records.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    double u = canonical(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    uint64_t flow = uint64_t(it - cdf.begin());
    if (flow >= universe_size) flow = universe_size - 1;
    t.records.push_back(flow_identity(ids_seed, flow));
  }
  return t;
}

Trace gen_skew_controlled(uint64_t n, uint64_t top_k, double fraction, uint64_t seed) {
  if (fraction <= 0 || fraction >= 1)
    throw std::invalid_argument("gen_skew_controlled: fraction must be in (0, 1)");
  if (top_k == 0) throw std::invalid_argument("gen_skew_controlled: top_k must be >= 1");
  const uint64_t heavy = uint64_t(std::llround(fraction * double(n)));
  if (heavy < top_k)
    throw std::invalid_argument("gen_skew_controlled: fraction*n < top_k is infeasible");

  const uint64_t ids_seed = derive_seed(seed, 1);
  Trace t;
  t.records.reserve(n);
  // heavy flows get floor(heavy/top_k) records each; the remainder goes to
  // the first few flows, keeping the heavy share exact at the record level
  const uint64_t per = heavy / top_k;
  const uint64_t extra = heavy % top_k;
  for (uint64_t f = 0; f < top_k; ++f) {
    const uint64_t reps = per + (f < extra ? 1 : 0);
    PacketRecord r = flow_identity(ids_seed, f);
    for (uint64_t i = 0; i < reps; ++i) t.records.push_back(r);
  }
  for (uint64_t j = 0; heavy + j < n; ++j)
    t.records.push_back(flow_identity(ids_seed, top_k + j));

  std::mt19937_64 rng(derive_seed(seed, 3));
  for (size_t i = t.records.size(); i > 1; --i) {
    size_t j = size_t(rng() % i);
    std::swap(t.records[i - 1], t.records[j]);
  }
  return t;
}

Trace split_epochs(Trace trace, uint64_t epoch_len_records) {
  if (epoch_len_records == 0) throw std::invalid_argument("split_epochs: epoch length must be >= 1");
  trace.boundaries.clear();
  for (uint64_t b = epoch_len_records; b < trace.records.size(); b += epoch_len_records)
    trace.boundaries.push_back(b);
  return trace;
}

}  // namespace mvpipe
