#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mvpipe {

struct PacketRecord {
  uint32_t src = 0;
  uint32_t dst = 0;
  uint32_t value = 1;  // >= 1: packet count of 1 or a byte count
  friend bool operator==(const PacketRecord&, const PacketRecord&) = default;
};

// An ordered record stream with optional epoch split points. Boundaries are
// interior record indices, strictly increasing, in (0, size).
struct Trace {
  std::vector<PacketRecord> records;
  std::vector<uint64_t> boundaries;

  size_t epoch_count() const { return boundaries.size() + 1; }
  std::pair<size_t, size_t> epoch_span(size_t epoch) const;
  std::span<const PacketRecord> epoch(size_t epoch) const;
};

enum class TraceFormat : uint8_t { Csv, Packed };

struct TraceParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Trace read_trace(const std::string& path, TraceFormat format);
// Peeks at the file magic; "MVPT" means packed, anything else CSV.
Trace read_trace_auto(const std::string& path);
void write_trace(const std::string& path, const Trace& trace, TraceFormat format);

// Flow identities drawn Zipf(alpha) over universe_size distinct (src, dst)
// pairs; addresses are a fixed pseudo-random function of the flow id.
Trace gen_zipf(uint64_t n, double alpha, uint64_t universe_size, uint64_t seed);

// Exactly round(fraction * n) records spread evenly over top_k designated
// heavy flows; every remaining record is its own distinct light flow.
// Record order is shuffled deterministically by seed.
Trace gen_skew_controlled(uint64_t n, uint64_t top_k, double fraction, uint64_t seed);

Trace split_epochs(Trace trace, uint64_t epoch_len_records);

}  // namespace mvpipe
