#pragma once

#include <cstdint>

namespace mvpipe {

// One majority-vote cell: candidate key K, total count V, indicator I,
// cumulative count C of the current candidate.
struct Bucket {
  uint32_t key_src = 0;
  uint32_t key_dst = 0;
  bool occupied = false;
  uint64_t total = 0;       // V
  int64_t indicator = 0;    // I; stays >= 0 in full mode, may go negative in hw mode
  uint64_t cumulative = 0;  // C
};

// K value an hw-mode bucket starts with (the register init value -1).
inline constexpr uint32_t kHwEmptyKey = 0xffffffffu;

enum class InsertOutcome : uint8_t {
  Admitted,  // value absorbed here; nothing carries on
  Passed,    // key not admitted; the same (key, value) carries on
  Evicted,   // key installed; the previous candidate's (key, C) carries on
};

// One majority-vote step. An empty bucket behaves as indicator 0, so the
// first insertion takes the takeover branch and is admitted in place.
// Tie at indicator == value decrements (the pass branch wins).
inline InsertOutcome bucket_insert(Bucket& b, uint32_t ks, uint32_t kd, uint64_t v,
                                   uint32_t& ev_src, uint32_t& ev_dst, uint64_t& ev_val) {
  b.total += v;
  if (b.occupied && b.key_src == ks && b.key_dst == kd) {
    b.indicator += int64_t(v);
    b.cumulative += v;
    return InsertOutcome::Admitted;
  }
  if (b.indicator >= int64_t(v)) {
    b.indicator -= int64_t(v);
    return InsertOutcome::Passed;
  }
  const bool was_occupied = b.occupied;
  ev_src = b.key_src;
  ev_dst = b.key_dst;
  ev_val = b.cumulative;
  b.indicator = int64_t(v) - b.indicator;
  b.key_src = ks;
  b.key_dst = kd;
  b.cumulative = v;
  b.occupied = true;
  return was_occupied ? InsertOutcome::Evicted : InsertOutcome::Admitted;
}

// Pipeline-stage variant: every branch condition evaluates against the
// bucket's original (K, I) pair, and I is updated in both the match and the
// mismatch branch (the takeover correction is dropped, so I can go
// negative). Callers drop an eviction whose value is 0 — that is the
// carry of the init sentinel out of a never-occupied bucket.
inline InsertOutcome bucket_insert_hw(Bucket& b, uint32_t x, uint64_t v,
                                      uint32_t& ev_key, uint64_t& ev_val) {
  b.total += v;
  const uint32_t orig_key = b.key_src;
  const int64_t orig_ind = b.indicator;
  const bool match = orig_key == x;
  b.indicator = match ? orig_ind + int64_t(v) : orig_ind - int64_t(v);
  const bool takeover = !match && orig_ind < int64_t(v);
  if (takeover) b.key_src = x;
  if (match) {
    b.cumulative += v;
    return InsertOutcome::Admitted;
  }
  if (takeover) {
    ev_key = orig_key;
    ev_val = b.cumulative;
    b.cumulative = v;
    b.occupied = true;
    return InsertOutcome::Evicted;
  }
  return InsertOutcome::Passed;
}

}  // namespace mvpipe
