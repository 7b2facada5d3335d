#pragma once

#include <cstdint>

namespace mvpipe {

// splitmix64 finalizer; bijective on uint64_t with full avalanche.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// n-th per-node seed derived from one run seed.
constexpr uint64_t derive_seed(uint64_t root, uint64_t n) {
  return mix64(root + (n + 1) * 0x9e3779b97f4a7c15ULL);
}

// Multiply-shift reduction of a 64-bit hash onto [0, width).
inline uint32_t reduce_slot(uint64_t h, uint32_t width) {
  return uint32_t((static_cast<unsigned __int128>(h) * width) >> 64);
}

inline uint64_t hash_key(uint64_t seed, uint32_t key_src, uint32_t key_dst) {
  return mix64(((uint64_t(key_src) << 32) | key_dst) ^ seed);
}

}  // namespace mvpipe
