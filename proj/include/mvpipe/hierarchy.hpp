#pragma once

#include <cstdint>
#include <string>

namespace mvpipe {

enum class Granularity : uint8_t { Byte, Bit };

// Shape of a 1D or 2D IPv4 prefix hierarchy. depth is per dimension: one
// node per prefix step plus the fully general node (32/step + 1).
struct HierarchySpec {
  uint8_t dims = 1;
  uint8_t step_bits = 8;
  uint8_t addr_bits = 32;
  uint8_t depth = 5;
  uint16_t node_count = 5;  // H: depth (1D) or depth^2 (2D)

  friend bool operator==(const HierarchySpec&, const HierarchySpec&) = default;
};

HierarchySpec make_spec(int dims, Granularity g);

// 4-bit address space at bit granularity (depth 5). Small enough that the
// whole key space is enumerable, which is what the exhaustive tests need.
HierarchySpec make_toy_spec(int dims);

// Per-dimension generalization degree, in prefix steps. dst stays 0 in 1D.
struct Coordinate {
  uint8_t src = 0;
  uint8_t dst = 0;
  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

inline int level_of(Coordinate c) { return int(c.src) + int(c.dst); }

// An address (1D) or address pair (2D) plus its lattice coordinate.
// Canonical form: every bit below the coordinate's mask is zero, so key
// equality is plain bitwise equality.
struct Key {
  uint32_t src = 0;
  uint32_t dst = 0;  // unused (0) in 1D
  Coordinate coord;
  friend bool operator==(const Key&, const Key&) = default;
};

// Zeroes the low `degree * step_bits` bits of an address value.
uint32_t mask_addr(const HierarchySpec& spec, uint32_t value, int degree);

bool valid_coord(const HierarchySpec& spec, Coordinate c);
bool is_canonical(const HierarchySpec& spec, const Key& k);

// Array index of a node: g (1D) or g_src * depth + g_dst (2D, source-major).
int node_index(const HierarchySpec& spec, Coordinate c);
Coordinate coord_at(const HierarchySpec& spec, int index);

// Throws std::invalid_argument if target is below key.coord in any dimension.
Key generalize(const HierarchySpec& spec, const Key& key, Coordinate target);

// The ⪯ relation: true iff x can be generalized to y (reflexive).
bool covers(const HierarchySpec& spec, const Key& x, const Key& y);

// Number of distinct keys at a node; saturates at UINT64_MAX for the 2D
// bottom nodes whose key space exceeds 64 bits of representable count.
uint64_t key_space_size(const HierarchySpec& spec, Coordinate c);

// "a.b.c.d/m" (1D) or "a.b.c.d/m|e.f.g.h/n" (2D) for 32-bit specs; the toy
// spec renders as "value/m". parse_key accepts the 32-bit forms only.
std::string format_key(const HierarchySpec& spec, const Key& k);
Key parse_key(const HierarchySpec& spec, const std::string& text);

}  // namespace mvpipe
