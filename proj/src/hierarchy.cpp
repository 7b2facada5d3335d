#include "mvpipe/hierarchy.hpp"

#include <cstdio>
#include <stdexcept>

namespace mvpipe {

HierarchySpec make_spec(int dims, Granularity g) {
  if (dims != 1 && dims != 2) throw std::invalid_argument("dims must be 1 or 2");
  HierarchySpec s;
  s.dims = uint8_t(dims);
  s.step_bits = (g == Granularity::Byte) ? 8 : 1;
  s.addr_bits = 32;
  s.depth = uint8_t(32 / s.step_bits + 1);
  s.node_count = uint16_t(dims == 1 ? s.depth : s.depth * s.depth);
  return s;
}

HierarchySpec make_toy_spec(int dims) {
  if (dims != 1 && dims != 2) throw std::invalid_argument("dims must be 1 or 2");
  HierarchySpec s;
  s.dims = uint8_t(dims);
  s.step_bits = 1;
  s.addr_bits = 4;
  s.depth = 5;
  s.node_count = uint16_t(dims == 1 ? 5 : 25);
  return s;
}

uint32_t mask_addr(const HierarchySpec& spec, uint32_t value, int degree) {
  const int bits = degree * spec.step_bits;
  if (bits >= spec.addr_bits) return 0;
  uint32_t keep = ~uint32_t{0} << bits;
  if (spec.addr_bits < 32) keep &= (uint32_t{1} << spec.addr_bits) - 1;
  return value & keep;
}

bool valid_coord(const HierarchySpec& spec, Coordinate c) {
  if (c.src >= spec.depth) return false;
  if (spec.dims == 1) return c.dst == 0;
  return c.dst < spec.depth;
}

bool is_canonical(const HierarchySpec& spec, const Key& k) {
  if (!valid_coord(spec, k.coord)) return false;
  if (mask_addr(spec, k.src, k.coord.src) != k.src) return false;
  if (spec.dims == 1) return k.dst == 0;
  return mask_addr(spec, k.dst, k.coord.dst) == k.dst;
}

int node_index(const HierarchySpec& spec, Coordinate c) {
  return spec.dims == 1 ? int(c.src) : int(c.src) * spec.depth + int(c.dst);
}

Coordinate coord_at(const HierarchySpec& spec, int index) {
  if (spec.dims == 1) return Coordinate{uint8_t(index), 0};
  return Coordinate{uint8_t(index / spec.depth), uint8_t(index % spec.depth)};
}

Key generalize(const HierarchySpec& spec, const Key& key, Coordinate target) {
  if (target.src < key.coord.src || target.dst < key.coord.dst)
    throw std::invalid_argument("generalize: target below key coordinate");
  Key out;
  out.coord = target;
  out.src = mask_addr(spec, key.src, target.src);
  out.dst = spec.dims == 2 ? mask_addr(spec, key.dst, target.dst) : 0;
  return out;
}

bool covers(const HierarchySpec& spec, const Key& x, const Key& y) {
  if (y.coord.src < x.coord.src || y.coord.dst < x.coord.dst) return false;
  if (mask_addr(spec, x.src, y.coord.src) != y.src) return false;
  if (spec.dims == 1) return true;
  return mask_addr(spec, x.dst, y.coord.dst) == y.dst;
}

uint64_t key_space_size(const HierarchySpec& spec, Coordinate c) {
  int bits = spec.addr_bits - int(c.src) * spec.step_bits;
  if (bits < 0) bits = 0;
  if (spec.dims == 2) {
    int dbits = spec.addr_bits - int(c.dst) * spec.step_bits;
    if (dbits < 0) dbits = 0;
    bits += dbits;
  }
  if (bits >= 64) return UINT64_MAX;
  return uint64_t{1} << bits;
}

namespace {

std::string format_one(const HierarchySpec& spec, uint32_t addr, int degree) {
  const int prefix = spec.addr_bits - degree * spec.step_bits;
  char buf[32];
  if (spec.addr_bits == 32) {
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u/%d", (addr >> 24) & 255,
                  (addr >> 16) & 255, (addr >> 8) & 255, addr & 255, prefix);
  } else {
    std::snprintf(buf, sizeof buf, "%u/%d", addr, prefix);
  }
  return buf;
}

uint32_t parse_quad(const std::string& s, size_t b, size_t e) {
  unsigned a0, a1, a2, a3;
  if (std::sscanf(s.substr(b, e - b).c_str(), "%u.%u.%u.%u", &a0, &a1, &a2, &a3) != 4 ||
      a0 > 255 || a1 > 255 || a2 > 255 || a3 > 255)
    throw std::invalid_argument("parse_key: bad address in '" + s + "'");
  return (a0 << 24) | (a1 << 16) | (a2 << 8) | a3;
}

void parse_one(const HierarchySpec& spec, const std::string& text, size_t b, size_t e,
               uint32_t& addr, uint8_t& degree) {
  size_t slash = text.find('/', b);
  if (slash == std::string::npos || slash >= e)
    throw std::invalid_argument("parse_key: missing '/m' in '" + text + "'");
  addr = parse_quad(text, b, slash);
  int m = 0;
  try {
    m = std::stoi(text.substr(slash + 1, e - slash - 1));
  } catch (...) {
    throw std::invalid_argument("parse_key: bad mask in '" + text + "'");
  }
  if (m < 0 || m > 32 || (32 - m) % spec.step_bits != 0)
    throw std::invalid_argument("parse_key: mask /" + std::to_string(m) +
                                " not a multiple of the hierarchy step");
  degree = uint8_t((32 - m) / spec.step_bits);
}

}  // namespace

std::string format_key(const HierarchySpec& spec, const Key& k) {
  std::string out = format_one(spec, k.src, k.coord.src);
  if (spec.dims == 2) {
    out += '|';
    out += format_one(spec, k.dst, k.coord.dst);
  }
  return out;
}

Key parse_key(const HierarchySpec& spec, const std::string& text) {
  if (spec.addr_bits != 32)
    throw std::invalid_argument("parse_key: only 32-bit address specs are parseable");
  Key k;
  size_t bar = text.find('|');
  if (spec.dims == 1) {
    if (bar != std::string::npos)
      throw std::invalid_argument("parse_key: 2D key given for a 1D spec");
    parse_one(spec, text, 0, text.size(), k.src, k.coord.src);
  } else {
    if (bar == std::string::npos)
      throw std::invalid_argument("parse_key: 1D key given for a 2D spec");
    parse_one(spec, text, 0, bar, k.src, k.coord.src);
    parse_one(spec, text, bar + 1, text.size(), k.dst, k.coord.dst);
  }
  Key canon = k;
  canon.src = mask_addr(spec, k.src, k.coord.src);
  canon.dst = spec.dims == 2 ? mask_addr(spec, k.dst, k.coord.dst) : 0;
  if (!(canon == k))
    throw std::invalid_argument("parse_key: address has bits below its mask: " + text);
  return k;
}

}  // namespace mvpipe
