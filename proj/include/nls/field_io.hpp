// NLSF1 field container: a small self-describing binary for bit-exact reload.
//
//   bytes 0..4   magic "NLSF1"
//   byte  5      representation tag: 0 physical, 1 spectral
//   bytes 6..7   reserved, zero
//   u64          spatial dimension d
//   u64          points per dimension n
//   f64          box side length L
//   then n^d interleaved (re, im) f64 pairs, row-major, axis 0 slowest.
//
// All integers and floats are little-endian 64-bit.
#pragma once

#include <string>

#include "nls/field.hpp"

namespace nls {

void write_field(const std::string& path, const Field& field);
Field read_field(const std::string& path);

}  // namespace nls
