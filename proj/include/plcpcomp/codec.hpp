#pragma once

// Coded file layout, all integers u64 little-endian:
//
//   "PLCPZ001" n theta record*
//   record = 0x00 len byte[len]      literal
//          | 0x01 src len            reference (src is 1-based)
//
// Records are in text order and their lengths sum to n.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "plcpcomp/factorization.hpp"

namespace plcpcomp {

inline constexpr char kCodedMagic[8] = {'P', 'L', 'C', 'P', 'Z', '0', '0', '1'};
inline constexpr std::uint8_t kLiteralTag = 0x00;
inline constexpr std::uint8_t kReferenceTag = 0x01;

/// Returns the number of bytes written. Throws IoError if the sink fails.
std::uint64_t encode(const Factorization& f, std::ostream& sink);
std::vector<std::uint8_t> encode(const Factorization& f);

/// Throws FormatError with a code naming the defect.
Factorization decode(std::istream& source);
Factorization decode(std::span<const std::uint8_t> bytes);

}  // namespace plcpcomp
