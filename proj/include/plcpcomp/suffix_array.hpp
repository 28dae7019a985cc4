#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace plcpcomp {

/// Suffix array of `text` by induced sorting (SA-IS), 0-based positions.
/// The last byte must be a unique sentinel smaller than every other byte.
/// Index must be able to represent text.size().
template <class Index>
std::vector<Index> build_suffix_array(std::span<const std::uint8_t> text);

extern template std::vector<std::uint32_t> build_suffix_array<std::uint32_t>(
    std::span<const std::uint8_t>);
extern template std::vector<std::uint64_t> build_suffix_array<std::uint64_t>(
    std::span<const std::uint8_t>);

}  // namespace plcpcomp
