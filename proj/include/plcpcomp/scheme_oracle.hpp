#pragma once

// Reference implementation of plcpcomp on a mutable in-core PLCP copy:
// repeatedly factor the leftmost global maximum, then apply Rule (D)
// (shorten overlapping values on the left) and Rule (R) (clear the factored
// positions).

#include <cstdint>
#include <vector>

#include "plcpcomp/factorization.hpp"
#include "plcpcomp/factorizer.hpp"
#include "plcpcomp/text_index.hpp"

namespace plcpcomp {

struct SchemeResult {
  Factorization coding;
  /// References in the order they were chosen.
  std::vector<FactorTriple> discovery_order;
};

SchemeResult scheme_factorize(const Text& text, const IndexBundle& index,
                              std::uint64_t theta);

/// (dst, len) pairs of the scheme for a bare PLCP array, in discovery order.
std::vector<FactorPair> scheme_pairs(const std::vector<std::uint64_t>& plcp,
                                     std::uint64_t theta);

/// True iff following references character by character always reaches a
/// literal. Throws CodingError for references outside the text.
bool verify_cycle_free(const Factorization& f);

}  // namespace plcpcomp
