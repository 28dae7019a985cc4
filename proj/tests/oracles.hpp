#pragma once

// Slow, obviously-correct reference computations used by the tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "plcpcomp/factorization.hpp"
#include "plcpcomp/text_index.hpp"

namespace oracle {

// "ababbabababbabbaababa$" with the sentinel as byte 0.
inline const std::string kRunningExample = std::string("ababbabababbabbaababa") + '\0';

inline plcpcomp::Text running_example() { return plcpcomp::Text::from_string(kRunningExample); }

/// 1-based suffix array by comparing whole suffixes.
inline std::vector<std::uint64_t> naive_suffix_array(const std::vector<std::uint8_t>& t) {
  std::vector<std::uint64_t> sa(t.size());
  std::iota(sa.begin(), sa.end(), 1);
  std::sort(sa.begin(), sa.end(), [&](std::uint64_t a, std::uint64_t b) {
    return std::lexicographical_compare(t.begin() + (a - 1), t.end(), t.begin() + (b - 1), t.end());
  });
  return sa;
}

inline std::uint64_t lcp(const std::vector<std::uint8_t>& t, std::uint64_t a, std::uint64_t b) {
  std::uint64_t l = 0;
  while (a + l <= t.size() && b + l <= t.size() && t[a + l - 1] == t[b + l - 1]) ++l;
  return l;
}

inline std::vector<std::uint8_t> bytes_of(const plcpcomp::Text& t) {
  return {t.bytes().begin(), t.bytes().end()};
}

/// Replays a coding left to right one character at a time; only valid for
/// codings whose references all point left.
inline std::vector<std::uint8_t> replay_leftward(const plcpcomp::Factorization& f) {
  std::vector<std::uint8_t> out;
  for (const auto& fac : f.factors()) {
    if (fac.is_reference()) {
      for (std::uint64_t k = 0; k < fac.len; ++k) out.push_back(out[fac.src - 1 + k]);
    } else {
      const auto lit = f.literal_bytes(fac);
      out.insert(out.end(), lit.begin(), lit.end());
    }
  }
  return out;
}

/// Every reference copies an equal substring of `t` and factors tile it.
inline bool coding_matches(const plcpcomp::Factorization& f, const std::vector<std::uint8_t>& t) {
  if (f.text_length() != t.size()) return false;
  std::uint64_t next = 1;
  for (const auto& fac : f.factors()) {
    if (fac.dst != next) return false;
    if (fac.is_reference()) {
      if (!std::equal(t.begin() + (fac.dst - 1), t.begin() + (fac.dst - 1 + fac.len),
                      t.begin() + (fac.src - 1))) {
        return false;
      }
    } else {
      const auto lit = f.literal_bytes(fac);
      if (!std::equal(lit.begin(), lit.end(), t.begin() + (fac.dst - 1))) return false;
    }
    next += fac.len;
  }
  return next == t.size() + 1;
}

struct PeakFlags {
  std::uint64_t pos;
  bool interesting;
  bool maximal;
};

/// Peaks, interesting peaks and maximal peaks straight from their
/// definitions, evaluated segment by segment: a segment starts at position
/// 1 or right after the factor created at the previous segment's leftmost
/// maximal peak.
inline std::vector<PeakFlags> brute_force_peaks(const std::vector<std::uint64_t>& plcp,
                                                std::uint64_t theta) {
  const std::uint64_t n = plcp.size();
  auto P = [&](std::uint64_t i) { return plcp[i - 1]; };
  std::vector<PeakFlags> out;
  std::uint64_t seg = 1;
  while (seg <= n) {
    auto is_peak = [&](std::uint64_t i) {
      return P(i) >= theta && (i == seg || P(i - 1) < P(i));
    };
    auto is_interesting = [&](std::uint64_t i) {
      if (!is_peak(i)) return false;
      for (std::uint64_t j = seg; j < i; ++j) {
        if (i < j + P(j) && P(j) >= P(i)) return false;
      }
      return true;
    };
    auto is_maximal = [&](std::uint64_t i) {
      if (!is_interesting(i)) return false;
      for (std::uint64_t j = i + 1; j < i + P(i) && j <= n; ++j) {
        if (is_interesting(j)) return false;
      }
      return true;
    };
    std::uint64_t stop = n;
    for (std::uint64_t i = seg; i <= n; ++i) {
      if (is_maximal(i)) {
        stop = i + P(i) - 1;
        break;
      }
    }
    for (std::uint64_t i = seg; i <= stop; ++i) {
      if (is_peak(i)) out.push_back({i, is_interesting(i), false});
    }
    for (auto& e : out) {
      if (e.pos >= seg && e.pos <= stop && is_maximal(e.pos) && e.pos + P(e.pos) - 1 == stop) {
        e.maximal = true;
      }
    }
    seg = stop + 1;
  }
  return out;
}

}  // namespace oracle
