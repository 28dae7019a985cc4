#include <algorithm>
#include <limits>
#include <string>

#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/errors.hpp"

namespace plcpcomp {

namespace {

struct Board {
  std::vector<std::uint8_t> text;
  /// Round in which each position was resolved; kOpen while unresolved.
  std::vector<std::uint32_t> round;
  std::uint64_t open = 0;
};

constexpr std::uint32_t kOpen = std::numeric_limits<std::uint32_t>::max();

Board lay_out(const Factorization& f) {
  f.validate();
  Board b;
  const std::uint64_t n = f.text_length();
  b.text.assign(n, 0);
  b.round.assign(n, 0);
  for (const Factor& fac : f.factors()) {
    if (fac.is_reference()) {
      std::fill_n(b.round.begin() + static_cast<std::ptrdiff_t>(fac.dst - 1), fac.len, kOpen);
      b.open += fac.len;
    } else {
      const auto lit = f.literal_bytes(fac);
      std::copy(lit.begin(), lit.end(), b.text.begin() + static_cast<std::ptrdiff_t>(fac.dst - 1));
    }
  }
  return b;
}

// Copies every open character of `fac` whose source was resolved before
// round `r`; with `r == kOpen` any resolved source counts.
std::uint64_t sweep_factor(Board& b, const Factor& fac, std::uint32_t r, bool backward) {
  std::uint64_t done = 0;
  for (std::uint64_t step = 0; step < fac.len; ++step) {
    const std::uint64_t k = backward ? fac.len - 1 - step : step;
    const std::uint64_t d = fac.dst - 1 + k;
    const std::uint64_t s = fac.src - 1 + k;
    if (b.round[d] == kOpen && b.round[s] < r) {
      b.text[d] = b.text[s];
      b.round[d] = r == kOpen ? 1 : r;
      ++done;
    }
  }
  return done;
}

}  // namespace

std::vector<std::uint8_t> decompress_oracle(const Factorization& f, SweepMode mode,
                                            std::uint64_t* rounds) {
  Board b = lay_out(f);
  const auto& factors = f.factors();
  std::uint64_t count = 0;
  while (b.open > 0) {
    ++count;
    std::uint64_t progress = 0;
    if (mode == SweepMode::jacobi) {
      const auto r = static_cast<std::uint32_t>(count);
      for (const Factor& fac : factors) {
        if (fac.is_reference()) progress += sweep_factor(b, fac, r, false);
      }
    } else if (count % 2 == 1) {
      for (const Factor& fac : factors) {
        if (fac.is_reference()) progress += sweep_factor(b, fac, kOpen, false);
      }
    } else {
      for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        if (it->is_reference()) progress += sweep_factor(b, *it, kOpen, true);
      }
    }
    if (progress == 0) {
      throw CodingError("coding is cyclic: " + std::to_string(b.open) +
                        " positions can never be resolved");
    }
    b.open -= progress;
  }
  if (rounds) *rounds = count;
  return std::move(b.text);
}

}  // namespace plcpcomp
