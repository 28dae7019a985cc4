#include <algorithm>
#include <random>

#include "plcpcomp/corpus.hpp"
#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/errors.hpp"
#include "plcpcomp/scheme_oracle.hpp"

namespace plcpcomp {

namespace {

struct Tile {
  std::uint64_t dst;
  std::uint64_t len;
  std::uint64_t src;  // 0 for literals
};

// A position on a character-level cycle, or 0 if there is none.
std::uint64_t find_cycle(const std::vector<Tile>& tiles, std::uint64_t n) {
  std::vector<std::uint64_t> src_of(n + 1, 0);
  for (const Tile& t : tiles) {
    if (t.src == 0) continue;
    for (std::uint64_t k = 0; k < t.len; ++k) src_of[t.dst + k] = t.src + k;
  }
  std::vector<std::uint8_t> state(n + 1, 0);
  std::vector<std::uint64_t> path;
  for (std::uint64_t start = 1; start <= n; ++start) {
    std::uint64_t pos = start;
    path.clear();
    while (state[pos] == 0 && src_of[pos] != 0) {
      state[pos] = 1;
      path.push_back(pos);
      pos = src_of[pos];
    }
    if (state[pos] == 1) return pos;
    for (std::uint64_t p : path) state[p] = 2;
    state[pos] = 2;
  }
  return 0;
}

}  // namespace

GeneratedCoding random_bidirectional_coding(std::uint64_t seed, std::uint64_t n,
                                            std::uint64_t max_len) {
  if (n == 0) throw ConfigError("generated codings need n >= 1");
  max_len = std::max<std::uint64_t>(max_len, 1);
  std::mt19937_64 rng(seed);
  const unsigned alphabet = 1 + static_cast<unsigned>(rng() % 4);
  auto body = rng() % 3 == 0 ? corpus::random_text(rng(), n - 1, alphabet)
                             : corpus::repetitive_text(rng(), n - 1, alphabet, 0.02);
  GeneratedCoding out{Text::from_bytes(body), Factorization()};
  const IndexBundle index = build_index(out.text);
  const auto lcp = lcp_from_plcp(index);

  std::vector<Tile> tiles;
  std::uint64_t pos = 1;
  std::vector<std::uint64_t> candidates;
  while (pos <= n) {
    const std::uint64_t rank = index.isa[pos - 1];  // 1-based
    const std::uint64_t up = lcp[rank - 1];
    const std::uint64_t down = rank < n ? lcp[rank] : 0;
    const std::uint64_t longest = std::min({std::max(up, down), max_len, n - pos + 1});
    if (longest == 0 || rng() % 4 == 0) {
      const std::uint64_t len = std::min<std::uint64_t>(1 + rng() % 3, n - pos + 1);
      tiles.push_back({pos, len, 0});
      pos += len;
      continue;
    }
    const std::uint64_t len = 1 + rng() % longest;
    candidates.clear();
    for (std::uint64_t r = rank; r > 1 && lcp[r - 1] >= len && candidates.size() < 8; --r) {
      candidates.push_back(index.sa[r - 2]);
    }
    for (std::uint64_t r = rank; r < n && lcp[r] >= len && candidates.size() < 16; ++r) {
      candidates.push_back(index.sa[r]);
    }
    tiles.push_back({pos, len, candidates[rng() % candidates.size()]});
    pos += len;
  }

  // Break cycles by turning one reference on each into a literal.
  for (std::uint64_t at = find_cycle(tiles, n); at != 0; at = find_cycle(tiles, n)) {
    auto it = std::upper_bound(tiles.begin(), tiles.end(), at,
                               [](std::uint64_t p, const Tile& t) { return p < t.dst; });
    (it - 1)->src = 0;
  }

  out.coding = Factorization(1);
  const auto bytes = out.text.bytes();
  for (const Tile& t : tiles) {
    if (t.src == 0) {
      out.coding.append_literal(bytes.subspan(t.dst - 1, t.len), rng() % 2 == 0);
    } else {
      out.coding.append_reference(t.src, t.len);
    }
  }
  if (!verify_cycle_free(out.coding)) throw std::logic_error("generator produced a cycle");
  return out;
}

}  // namespace plcpcomp
