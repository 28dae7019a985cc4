#include <algorithm>
#include <limits>
#include <string>
#include <tuple>

#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/errors.hpp"

namespace plcpcomp {

DepEdgeStreams build_dep_streams(const Factorization& f, const stream::MemoryBudget& budget) {
  stream::TupleStream<RefTuple> factors(budget);
  for (const Factor& fac : f.factors()) {
    if (fac.is_reference()) factors.push({fac.src, fac.len, fac.dst});
  }
  factors.finalize();
  auto requests = stream::sort_stream(
      factors,
      [](const RefTuple& a, const RefTuple& b) {
        return std::tie(a.src, a.len, a.dst) < std::tie(b.src, b.len, b.dst);
      },
      budget);
  factors.rewind();
  return {std::move(requests), std::move(factors)};
}

std::vector<std::uint32_t> character_depths(const Factorization& f) {
  f.validate();
  const std::uint64_t n = f.text_length();
  constexpr std::uint32_t kUnknown = std::numeric_limits<std::uint32_t>::max();
  constexpr std::uint32_t kOnPath = kUnknown - 1;
  std::vector<std::uint32_t> depth(n, 0);
  // src_of[i] is the source of position i + 1, or 0 for literal positions.
  std::vector<std::uint64_t> src_of(n, 0);
  for (const Factor& fac : f.factors()) {
    if (!fac.is_reference()) continue;
    for (std::uint64_t k = 0; k < fac.len; ++k) {
      src_of[fac.dst - 1 + k] = fac.src + k;
      depth[fac.dst - 1 + k] = kUnknown;
    }
  }
  std::vector<std::uint64_t> path;
  for (std::uint64_t start = 1; start <= n; ++start) {
    if (depth[start - 1] != kUnknown) continue;
    path.clear();
    std::uint64_t pos = start;
    while (depth[pos - 1] == kUnknown) {
      depth[pos - 1] = kOnPath;
      path.push_back(pos);
      pos = src_of[pos - 1];
    }
    if (depth[pos - 1] == kOnPath) {
      throw CodingError("cyclic reference through position " + std::to_string(pos));
    }
    std::uint32_t d = depth[pos - 1];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it - 1] = ++d;
  }
  return depth;
}

DepGraphStats graph_stats(const Factorization& f) {
  const auto depth = character_depths(f);
  DepGraphStats s;
  const auto& factors = f.factors();
  s.node_count = factors.size();
  auto factor_at = [&](std::uint64_t pos) {
    auto it = std::upper_bound(factors.begin(), factors.end(), pos,
                               [](std::uint64_t p, const Factor& x) { return p < x.dst; });
    return static_cast<std::uint64_t>(it - factors.begin()) - 1;
  };
  for (const Factor& fac : factors) {
    if (!fac.is_reference()) continue;
    ++s.reference_count;
    const std::uint64_t degree = factor_at(fac.src + fac.len - 1) - factor_at(fac.src) + 1;
    s.edge_count += degree;
    s.max_out_degree = std::max(s.max_out_degree, degree);
    if (degree > 1) ++s.multi_dependent_count;
  }
  for (std::uint32_t d : depth) s.depth = std::max<std::uint64_t>(s.depth, d);
  return s;
}

}  // namespace plcpcomp
