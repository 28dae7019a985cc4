#include "plcpcomp/scheme_oracle.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <utility>

#include "plcpcomp/errors.hpp"

namespace plcpcomp {

std::vector<FactorPair> scheme_pairs(const std::vector<std::uint64_t>& plcp,
                                     std::uint64_t theta) {
  check_theta(theta);
  std::vector<std::uint64_t> p = plcp;
  // Max-heap on value, then leftmost position. Entries go stale when the
  // value changes and are skipped on pop.
  using Item = std::pair<std::uint64_t, std::uint64_t>;  // (value, pos)
  auto lower_priority = [](const Item& a, const Item& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(lower_priority)> heap(lower_priority);
  for (std::uint64_t i = 1; i <= p.size(); ++i) {
    if (p[i - 1] >= theta) heap.push({p[i - 1], i});
  }

  std::vector<FactorPair> out;
  while (!heap.empty()) {
    const auto [len, dst] = heap.top();
    heap.pop();
    if (p[dst - 1] != len) continue;
    out.push_back({dst, len});
    for (std::uint64_t j = dst > len ? dst - len : 1; j < dst; ++j) {
      const std::uint64_t shortened = std::min(p[j - 1], dst - j);
      if (shortened < p[j - 1]) {
        p[j - 1] = shortened;
        if (shortened >= theta) heap.push({shortened, j});
      }
    }
    std::fill(p.begin() + static_cast<std::ptrdiff_t>(dst - 1),
              p.begin() + static_cast<std::ptrdiff_t>(dst - 1 + len), 0);
  }
  return out;
}

SchemeResult scheme_factorize(const Text& text, const IndexBundle& index,
                              std::uint64_t theta) {
  if (index.size() != text.size()) throw InputError("index does not belong to this text");
  SchemeResult r;
  for (const FactorPair& p : scheme_pairs(index.plcp, theta)) {
    r.discovery_order.push_back({p.dst, index.phi[p.dst - 1], p.len});
  }
  std::vector<FactorTriple> by_dst = r.discovery_order;
  std::sort(by_dst.begin(), by_dst.end(),
            [](const FactorTriple& a, const FactorTriple& b) { return a.dst < b.dst; });

  r.coding = Factorization(theta);
  const auto bytes = text.bytes();
  std::uint64_t next = 1;
  for (const FactorTriple& t : by_dst) {
    r.coding.append_literal(bytes.subspan(next - 1, t.dst - next));
    r.coding.append_reference(t.src, t.len);
    next = t.dst + t.len;
  }
  r.coding.append_literal(bytes.subspan(next - 1));
  return r;
}

bool verify_cycle_free(const Factorization& f) {
  f.validate();
  const std::uint64_t n = f.text_length();
  // target[i] is the source of position i + 1, or 0 for literal positions.
  std::vector<std::uint64_t> target(n, 0);
  for (const Factor& fac : f.factors()) {
    if (!fac.is_reference()) continue;
    for (std::uint64_t k = 0; k < fac.len; ++k) target[fac.dst - 1 + k] = fac.src + k;
  }
  // 0 = unvisited, 1 = on the current walk, 2 = reaches a literal.
  std::vector<std::uint8_t> state(n, 0);
  std::vector<std::uint64_t> walk;
  for (std::uint64_t start = 1; start <= n; ++start) {
    std::uint64_t pos = start;
    walk.clear();
    while (state[pos - 1] == 0 && target[pos - 1] != 0) {
      state[pos - 1] = 1;
      walk.push_back(pos);
      pos = target[pos - 1];
    }
    if (state[pos - 1] == 1) return false;
    state[pos - 1] = 2;
    for (std::uint64_t w : walk) state[w - 1] = 2;
  }
  return true;
}

}  // namespace plcpcomp
