#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "doctest.h"
#include "plcpcomp/errors.hpp"
#include "plcpcomp/streamkit.hpp"

using namespace plcpcomp;
using namespace plcpcomp::stream;

namespace {

struct Rec {
  std::uint64_t key;
  std::uint64_t seq;
  std::uint64_t pad;
};

bool key_less(const Rec& a, const Rec& b) { return a.key < b.key; }

MemoryBudget tiny_budget() {
  MemoryBudget b = MemoryBudget::of_bytes(4 * MemoryBudget::kMinBlockSize);
  b.block_size = MemoryBudget::kMinBlockSize;
  return b;
}

}  // namespace

TEST_CASE("budget validation") {
  MemoryBudget b = MemoryBudget::of_bytes(1 << 20);
  CHECK_NOTHROW(b.validate());
  b.block_size = 1024;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  b = MemoryBudget::of_bytes(3 * MemoryBudget::kMinBlockSize);
  b.block_size = MemoryBudget::kMinBlockSize;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  CHECK_NOTHROW(MemoryBudget::unbounded().validate());
}

TEST_CASE("tuple stream keeps write order in core and on disk") {
  for (const MemoryBudget& budget : {MemoryBudget::unbounded(), tiny_budget()}) {
    TupleStream<Rec> s(budget);
    for (std::uint64_t i = 0; i < 5000; ++i) s.push({i * 7 % 13, i, 0});
    s.finalize();
    CHECK(s.size() == 5000);
    CHECK(s.spilled() == !budget.unlimited());
    Rec r;
    std::uint64_t i = 0;
    while (s.next(r)) {
      CHECK(r.seq == i);
      ++i;
    }
    CHECK(i == 5000);
    s.rewind();
    REQUIRE(s.next(r));
    CHECK(r.seq == 0);
  }
}

TEST_CASE("spilled stream counts blocks") {
  TupleStream<std::uint64_t> s(tiny_budget());
  for (std::uint64_t i = 0; i < 10000; ++i) s.push(i);
  s.finalize();
  (void)s.to_vector();
  CHECK(s.stats().spill_files == 1);
  const std::uint64_t blocks = (10000 * 8 + 4095) / 4096;
  CHECK(s.stats().blocks_written >= blocks);
  CHECK(s.stats().blocks_read == blocks);
  CHECK(s.stats().items_read == 10000);
}

TEST_CASE("records wider than a block are rejected") {
  struct Wide {
    char bytes[8192];
  };
  MemoryBudget b = tiny_budget();
  CHECK_THROWS_AS(TupleStream<Wide>{b}, ConfigError);
}

TEST_CASE("unwritable spill directory is an I/O error") {
  MemoryBudget b = tiny_budget();
  b.tmp_dir = "/nonexistent/plcpcomp";
  TupleStream<std::uint64_t> s(b);
  CHECK_THROWS_AS(
      [&] {
        for (std::uint64_t i = 0; i < 100000; ++i) s.push(i);
      }(),
      IoError);
}

TEST_CASE("sort_stream small cases") {
  SUBCASE("empty") {
    TupleStream<Rec> s;
    s.finalize();
    auto out = sort_stream(s, key_less, MemoryBudget::unbounded());
    CHECK(out.empty());
  }
  SUBCASE("three items") {
    auto s = TupleStream<Rec>::from_vector({{3, 0, 0}, {1, 1, 0}, {2, 2, 0}},
                                           MemoryBudget::unbounded());
    auto out = sort_stream(s, key_less, MemoryBudget::unbounded()).to_vector();
    REQUIRE(out.size() == 3);
    CHECK(out[0].key == 1);
    CHECK(out[1].key == 2);
    CHECK(out[2].key == 3);
  }
}

TEST_CASE("sort_stream equals an in-core stable sort for every budget") {
  std::mt19937_64 rng(7);
  std::vector<Rec> items(1000000);
  for (std::uint64_t i = 0; i < items.size(); ++i) items[i] = {rng() % 100000, i, rng()};
  std::vector<Rec> expected = items;
  std::stable_sort(expected.begin(), expected.end(), key_less);

  for (const MemoryBudget& budget :
       {MemoryBudget::of_bytes(1 << 20), tiny_budget(), MemoryBudget::unbounded()}) {
    auto s = TupleStream<Rec>::from_vector(items, budget);
    SortReport report;
    auto out = sort_stream(s, key_less, budget, &report).to_vector();
    REQUIRE(out.size() == expected.size());
    bool same = true;
    for (std::size_t i = 0; i < out.size() && same; ++i) {
      same = out[i].key == expected[i].key && out[i].seq == expected[i].seq;
    }
    CHECK(same);

    if (!budget.unlimited()) {
      // Block traffic within c * (n/B) * (1 + log2(ceil(runs / fan_in))), c <= 8.
      const double blocks_n =
          std::ceil(double(items.size() * sizeof(Rec)) / double(budget.block_size));
      const double passes =
          1.0 + std::log2(std::ceil(double(report.runs) / double(report.fan_in)) + 1.0);
      CHECK(report.io.blocks() <= 8.0 * blocks_n * passes);
      CHECK(report.runs > 1);
    }
  }
}

TEST_CASE("scan_zip merges in key order") {
  const MemoryBudget b = MemoryBudget::unbounded();
  auto visit = [&](std::vector<std::uint64_t> a, std::vector<std::uint64_t> c) {
    auto sa = TupleStream<std::uint64_t>::from_vector(a, b);
    auto sb = TupleStream<std::uint64_t>::from_vector(c, b);
    std::vector<std::pair<char, std::uint64_t>> seen;
    auto id = [](const std::uint64_t& x) { return x; };
    scan_zip(
        sa, sb, id, id, [&](const std::uint64_t& x) { seen.push_back({'a', x}); },
        [&](const std::uint64_t& x) { seen.push_back({'b', x}); });
    return seen;
  };
  SUBCASE("first stream empty") {
    const auto seen = visit({}, {1, 2});
    REQUIRE(seen.size() == 2);
    CHECK(seen[0] == std::pair<char, std::uint64_t>{'b', 1});
    CHECK(seen[1] == std::pair<char, std::uint64_t>{'b', 2});
  }
  SUBCASE("interleaved") {
    const auto seen = visit({1, 3}, {2});
    REQUIRE(seen.size() == 3);
    CHECK(seen[0].second == 1);
    CHECK(seen[1].second == 2);
    CHECK(seen[2].second == 3);
  }
  SUBCASE("ties favour the first stream") {
    const auto seen = visit({2}, {2});
    CHECK(seen[0].first == 'a');
  }
  SUBCASE("random sorted streams match an in-core merge") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
      std::vector<std::uint64_t> a(rng() % 200), c(rng() % 200);
      for (auto& x : a) x = rng() % 500;
      for (auto& x : c) x = rng() % 500;
      std::sort(a.begin(), a.end());
      std::sort(c.begin(), c.end());
      std::vector<std::uint64_t> merged;
      std::merge(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(merged));
      std::vector<std::uint64_t> got;
      for (const auto& [src, x] : visit(a, c)) got.push_back(x);
      CHECK(got == merged);
    }
  }
  SUBCASE("unsorted input is detected") {
    CHECK_THROWS_AS(visit({3, 1}, {}), std::logic_error);
  }
}

TEST_CASE("scan_zip ordinal keys") {
  auto a = TupleStream<std::uint64_t>::from_vector({10, 20, 30}, MemoryBudget::unbounded());
  auto b = TupleStream<std::uint64_t>::from_vector({2}, MemoryBudget::unbounded());
  std::uint64_t last = 0;
  std::uint64_t got = 0;
  scan_zip(
      a, b, [](const std::uint64_t&, std::uint64_t ord) { return ord; },
      [](const std::uint64_t& x) { return x; }, [&](const std::uint64_t& x) { last = x; },
      [&](const std::uint64_t&) { got = last; });
  CHECK(got == 20);
}

TEST_CASE("spilling priority queue matches a binary heap") {
  for (const MemoryBudget& budget : {MemoryBudget::unbounded(), tiny_budget()}) {
    std::mt19937_64 rng(11);
    auto less = [](const Rec& a, const Rec& b) { return a.key < b.key; };
    SpillingPriorityQueue<Rec, decltype(less)> pq(budget, less);
    // Reference ordered by (key, insertion sequence).
    auto ref_order = [](const Rec& a, const Rec& b) {
      return a.key != b.key ? a.key > b.key : a.seq > b.seq;
    };
    std::priority_queue<Rec, std::vector<Rec>, decltype(ref_order)> ref(ref_order);
    std::uint64_t seq = 0;
    for (int step = 0; step < 200000; ++step) {
      if (ref.empty() || rng() % 3 != 0) {
        const Rec r{rng() % 1000, seq++, 0};
        pq.push(r);
        ref.push(r);
      } else {
        const Rec got = pq.pop();
        const Rec want = ref.top();
        ref.pop();
        REQUIRE(got.key == want.key);
        REQUIRE(got.seq == want.seq);
      }
    }
    while (!ref.empty()) {
      const Rec got = pq.pop();
      REQUIRE(got.seq == ref.top().seq);
      ref.pop();
    }
    CHECK(pq.empty());
    if (!budget.unlimited()) CHECK(pq.spills() > 0);
  }
}
