#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "plcpcomp/corpus.hpp"
#include "plcpcomp/errors.hpp"
#include "plcpcomp/factorizer.hpp"
#include "plcpcomp/scheme_oracle.hpp"

using namespace plcpcomp;

namespace {

std::vector<FactorPair> sorted(std::vector<FactorPair> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool same_pairs(const std::vector<std::uint64_t>& plcp, std::uint64_t theta) {
  return sorted(stream_factorize(plcp, theta)) == sorted(scheme_pairs(plcp, theta));
}

}  // namespace

TEST_CASE("running example") {
  const IndexBundle b = build_index(oracle::running_example());
  SUBCASE("discovery order starts with the leftmost maximal peak") {
    const auto pairs = stream_factorize(b.plcp, 2);
    REQUIRE(pairs.size() == 4);
    CHECK(pairs[0] == FactorPair{2, 5});
    CHECK(pairs[1] == FactorPair{8, 7});
    CHECK(sorted(pairs) == sorted(scheme_pairs(b.plcp, 2)));
  }
  SUBCASE("prefix T[1..14]") {
    const std::vector<std::uint64_t> prefix(b.plcp.begin(), b.plcp.begin() + 14);
    const auto pairs = stream_factorize(prefix, 2);
    REQUIRE(pairs.size() >= 2);
    CHECK(pairs[0] == FactorPair{2, 5});
    CHECK(pairs[1] == FactorPair{8, 7});
  }
  SUBCASE("peaks") {
    const auto events = detect_peaks(b.plcp, 2);
    REQUIRE(events.size() >= 2);
    CHECK(events[0] == PeakEvent{1, 4, true, false});
    CHECK(events[1] == PeakEvent{2, 5, true, true});
  }
}

TEST_CASE("monotone nonincreasing PLCP makes position 1 maximal at once") {
  const std::vector<std::uint64_t> plcp{5, 4, 3, 2, 1, 0};
  const auto events = detect_peaks(plcp, 2);
  REQUIRE(!events.empty());
  CHECK(events[0] == PeakEvent{1, 5, true, true});
}

TEST_CASE("peak flags agree with the definitions") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 400; ++round) {
    const Text t = Text::from_bytes(corpus::mixed_text(rng(), 64));
    const IndexBundle b = build_index(t);
    for (std::uint64_t theta : {2, 3}) {
      const auto events = detect_peaks(b.plcp, theta);
      const auto expected = oracle::brute_force_peaks(b.plcp, theta);
      REQUIRE(events.size() == expected.size());
      for (std::size_t k = 0; k < events.size(); ++k) {
        CHECK(events[k].pos == expected[k].pos);
        CHECK(events[k].interesting == expected[k].interesting);
        CHECK(events[k].maximal == expected[k].maximal);
      }
    }
  }
}

TEST_CASE("single repeated character") {
  const Text t = Text::from_string(std::string(40, 'a'));
  const IndexBundle b = build_index(t);
  CHECK(sorted(stream_factorize(b.plcp, 2)) == sorted(scheme_pairs(b.plcp, 2)));
}

TEST_CASE("oracle equivalence on binary strings and random bytes") {
  for (unsigned len = 1; len <= 12; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      std::string s;
      for (unsigned k = 0; k < len; ++k) s.push_back((bits >> k) & 1 ? 'b' : 'a');
      const IndexBundle b = build_index(Text::from_string(s));
      for (std::uint64_t theta : {2, 3, 4}) REQUIRE(same_pairs(b.plcp, theta));
    }
  }
  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    const IndexBundle b = build_index(Text::from_bytes(corpus::mixed_text(rng(), 512)));
    for (std::uint64_t theta : {2, 3, 4}) REQUIRE(same_pairs(b.plcp, theta));
  }
}

TEST_CASE("process_peak_list") {
  SUBCASE("empty list emits nothing") {
    PeakList l;
    int calls = 0;
    process_peak_list(l, 10, 3, 2, [&](FactorPair) { ++calls; });
    CHECK(calls == 0);
    CHECK(l.empty());
  }
  SUBCASE("rule D drops the peak before the factor") {
    PeakList l;
    l.push_back({1, 4});
    std::vector<FactorPair> got;
    process_peak_list(l, 2, 5, 2, [&](FactorPair p) { got.push_back(p); });
    CHECK(got.empty());
    CHECK(l.empty());
  }
  SUBCASE("a surviving peak is factored up to the new factor") {
    PeakList l;
    l.push_back({3, 4});
    l.push_back({5, 6});
    std::vector<FactorPair> got;
    process_peak_list(l, 9, 8, 2, [&](FactorPair p) { got.push_back(p); });
    // Entry 5 is cut to 4, entry 3 keeps 4: the leftmost maximum is 3 and
    // covers [3, 6]; [7, 8] becomes its own factor.
    REQUIRE(got.size() == 2);
    CHECK(got[0] == FactorPair{3, 4});
    CHECK(got[1] == FactorPair{7, 2});
  }
  SUBCASE("ordering invariant is enforced") {
    PeakList l;
    l.push_back({3, 4});
    CHECK_THROWS_AS(l.push_back({4, 4}), std::logic_error);
  }
}

TEST_CASE("harvested peak lists replay against the oracle") {
  // Cut random texts at every confirmed factor and compare the factors the
  // list resolution produced so far with the oracle on that prefix.
  std::mt19937_64 rng(8);
  for (int round = 0; round < 100; ++round) {
    const IndexBundle b = build_index(Text::from_bytes(corpus::mixed_text(rng(), 300)));
    std::vector<FactorPair> got;
    StreamFactorizer f(2, [&](FactorPair p) { got.push_back(p); });
    std::uint64_t last = 0;
    for (std::uint64_t i = 0; i < b.plcp.size(); ++i) {
      f.push(b.plcp[i]);
      if (got.size() != last) {
        last = got.size();
        const std::uint64_t end = i + 1;
        // Factors within [1, end] of the oracle restricted to a prefix whose
        // PLCP values are clipped to stay inside it.
        std::vector<std::uint64_t> clipped(b.plcp.begin(), b.plcp.begin() + end);
        for (std::uint64_t k = 0; k < end; ++k) clipped[k] = std::min(clipped[k], end - k);
        CHECK(sorted(got) == sorted(scheme_pairs(clipped, 2)));
      }
    }
  }
}

TEST_CASE("lower-bound texts") {
  CHECK_THROWS_AS(lower_bound_text(1), ConfigError);
  CHECK_THROWS_AS(lower_bound_text(256), ConfigError);
  const Text t2 = lower_bound_text(2);
  CHECK(std::vector<std::uint8_t>(t2.body().begin(), t2.body().end()) ==
        std::vector<std::uint8_t>{34, 33, 34, 33});
  const Text t3 = lower_bound_text(3);
  CHECK(std::vector<std::uint8_t>(t3.body().begin(), t3.body().end()) ==
        std::vector<std::uint8_t>{35, 34, 35, 34, 33, 34, 35, 34, 33});
  for (std::uint64_t m : {3, 4, 5, 10, 20, 50}) {
    const Text t = lower_bound_text(m);
    CHECK(t.size() == m * m + 1);
    std::size_t max_list = 0;
    const IndexBundle b = build_index(t);
    const auto pairs = stream_factorize(b.plcp, 2, &max_list);
    CHECK(max_list == m - 2);
    CHECK(sorted(pairs) == sorted(scheme_pairs(b.plcp, 2)));
  }
}

TEST_CASE("pipeline equals the oracle in text order") {
  const Text t = oracle::running_example();
  const IndexBundle b = build_index(t);
  CompressionMetrics metrics;
  const Factorization f =
      pipeline_compress(t, b, 2, stream::MemoryBudget::unbounded(), &metrics);
  CHECK(f == scheme_factorize(t, b, 2).coding);
  std::vector<FactorTriple> refs;
  for (const auto& fac : f.factors()) {
    if (fac.is_reference()) refs.push_back({fac.dst, fac.src, fac.len});
  }
  CHECK(refs == std::vector<FactorTriple>{{2, 12, 5}, {8, 1, 7}, {15, 20, 2}, {17, 19, 3}});
  CHECK(metrics.references == 4);
  CHECK(metrics.plcp_rereads == 0);
  CHECK(metrics.stages.size() == 4);
}

TEST_CASE("incompressible text is one literal") {
  const Text t = Text::from_string("abcdefghij");
  const Factorization f = pipeline_compress(t, build_index(t), 2, stream::MemoryBudget::unbounded());
  REQUIRE(f.factors().size() == 1);
  CHECK(!f.factors()[0].is_reference());
}

TEST_CASE("pipeline output does not depend on the budget") {
  const Text t = Text::from_bytes(corpus::repetitive_text(77, 1 << 20, 4, 0.001));
  stream::MemoryBudget small = stream::MemoryBudget::of_bytes(256 << 10);
  small.block_size = 4096;
  StreamIndex idx_small = build_stream_index(t, small);
  CompressionMetrics m_small;
  const Factorization a = pipeline_compress(t, idx_small, 2, small, &m_small);
  StreamIndex idx_big = build_stream_index(t, stream::MemoryBudget::unbounded());
  const Factorization c = pipeline_compress(t, idx_big, 2, stream::MemoryBudget::unbounded());
  CHECK(a == c);
  CHECK(m_small.spilled());
  CHECK(m_small.plcp_rereads == 0);
  CHECK(oracle::coding_matches(a, oracle::bytes_of(t)));
}

TEST_CASE("theta below two is rejected") {
  CHECK_THROWS_AS(stream_factorize(std::vector<std::uint64_t>{0}, 1), ConfigError);
}
