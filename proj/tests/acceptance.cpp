// Acceptance suite: one PASS/FAIL line per criterion.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "plcpcomp/codec.hpp"
#include "plcpcomp/corpus.hpp"
#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/factorizer.hpp"
#include "plcpcomp/scheme_oracle.hpp"

using namespace plcpcomp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double ratio = 0.0;

  void fail(std::string why) {
    if (pass) detail = std::move(why);
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

bool run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (secs > limit_s) o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(limit_s));
  std::printf("%s criterion %d: %s (%.1f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.detail.empty() ? "" : " - ", o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

std::vector<std::uint8_t> bytes_of(const Text& t) { return {t.bytes().begin(), t.bytes().end()}; }

std::vector<FactorPair> sorted(std::vector<FactorPair> v) {
  std::sort(v.begin(), v.end());
  return v;
}

stream::MemoryBudget small_budget(std::uint64_t bytes) {
  stream::MemoryBudget b = stream::MemoryBudget::of_bytes(bytes);
  b.block_size = std::min<std::uint64_t>(b.block_size, bytes / 16);
  return b;
}

// Block k copies block k+1; the last block is a literal.
Factorization chain(std::uint64_t depth, std::uint64_t width) {
  Factorization f(2);
  for (std::uint64_t k = 0; k < depth; ++k) f.append_reference((k + 1) * width + 1, width);
  std::vector<std::uint8_t> tail(width, 'a');
  tail.push_back(0);
  f.append_literal(tail);
  return f;
}

// Longest run of consecutive single-dependent references, each copying
// from inside the next one.
std::uint64_t single_dependent_chain(const Factorization& f) {
  const auto& fs = f.factors();
  auto owner = [&](std::uint64_t pos) {
    auto it = std::upper_bound(fs.begin(), fs.end(), pos,
                               [](std::uint64_t p, const Factor& x) { return p < x.dst; });
    return static_cast<std::size_t>(it - fs.begin()) - 1;
  };
  auto parent = [&](std::size_t k) -> std::optional<std::size_t> {
    if (!fs[k].is_reference()) return std::nullopt;
    const std::size_t p = owner(fs[k].src);
    if (p != owner(fs[k].src + fs[k].len - 1)) return std::nullopt;
    return p;
  };
  std::vector<std::int64_t> memo(fs.size(), -1);
  std::function<std::uint64_t(std::size_t)> length = [&](std::size_t k) -> std::uint64_t {
    if (memo[k] >= 0) return memo[k];
    memo[k] = 0;
    std::uint64_t v = 0;
    if (const auto p = parent(k)) v = 1 + (parent(*p) ? length(*p) : 0);
    memo[k] = static_cast<std::int64_t>(v);
    return v;
  };
  std::uint64_t best = 0;
  for (std::size_t k = 0; k < fs.size(); ++k) best = std::max(best, length(k));
  return best;
}

Outcome golden_example() {
  Outcome o;
  const Text t = Text::from_string(std::string("ababbabababbabbaababa") + '\0');
  const IndexBundle index = build_index(t);
  const SchemeResult r = scheme_factorize(t, index, 2);
  const std::vector<FactorTriple> want{{8, 1, 7}, {2, 12, 5}, {17, 19, 3}, {15, 20, 2}};
  if (r.discovery_order != want) o.fail("oracle references differ");
  const Factorization f = pipeline_compress(t, index, 2, stream::MemoryBudget::unbounded());
  std::vector<FactorTriple> got;
  for (const Factor& fac : f.factors()) {
    if (fac.is_reference()) got.push_back({fac.dst, fac.src, fac.len});
  }
  const std::vector<FactorTriple> by_dst{{2, 12, 5}, {8, 1, 7}, {15, 20, 2}, {17, 19, 3}};
  if (got != by_dst) o.fail("streaming compressor references differ");
  const Factorization decoded = decode(encode(f));
  if (decompress_pj(decoded, stream::MemoryBudget::unbounded()) != bytes_of(t)) {
    o.fail("decompression differs");
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::uint64_t cases = 0;
  auto compare = [&](const Text& t) {
    const IndexBundle b = build_index(t);
    for (std::uint64_t theta : {2, 3, 4}) {
      ++cases;
      if (sorted(stream_factorize(b.plcp, theta)) != sorted(scheme_pairs(b.plcp, theta))) {
        o.fail("mismatch at theta " + std::to_string(theta) + ", n " + std::to_string(t.size()));
      }
    }
  };
  for (unsigned len = 1; len <= 12; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      std::string s;
      for (unsigned k = 0; k < len; ++k) s.push_back((bits >> k) & 1 ? 'b' : 'a');
      compare(Text::from_string(s));
    }
  }
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 500; ++k) {
    const std::uint64_t n = rng() % 513;
    const unsigned alphabet = 2 + static_cast<unsigned>(rng() % 254);
    compare(Text::from_bytes(k % 2 ? corpus::random_text(rng(), n, alphabet)
                                   : corpus::repetitive_text(rng(), n, 1 + alphabet % 8, 0.02)));
  }
  o.detail = o.pass ? std::to_string(cases) + " comparisons" : o.detail;
  return o;
}

Outcome round_trip_fuzz(Outcome& list_bound) {
  Outcome o;
  std::mt19937_64 rng(77);
  const stream::MemoryBudget budget = small_budget(1 << 20);
  for (int k = 0; k < 1000; ++k) {
    const std::uint64_t theta = 2 + k % 5;
    const Text t = Text::from_bytes(corpus::mixed_text(rng(), 65535));
    StreamIndex index = build_stream_index(t, budget);
    CompressionMetrics metrics;
    const Factorization f = pipeline_compress(t, index, theta, budget, &metrics);
    const Factorization back = decode(encode(f));
    const auto want = bytes_of(t);
    if (decompress_oracle(back) != want) o.fail("oracle strategy, case " + std::to_string(k));
    if (decompress_pj(back, budget) != want) o.fail("pj strategy, case " + std::to_string(k));
    if (decompress_pj(compact_em(back, budget), budget) != want) {
      o.fail("compact+pj strategy, case " + std::to_string(k));
    }
    const double n = static_cast<double>(t.size());
    const double bound = 4.0 * std::min(std::sqrt(n * std::log2(std::max(n, 2.0))),
                                        static_cast<double>(metrics.bwt_runs));
    list_bound.ratio = std::max(list_bound.ratio, static_cast<double>(metrics.max_list_size) / bound * 4.0);
    if (static_cast<double>(metrics.max_list_size) > bound) {
      list_bound.fail("case " + std::to_string(k) + ": |L| " +
                      std::to_string(metrics.max_list_size) + " > " + std::to_string(bound));
    }
  }
  return o;
}

Outcome generality() {
  Outcome o;
  std::uint64_t multi = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const GeneratedCoding g = random_bidirectional_coding(seed, 64 + seed * 7 % 4000, 2 + seed % 40);
    multi += graph_stats(g.coding).multi_dependent_count;
    const auto want = decompress_oracle(g.coding);
    if (want != bytes_of(g.text)) o.fail("oracle, seed " + std::to_string(seed));
    if (decompress_pj(g.coding, small_budget(256 << 10)) != want) {
      o.fail("pj, seed " + std::to_string(seed));
    }
  }
  if (multi == 0) o.fail("no multi-dependent factors generated");
  if (o.pass) o.detail = std::to_string(multi) + " multi-dependent factors";
  return o;
}

Outcome list_lower_bound() {
  Outcome o;
  for (std::uint64_t m : {10, 50, 100, 200}) {
    const Text t = lower_bound_text(m);
    StreamIndex index = build_stream_index(t, stream::MemoryBudget::unbounded());
    CompressionMetrics metrics;
    pipeline_compress(t, index, 2, stream::MemoryBudget::unbounded(), &metrics);
    if (metrics.max_list_size != m - 2) {
      o.fail("m " + std::to_string(m) + ": |L| " + std::to_string(metrics.max_list_size));
    }
  }
  return o;
}

Outcome pj_iterations() {
  Outcome o;
  for (std::uint64_t d : {1, 2, 8, 100, 1000}) {
    const Factorization f = chain(d, 3);
    PjMetrics m;
    if (decompress_pj(f, stream::MemoryBudget::unbounded(), &m) != decompress_oracle(f)) {
      o.fail("wrong text for depth " + std::to_string(d));
    }
    const std::uint64_t ceil_bound = std::bit_width(d - 1) + 1;
    const std::uint64_t exact = std::bit_width(d);
    const std::uint64_t got = m.iterations.size();
    if (got > ceil_bound || got != exact) {
      o.fail("depth " + std::to_string(d) + ": " + std::to_string(got) + " iterations, expected " +
             std::to_string(exact));
    }
  }
  return o;
}

Outcome compaction() {
  Outcome o;
  Factorization chained(2);
  auto lit = [&](std::string s) { chained.append_literal(std::vector<std::uint8_t>(s.begin(), s.end()), false); };
  lit("bx");
  lit("ab");
  chained.append_reference(10, 2);
  lit("cd");
  chained.append_reference(13, 4);
  lit(std::string("wxyz") + '\0');
  for (const Factorization& g : {compact_im(chained), compact_em(chained, small_budget(64 << 10))}) {
    if (g.factors()[2].src != 14) o.fail("third factor not redirected to the sixth");
    if (decompress_oracle(g) != decompress_oracle(chained)) o.fail("chained coding text changed");
  }
  std::uint64_t strict = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const GeneratedCoding g = random_bidirectional_coding(seed, 200 + seed * 13 % 3000, 24);
    const Factorization c = compact_em(g.coding, small_budget(64 << 10));
    if (c != compact_im(g.coding)) o.fail("compact_em differs from compact_im, seed " + std::to_string(seed));
    if (decompress_oracle(c) != bytes_of(g.text)) o.fail("text changed, seed " + std::to_string(seed));
    if (graph_stats(c).depth > graph_stats(g.coding).depth) {
      o.fail("depth increased, seed " + std::to_string(seed));
    }
    const std::uint64_t before = single_dependent_chain(g.coding);
    const std::uint64_t after = single_dependent_chain(c);
    if (before >= 2) {
      ++strict;
      if (after >= before) o.fail("no strict decrease, seed " + std::to_string(seed));
    } else if (after > before) {
      o.fail("chain grew, seed " + std::to_string(seed));
    }
  }
  if (o.pass) o.detail = std::to_string(strict) + " codings with chains of length >= 2";
  return o;
}

Outcome budget_insensitivity() {
  Outcome o;
  const Text t = Text::from_bytes(corpus::repetitive_text(8, 64ull << 20, 4, 0.0005));
  const std::vector<stream::MemoryBudget> budgets{small_budget(8ull << 20), small_budget(64ull << 20),
                                                  stream::MemoryBudget::unbounded()};
  std::vector<std::vector<std::uint8_t>> files;
  bool spilled = false;
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    CompressionMetrics cm;
    {
      StreamIndex index = build_stream_index(t, budgets[k]);
      files.push_back(encode(pipeline_compress(t, index, 2, budgets[k], &cm)));
    }
    PjMetrics pm;
    const auto text = decompress_pj(decode(files.back()), budgets[k], &pm);
    if (text.size() != t.size() || !std::equal(text.begin(), text.end(), t.bytes().begin())) {
      o.fail("text differs at budget " + std::to_string(k));
    }
    if (k == 0) spilled = cm.spilled() && pm.spilled();
  }
  if (files[0] != files[1] || files[1] != files[2]) o.fail("compressed files differ");
  if (!spilled) o.fail("8 MiB run did not spill");
  if (o.pass) o.detail = "coded size " + std::to_string(files[0].size()) + " bytes";
  return o;
}

Outcome theta_sweep() {
  Outcome o;
  const Text t = Text::from_bytes(corpus::repetitive_text(16, 16ull << 20, 4, 0.002));
  const IndexBundle index = build_index(t);
  std::uint64_t prev_refs = ~0ull;
  std::uint64_t prev_total = 0;
  std::string table;
  for (std::uint64_t theta = 2; theta <= 8; ++theta) {
    const Factorization f = pipeline_compress(t, index, theta, stream::MemoryBudget::unbounded());
    const std::uint64_t refs = f.reference_count();
    const std::uint64_t total = f.factor_count_single_literals();
    if (refs > prev_refs) o.fail("references grew at theta " + std::to_string(theta));
    if (total < prev_total) o.fail("total factors shrank at theta " + std::to_string(theta));
    table += " " + std::to_string(theta) + ":" + std::to_string(refs) + "/" + std::to_string(total);
    prev_refs = refs;
    prev_total = total;
  }
  if (o.pass) o.detail = "theta:refs/total" + table;
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  Outcome list_bound;
  failed += !run(1, "golden running example", 1.0, golden_example);
  failed += !run(2, "factorizer equals the oracle", 120.0, oracle_equivalence);
  failed += !run(3, "round-trip fuzz over three strategies", 600.0,
                 [&] { return round_trip_fuzz(list_bound); });
  failed += !run(4, "bidirectional codings decode", 600.0, generality);
  failed += !run(5, "peak list bounds", 600.0, [&] {
    Outcome o = list_lower_bound();
    if (!list_bound.pass) o.fail(list_bound.detail);
    if (o.pass) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "largest |L| / min(sqrt(n log n), r) on fuzz corpora: %.3f",
                    list_bound.ratio);
      o.detail = buf;
    }
    return o;
  });
  failed += !run(6, "pointer jumping iteration bound", 60.0, pj_iterations);
  failed += !run(7, "compaction", 600.0, compaction);
  failed += !run(8, "budget insensitivity", 1800.0, budget_insensitivity);
  failed += !run(9, "theta sweep shape", 1800.0, theta_sweep);
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
