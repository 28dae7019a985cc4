#pragma once

// Decoding of arbitrary cycle-free bidirectional codings.
//
// Three strategies share the Factorization input: a fixed-point oracle,
// chain compaction (in-core and streamed), and pointer jumping over budgeted
// streams.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "plcpcomp/factorization.hpp"
#include "plcpcomp/streamkit.hpp"
#include "plcpcomp/text_index.hpp"

namespace plcpcomp {

// ---------------------------------------------------------------------------
// Dependency graph

/// A referencing factor addressed by text positions.
struct RefTuple {
  std::uint64_t src = 0;
  std::uint64_t len = 0;
  std::uint64_t dst = 0;

  friend bool operator==(const RefTuple&, const RefTuple&) = default;
};

struct DepEdgeStreams {
  /// Sorted by (src, len, dst).
  stream::TupleStream<RefTuple> requests;
  /// Sorted by dst.
  stream::TupleStream<RefTuple> factors;
};

DepEdgeStreams build_dep_streams(const Factorization& f, const stream::MemoryBudget& budget);

struct DepGraphStats {
  std::uint64_t node_count = 0;
  std::uint64_t reference_count = 0;
  std::uint64_t edge_count = 0;
  std::uint64_t multi_dependent_count = 0;
  std::uint64_t max_out_degree = 0;
  /// Longest chain of references any character follows before it reaches
  /// a literal.
  std::uint64_t depth = 0;
};

/// Throws CodingError if the coding has a cycle.
DepGraphStats graph_stats(const Factorization& f);

/// Number of hops each character needs to reach a literal (0 for literal
/// characters). Throws CodingError on a cycle.
std::vector<std::uint32_t> character_depths(const Factorization& f);

// ---------------------------------------------------------------------------
// Oracle

enum class SweepMode {
  /// Alternating forward/backward in-place sweeps until nothing changes.
  gauss_seidel,
  /// Each round only uses characters resolved in earlier rounds, so the
  /// round count equals the dependency depth.
  jacobi,
};

/// Throws CodingError when a round makes no progress.
std::vector<std::uint8_t> decompress_oracle(const Factorization& f,
                                            SweepMode mode = SweepMode::gauss_seidel,
                                            std::uint64_t* rounds = nullptr);

// ---------------------------------------------------------------------------
// Compaction

/// Redirects every single-dependent reference to the span of its chain's
/// root (a literal or a multi-dependent factor).
Factorization compact_im(const Factorization& f);

struct CompactionMetrics {
  std::uint64_t nodes = 0;
  std::uint64_t single_dependent = 0;
  std::uint64_t rewritten = 0;
  std::uint64_t tree_depth = 0;
  std::uint64_t ranking_rounds = 0;
  std::uint64_t messages = 0;
  std::uint64_t pq_peak = 0;
  stream::IoStats io;
};

/// Same result as compact_im, computed with sorts, scans, Euler-tour list
/// ranking and time-forward processing over budgeted streams.
Factorization compact_em(const Factorization& f, const stream::MemoryBudget& budget,
                         CompactionMetrics* metrics = nullptr);

// ---------------------------------------------------------------------------
// Pointer jumping

struct PjIteration {
  std::uint64_t index = 0;
  std::uint64_t requests = 0;
  std::uint64_t splits = 0;
  std::uint64_t jumps = 0;
  std::uint64_t finalized = 0;
  std::uint64_t pending = 0;
  std::uint64_t pq_peak = 0;
  std::uint64_t pieces = 0;
  stream::IoStats io;
};

struct PjMetrics {
  std::vector<PjIteration> iterations;
  std::uint64_t resolution_tuples = 0;
  stream::IoStats resolution_io;

  bool spilled() const;
  stream::IoStats total_io() const;
};

/// Calls `sink` with consecutive chunks of the decoded text.
void decompress_pj(const Factorization& f, const stream::MemoryBudget& budget,
                   const std::function<void(std::span<const std::uint8_t>)>& sink,
                   PjMetrics* metrics = nullptr);

std::vector<std::uint8_t> decompress_pj(const Factorization& f,
                                        const stream::MemoryBudget& budget,
                                        PjMetrics* metrics = nullptr);

// ---------------------------------------------------------------------------
// Test generator

struct GeneratedCoding {
  Text text;
  Factorization coding;
};

/// A text of length n (sentinel included) and a random cycle-free
/// bidirectional coding of it with references of length 1..max_len that
/// may point left or right and may span several factors.
GeneratedCoding random_bidirectional_coding(std::uint64_t seed, std::uint64_t n,
                                            std::uint64_t max_len);

}  // namespace plcpcomp
