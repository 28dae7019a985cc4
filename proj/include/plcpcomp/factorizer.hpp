#pragma once

// Streaming plcpcomp factorization: one left-to-right pass over PLCP that
// keeps only the interesting peaks awaiting resolution, followed by the
// sort/merge/substitute pipeline that turns (dst, len) pairs into a coding.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "plcpcomp/factorization.hpp"
#include "plcpcomp/streamkit.hpp"
#include "plcpcomp/text_index.hpp"

namespace plcpcomp {

struct PeakEntry {
  std::uint64_t pos = 0;
  std::uint64_t val = 0;
};

/// Interesting peaks left of the current candidate, ascending in both
/// position and value.
class PeakList {
 public:
  /// Throws std::logic_error if the ordering invariant would break.
  void push_back(PeakEntry e);
  void clear() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t max_size() const { return max_size_; }
  PeakEntry& operator[](std::size_t i) { return entries_[i]; }
  const PeakEntry& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<PeakEntry> entries_;
  std::size_t max_size_ = 0;
};

struct FactorPair {
  std::uint64_t dst = 0;
  std::uint64_t len = 0;

  friend bool operator==(const FactorPair&, const FactorPair&) = default;
  friend auto operator<=>(const FactorPair&, const FactorPair&) = default;
};

struct FactorTriple {
  std::uint64_t dst = 0;
  std::uint64_t src = 0;
  std::uint64_t len = 0;

  friend bool operator==(const FactorTriple&, const FactorTriple&) = default;
};

/// Resolves the peaks of `list` after the factor (dst, len) was created at
/// the maximal peak `dst`. Every entry is either factored, swallowed by a
/// factor or dropped, so the list is empty afterwards.
void process_peak_list(PeakList& list, std::uint64_t dst, std::uint64_t len,
                       std::uint64_t theta,
                       const std::function<void(FactorPair)>& emit);

/// Push-driven factorizer. Feed PLCP values in text order; factors are
/// reported in discovery order.
class StreamFactorizer {
 public:
  using Sink = std::function<void(FactorPair)>;

  struct Observer {
    virtual ~Observer() = default;
    virtual void on_peak(std::uint64_t pos, std::uint64_t val, bool interesting) = 0;
    virtual void on_maximal(std::uint64_t pos) = 0;
  };

  StreamFactorizer(std::uint64_t theta, Sink sink, Observer* observer = nullptr);

  void push(std::uint64_t plcp_value);

  std::uint64_t position() const { return pos_; }
  std::size_t max_list_size() const { return list_.max_size(); }
  std::uint64_t factors_emitted() const { return emitted_; }

 private:
  void emit(FactorPair p);

  std::uint64_t theta_;
  Sink sink_;
  Observer* observer_;
  PeakList list_;
  PeakEntry head_{};
  bool has_head_ = false;
  std::uint64_t segment_start_ = 1;
  std::uint64_t prev_ = 0;
  std::uint64_t pos_ = 0;
  std::uint64_t emitted_ = 0;
};

/// Per-position peak classification at scan time.
struct PeakEvent {
  std::uint64_t pos = 0;
  std::uint64_t plcp = 0;
  bool interesting = false;
  bool maximal = false;

  friend bool operator==(const PeakEvent&, const PeakEvent&) = default;
};

/// Events for every peak, in position order.
std::vector<PeakEvent> detect_peaks(const std::vector<std::uint64_t>& plcp,
                                    std::uint64_t theta);

struct StreamFactorizeResult {
  stream::TupleStream<FactorPair> pairs;
  std::size_t max_list_size = 0;
};

StreamFactorizeResult stream_factorize(stream::TupleStream<std::uint64_t>& plcp,
                                       std::uint64_t theta,
                                       const stream::MemoryBudget& budget);

std::vector<FactorPair> stream_factorize(const std::vector<std::uint64_t>& plcp,
                                         std::uint64_t theta,
                                         std::size_t* max_list_size = nullptr);

struct StageStats {
  std::string name;
  stream::IoStats io;
};

struct CompressionMetrics {
  std::uint64_t n = 0;
  std::uint64_t theta = 0;
  std::uint64_t factors = 0;
  std::uint64_t references = 0;
  std::uint64_t max_list_size = 0;
  std::uint64_t bwt_runs = 0;
  /// PLCP items read after the first stage finished; stays zero.
  std::uint64_t plcp_rereads = 0;
  std::vector<StageStats> stages;

  bool spilled() const;
};

/// Factorize, sort pairs by dst, attach Phi sources, substitute into the
/// text. Literal runs are coalesced.
Factorization pipeline_compress(const Text& text, StreamIndex& index,
                                std::uint64_t theta, const stream::MemoryBudget& budget,
                                CompressionMetrics* metrics = nullptr);

Factorization pipeline_compress(const Text& text, const IndexBundle& index,
                                std::uint64_t theta, const stream::MemoryBudget& budget,
                                CompressionMetrics* metrics = nullptr);

/// T = F_m ... F_1 with F_m = s_m and F_i = s_i F_{i+1} s_i over m distinct
/// ascending symbols; |T| = m^2 before the sentinel.
Text lower_bound_text(std::uint64_t m);

void check_theta(std::uint64_t theta);

}  // namespace plcpcomp
