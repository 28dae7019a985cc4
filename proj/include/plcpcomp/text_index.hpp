#pragma once

// Suffix array, inverse suffix array, Phi and PLCP of a sentinel-terminated
// text. Positions are 1-based: array element k (0-based) stores the value
// for position or rank k + 1.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "plcpcomp/streamkit.hpp"

namespace plcpcomp {

/// Byte text whose last byte is the sentinel 0, which occurs nowhere else.
class Text {
 public:
  Text() = default;

  /// Appends the sentinel if `raw` does not already end with it. Throws
  /// InputError if a 0 byte occurs anywhere but the last position.
  static Text from_bytes(std::span<const std::uint8_t> raw);
  static Text from_string(std::string_view raw);

  /// Requires `bytes` to end with the single sentinel.
  static Text from_terminated(std::vector<std::uint8_t> bytes);

  std::uint64_t size() const { return bytes_.size(); }
  /// Byte at 1-based position `pos`.
  std::uint8_t at(std::uint64_t pos) const { return bytes_[pos - 1]; }
  std::span<const std::uint8_t> bytes() const { return bytes_; }
  /// Everything but the sentinel.
  std::span<const std::uint8_t> body() const {
    return std::span<const std::uint8_t>(bytes_).first(bytes_.size() - 1);
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

struct IndexBundle {
  std::vector<std::uint64_t> sa;
  std::vector<std::uint64_t> isa;
  /// phi[i] = sa[isa[i] - 1], and sa[n] for the lexicographically smallest
  /// suffix.
  std::vector<std::uint64_t> phi;
  std::vector<std::uint64_t> plcp;
  std::uint64_t bwt_runs = 0;

  std::uint64_t size() const { return sa.size(); }
};

IndexBundle build_index(const Text& text);

/// LCP in suffix-array order: lcp[k] = plcp[sa[k]].
std::vector<std::uint64_t> lcp_from_plcp(const IndexBundle& index);

/// Phi and PLCP as text-order streams, built with 32-bit intermediate
/// arrays when the text allows it. This is what the compression pipeline
/// consumes.
struct StreamIndex {
  std::uint64_t n = 0;
  std::uint64_t bwt_runs = 0;
  stream::TupleStream<std::uint64_t> phi;
  stream::TupleStream<std::uint64_t> plcp;
};

StreamIndex build_stream_index(const Text& text, const stream::MemoryBudget& budget);
StreamIndex stream_index_of(const IndexBundle& index, const stream::MemoryBudget& budget);

/// Little-endian dump: "PLCPIDX1", n, bwt_runs, then sa, isa, phi, plcp.
void save_index(const IndexBundle& index, const std::filesystem::path& path);
IndexBundle load_index(const std::filesystem::path& path);

}  // namespace plcpcomp
