#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace plcpcomp {

enum class FactorKind : std::uint8_t { literal, reference };

/// One factor of a coding. Positions are 1-based. A reference copies
/// T[src..src+len-1] to T[dst..dst+len-1]; a literal stores its bytes in the
/// owning Factorization's literal pool starting at literal_offset.
struct Factor {
  FactorKind kind = FactorKind::literal;
  std::uint64_t dst = 0;
  std::uint64_t len = 0;
  std::uint64_t src = 0;
  std::uint64_t literal_offset = 0;

  bool is_reference() const { return kind == FactorKind::reference; }
  std::uint64_t end() const { return dst + len; }
};

/// A bidirectional coding of a text of length n, factors in text order.
class Factorization {
 public:
  Factorization() = default;
  explicit Factorization(std::uint64_t theta) : theta_(theta) {}

  /// Appends a literal; merges it into a directly preceding literal when
  /// `coalesce` is set.
  void append_literal(std::span<const std::uint8_t> bytes, bool coalesce = true);
  void append_reference(std::uint64_t src, std::uint64_t len);

  std::uint64_t text_length() const { return length_; }
  std::uint64_t theta() const { return theta_; }
  void set_theta(std::uint64_t theta) { theta_ = theta; }

  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<Factor>& mutable_factors() { return factors_; }
  const std::vector<std::uint8_t>& literal_pool() const { return literals_; }

  std::span<const std::uint8_t> literal_bytes(const Factor& f) const {
    return std::span<const std::uint8_t>(literals_).subspan(f.literal_offset, f.len);
  }

  std::uint64_t reference_count() const;
  std::uint64_t literal_count() const { return factors_.size() - reference_count(); }
  /// Literal characters counted one factor each, as in the scheme's
  /// original counting.
  std::uint64_t factor_count_single_literals() const;

  /// Throws CodingError unless factors tile [1..n] and every reference lies
  /// inside the text and differs from its destination.
  void validate() const;

  friend bool operator==(const Factorization& a, const Factorization& b);

 private:
  std::uint64_t theta_ = 0;
  std::uint64_t length_ = 0;
  std::vector<Factor> factors_;
  std::vector<std::uint8_t> literals_;
};

bool operator==(const Factor& a, const Factor& b);

}  // namespace plcpcomp
