#include "plcpcomp/factorization.hpp"

#include <algorithm>
#include <string>

#include "plcpcomp/errors.hpp"

namespace plcpcomp {

void Factorization::append_literal(std::span<const std::uint8_t> bytes, bool coalesce) {
  if (bytes.empty()) return;
  if (coalesce && !factors_.empty() && !factors_.back().is_reference()) {
    factors_.back().len += bytes.size();
  } else {
    Factor f;
    f.kind = FactorKind::literal;
    f.dst = length_ + 1;
    f.len = bytes.size();
    f.literal_offset = literals_.size();
    factors_.push_back(f);
  }
  literals_.insert(literals_.end(), bytes.begin(), bytes.end());
  length_ += bytes.size();
}

void Factorization::append_reference(std::uint64_t src, std::uint64_t len) {
  Factor f;
  f.kind = FactorKind::reference;
  f.dst = length_ + 1;
  f.len = len;
  f.src = src;
  factors_.push_back(f);
  length_ += len;
}

std::uint64_t Factorization::reference_count() const {
  return static_cast<std::uint64_t>(std::count_if(
      factors_.begin(), factors_.end(), [](const Factor& f) { return f.is_reference(); }));
}

std::uint64_t Factorization::factor_count_single_literals() const {
  std::uint64_t count = 0;
  for (const Factor& f : factors_) count += f.is_reference() ? 1 : f.len;
  return count;
}

void Factorization::validate() const {
  std::uint64_t next = 1;
  for (const Factor& f : factors_) {
    if (f.dst != next || f.len == 0) {
      throw CodingError("factors do not tile the text at position " + std::to_string(next));
    }
    if (f.is_reference()) {
      if (f.src == 0 || f.src + f.len - 1 > length_) {
        throw CodingError("reference at " + std::to_string(f.dst) + " points outside the text");
      }
      if (f.src == f.dst) {
        throw CodingError("reference at " + std::to_string(f.dst) + " points to itself");
      }
    } else if (f.literal_offset + f.len > literals_.size()) {
      throw CodingError("literal at " + std::to_string(f.dst) + " overruns the literal pool");
    }
    next += f.len;
  }
  if (next != length_ + 1) throw CodingError("factors do not cover the text");
}

bool operator==(const Factor& a, const Factor& b) {
  if (a.kind != b.kind || a.dst != b.dst || a.len != b.len) return false;
  return !a.is_reference() || a.src == b.src;
}

bool operator==(const Factorization& a, const Factorization& b) {
  if (a.theta_ != b.theta_ || a.length_ != b.length_ || a.factors_ != b.factors_) {
    return false;
  }
  for (std::size_t i = 0; i < a.factors_.size(); ++i) {
    const Factor& f = a.factors_[i];
    if (f.is_reference()) continue;
    const auto x = a.literal_bytes(f);
    const auto y = b.literal_bytes(b.factors_[i]);
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}

}  // namespace plcpcomp
