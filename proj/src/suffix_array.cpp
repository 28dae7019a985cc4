#include "plcpcomp/suffix_array.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace plcpcomp {
namespace {

// Induced sorting after Nong, Zhang and Chan. `s` is either the byte text
// (level 0) or the reduced string of LMS names stored in the tail of `sa`.
template <class Char, class Index>
class InducedSorter {
 public:
  static constexpr Index kEmpty = std::numeric_limits<Index>::max();

  InducedSorter(const Char* s, Index* sa, Index n, Index alphabet)
      : s_(s), sa_(sa), n_(n), alphabet_(alphabet), type_s_(n), bucket_(alphabet + 1) {}

  void run() {
    if (n_ == 1) {
      sa_[0] = 0;
      return;
    }
    classify();

    // Stage 1: sort LMS substrings.
    bucket_ends();
    std::fill(sa_, sa_ + n_, kEmpty);
    for (Index i = 1; i < n_; ++i) {
      if (is_lms(i)) sa_[--bucket_[s_[i]]] = i;
    }
    induce_l();
    induce_s();

    Index n1 = 0;
    for (Index i = 0; i < n_; ++i) {
      if (is_lms(sa_[i])) sa_[n1++] = sa_[i];
    }

    // Name LMS substrings; equal substrings share a name.
    std::fill(sa_ + n1, sa_ + n_, kEmpty);
    Index names = 0;
    Index prev = kEmpty;
    for (Index i = 0; i < n1; ++i) {
      const Index pos = sa_[i];
      bool diff = false;
      for (Index d = 0; d < n_; ++d) {
        if (prev == kEmpty || pos + d >= n_ || prev + d >= n_ ||
            s_[pos + d] != s_[prev + d] || type_s_[pos + d] != type_s_[prev + d]) {
          diff = true;
          break;
        }
        if (d > 0 && (is_lms(pos + d) || is_lms(prev + d))) break;
      }
      if (diff) {
        ++names;
        prev = pos;
      }
      sa_[n1 + pos / 2] = names - 1;
    }
    for (Index i = n_, j = n_; i > n1; --i) {
      if (sa_[i - 1] != kEmpty) sa_[--j] = sa_[i - 1];
    }

    // Stage 2: sort the reduced string.
    Index* reduced = sa_ + n_ - n1;
    if (names < n1) {
      InducedSorter<Index, Index>(reduced, sa_, n1, names).run();
    } else {
      for (Index i = 0; i < n1; ++i) sa_[reduced[i]] = i;
    }

    // Stage 3: induce the full order from the sorted LMS suffixes.
    bucket_ends();
    for (Index i = 1, j = 0; i < n_; ++i) {
      if (is_lms(i)) reduced[j++] = i;
    }
    for (Index i = 0; i < n1; ++i) sa_[i] = reduced[sa_[i]];
    std::fill(sa_ + n1, sa_ + n_, kEmpty);
    for (Index i = n1; i > 0; --i) {
      const Index j = sa_[i - 1];
      sa_[i - 1] = kEmpty;
      sa_[--bucket_[s_[j]]] = j;
    }
    induce_l();
    induce_s();
  }

 private:
  void classify() {
    type_s_[n_ - 1] = true;
    for (Index i = n_ - 1; i > 0; --i) {
      type_s_[i - 1] = s_[i - 1] < s_[i] || (s_[i - 1] == s_[i] && type_s_[i]);
    }
  }

  bool is_lms(Index i) const {
    return i != kEmpty && i > 0 && i < n_ && type_s_[i] && !type_s_[i - 1];
  }

  void count() {
    std::fill(bucket_.begin(), bucket_.end(), 0);
    for (Index i = 0; i < n_; ++i) ++bucket_[s_[i]];
  }

  void bucket_starts() {
    count();
    Index sum = 0;
    for (auto& b : bucket_) {
      const Index c = b;
      b = sum;
      sum += c;
    }
  }

  void bucket_ends() {
    count();
    Index sum = 0;
    for (auto& b : bucket_) {
      sum += b;
      b = sum;
    }
  }

  void induce_l() {
    bucket_starts();
    for (Index i = 0; i < n_; ++i) {
      const Index p = sa_[i];
      if (p == kEmpty || p == 0) continue;
      if (!type_s_[p - 1]) sa_[bucket_[s_[p - 1]]++] = p - 1;
    }
  }

  void induce_s() {
    bucket_ends();
    for (Index i = n_; i > 0; --i) {
      const Index p = sa_[i - 1];
      if (p == kEmpty || p == 0) continue;
      if (type_s_[p - 1]) sa_[--bucket_[s_[p - 1]]] = p - 1;
    }
  }

  const Char* s_;
  Index* sa_;
  Index n_;
  Index alphabet_;
  std::vector<bool> type_s_;
  std::vector<Index> bucket_;
};

}  // namespace

template <class Index>
std::vector<Index> build_suffix_array(std::span<const std::uint8_t> text) {
  if (text.empty()) return {};
  if (text.size() >= std::numeric_limits<Index>::max() / 2) {
    throw std::length_error("text too long for the suffix array index type");
  }
  std::vector<Index> sa(text.size());
  InducedSorter<std::uint8_t, Index>(text.data(), sa.data(),
                                     static_cast<Index>(text.size()), 256)
      .run();
  return sa;
}

template std::vector<std::uint32_t> build_suffix_array<std::uint32_t>(
    std::span<const std::uint8_t>);
template std::vector<std::uint64_t> build_suffix_array<std::uint64_t>(
    std::span<const std::uint8_t>);

}  // namespace plcpcomp
