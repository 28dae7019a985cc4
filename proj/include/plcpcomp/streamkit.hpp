#pragma once

// Budgeted streaming primitives: sequential tuple vectors, a stable
// external merge sorter, a merging zip and a spilling priority queue.
//
// Every container keeps at most its share of MemoryBudget::bytes_in_core in
// memory and moves the rest to anonymous spill files under tmp_dir. Records
// are written as their native object representation; the toolkit only
// supports little-endian hosts, so spill files hold fixed-width
// little-endian records.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "plcpcomp/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "spill files and coded files assume a little-endian host");

namespace plcpcomp::stream {

/// Directory used for spill files when a budget does not name one:
/// $PLCPCOMP_TMP if set, otherwise the system temporary directory.
std::filesystem::path default_tmp_dir();

struct MemoryBudget {
  static constexpr std::uint64_t kMinBlockSize = 4096;
  static constexpr std::uint64_t kUnlimited =
      std::numeric_limits<std::uint64_t>::max();

  std::uint64_t bytes_in_core = 64ull << 20;
  std::filesystem::path tmp_dir;  // empty: default_tmp_dir()
  std::uint64_t block_size = 64ull << 10;

  static MemoryBudget unbounded();
  /// Block size shrinks to bytes / 16 (at least 4096) for small budgets.
  static MemoryBudget of_bytes(std::uint64_t bytes);

  bool unlimited() const { return bytes_in_core == kUnlimited; }

  /// Throws ConfigError unless block_size >= 4096 and
  /// bytes_in_core >= 4 * block_size.
  void validate() const;

  std::filesystem::path spill_dir() const;

  /// In-core allowance of one TupleStream or priority queue.
  std::uint64_t stream_share() const {
    return unlimited() ? kUnlimited : bytes_in_core / 4;
  }
  /// Bytes of one sorted run during run formation.
  std::uint64_t run_bytes() const {
    return unlimited() ? kUnlimited : bytes_in_core / 2;
  }
  /// Number of runs merged at once (the M/B analogue).
  std::size_t fan_in() const {
    if (unlimited()) return 1024;
    return static_cast<std::size_t>(
        std::max<std::uint64_t>(2, bytes_in_core / (2 * block_size)));
  }
};

/// Logical transfer counters. Blocks are counted only for data that moves
/// to or from spill files; in-core traffic counts items but no blocks.
struct IoStats {
  std::uint64_t items_written = 0;
  std::uint64_t items_read = 0;
  std::uint64_t blocks_written = 0;
  std::uint64_t blocks_read = 0;
  std::uint64_t spill_files = 0;

  std::uint64_t blocks() const { return blocks_written + blocks_read; }

  IoStats& operator+=(const IoStats& other) {
    items_written += other.items_written;
    items_read += other.items_read;
    blocks_written += other.blocks_written;
    blocks_read += other.blocks_read;
    spill_files += other.spill_files;
    return *this;
  }
};

/// Anonymous temporary file, removed when the object is destroyed.
class SpillFile {
 public:
  explicit SpillFile(const std::filesystem::path& dir);
  ~SpillFile();

  SpillFile(const SpillFile&) = delete;
  SpillFile& operator=(const SpillFile&) = delete;

  void write(const void* data, std::size_t bytes);
  /// Returns the number of bytes actually read.
  std::size_t read(void* data, std::size_t bytes);
  void rewind();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::FILE* fp_ = nullptr;
  std::filesystem::path path_;
};

/// Append-then-read sequence of fixed-width records.
///
/// Writing: push() until finalize(). Reading: next()/peek() from the read
/// cursor; rewind() restarts. Items stay in memory until the stream's share
/// of the budget is exceeded, after which everything lives in a spill file
/// and only one block is buffered.
template <class T>
class TupleStream {
  static_assert(std::is_trivially_copyable_v<T>,
                "stream items must be fixed-width records");

 public:
  explicit TupleStream(MemoryBudget budget = MemoryBudget::unbounded())
      : TupleStream(std::move(budget), false) {}

  /// A stream that writes every block to its spill file.
  static TupleStream on_disk(MemoryBudget budget) {
    return TupleStream(std::move(budget), true);
  }

  TupleStream(TupleStream&&) noexcept = default;
  TupleStream& operator=(TupleStream&&) noexcept = default;
  TupleStream(const TupleStream&) = delete;
  TupleStream& operator=(const TupleStream&) = delete;

  void push(const T& item) {
    if (finalized_) throw std::logic_error("push on a finalized TupleStream");
    buffer_.push_back(item);
    ++size_;
    ++stats_.items_written;
    if (!file_) {
      if (buffer_.size() > in_core_limit_) {
        open_spill();
        flush_buffer();
      }
    } else if (buffer_.size() >= block_items_) {
      flush_buffer();
    }
  }

  void finalize() {
    if (finalized_) return;
    finalized_ = true;
    if (file_) {
      flush_buffer();
      buffer_.shrink_to_fit();
    }
    rewind();
  }

  bool finalized() const { return finalized_; }
  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool spilled() const { return file_ != nullptr; }
  const MemoryBudget& budget() const { return budget_; }
  const IoStats& stats() const { return stats_; }
  void add_stats(const IoStats& extra) { stats_ += extra; }

  void rewind() {
    require_finalized();
    consumed_ = 0;
    if (file_) {
      file_->rewind();
      buffer_.clear();
      buf_pos_ = 0;
    } else {
      buf_pos_ = 0;
    }
  }

  /// Next unread item, or nullptr at the end. The pointer stays valid until
  /// the next call to next() or rewind().
  const T* peek() {
    require_finalized();
    if (consumed_ >= size_) return nullptr;
    if (file_ && buf_pos_ >= buffer_.size()) fill();
    return &buffer_[buf_pos_];
  }

  bool next(T& out) {
    const T* item = peek();
    if (item == nullptr) return false;
    out = *item;
    ++buf_pos_;
    ++consumed_;
    ++stats_.items_read;
    return true;
  }

  std::uint64_t remaining() const { return size_ - consumed_; }

  /// Reads the whole stream from the start; leaves the cursor at the end.
  std::vector<T> to_vector() {
    rewind();
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(size_));
    T item;
    while (next(item)) out.push_back(item);
    return out;
  }

  static TupleStream from_vector(const std::vector<T>& items,
                                 MemoryBudget budget) {
    TupleStream s(std::move(budget));
    for (const T& item : items) s.push(item);
    s.finalize();
    return s;
  }

  /// Like from_vector, but takes over the storage when it fits in core.
  static TupleStream from_vector(std::vector<T>&& items, MemoryBudget budget) {
    TupleStream s(std::move(budget));
    if (items.size() > s.in_core_limit_) return from_vector(items, s.budget_);
    s.size_ = items.size();
    s.stats_.items_written = items.size();
    s.buffer_ = std::move(items);
    s.finalize();
    return s;
  }

  /// Moves the items of a finalized in-core stream out and leaves the
  /// stream empty. Returns nullopt for spilled streams.
  std::optional<std::vector<T>> take_in_core() {
    require_finalized();
    if (file_) return std::nullopt;
    std::vector<T> items = std::move(buffer_);
    buffer_.clear();
    stats_.items_read += items.size();
    size_ = 0;
    rewind();
    return items;
  }

 private:
  TupleStream(MemoryBudget budget, bool force_disk)
      : budget_(std::move(budget)) {
    if (sizeof(T) > budget_.block_size) {
      throw ConfigError("record of " + std::to_string(sizeof(T)) +
                        " bytes exceeds block size");
    }
    block_items_ = static_cast<std::size_t>(budget_.block_size / sizeof(T));
    const std::uint64_t share = budget_.stream_share();
    in_core_limit_ =
        share == MemoryBudget::kUnlimited
            ? std::numeric_limits<std::size_t>::max()
            : std::max<std::size_t>(block_items_,
                                    static_cast<std::size_t>(share / sizeof(T)));
    if (force_disk) {
      open_spill();
    }
  }

  void require_finalized() const {
    if (!finalized_) throw std::logic_error("TupleStream read before finalize");
  }

  void open_spill() {
    file_ = std::make_unique<SpillFile>(budget_.spill_dir());
    ++stats_.spill_files;
  }

  void flush_buffer() {
    if (buffer_.empty()) return;
    const std::size_t bytes = buffer_.size() * sizeof(T);
    file_->write(buffer_.data(), bytes);
    stats_.blocks_written += (bytes + budget_.block_size - 1) / budget_.block_size;
    buffer_.clear();
  }

  void fill() {
    const std::size_t want = static_cast<std::size_t>(
        std::min<std::uint64_t>(block_items_, size_ - consumed_));
    buffer_.resize(want);
    const std::size_t got = file_->read(buffer_.data(), want * sizeof(T));
    if (got != want * sizeof(T)) throw IoError("short read from spill file");
    buf_pos_ = 0;
    ++stats_.blocks_read;
  }

  MemoryBudget budget_;
  std::vector<T> buffer_;
  std::unique_ptr<SpillFile> file_;
  std::uint64_t size_ = 0;
  std::uint64_t consumed_ = 0;
  std::size_t buf_pos_ = 0;
  std::size_t block_items_ = 1;
  std::size_t in_core_limit_ = 0;
  bool finalized_ = false;
  IoStats stats_;
};

/// Tournament of losers over k streams; yields the minimum head, ties going
/// to the lower source index (which keeps merges of ordered runs stable).
template <class T, class Less>
class LoserTree {
 public:
  LoserTree(std::vector<TupleStream<T>*> sources, Less less)
      : sources_(std::move(sources)), less_(std::move(less)) {
    const std::size_t k = sources_.size();
    heads_.resize(k);
    alive_.assign(k, false);
    for (std::size_t i = 0; i < k; ++i) load(i);
    tree_.assign(std::max<std::size_t>(k, 1), 0);
    if (k > 0) tree_[0] = build(1);
  }

  bool empty() const { return sources_.empty() || !alive_[tree_[0]]; }
  const T& top() const { return heads_[tree_[0]]; }
  std::size_t top_source() const { return tree_[0]; }

  void pop() {
    std::size_t winner = tree_[0];
    load(winner);
    const std::size_t k = sources_.size();
    for (std::size_t node = (winner + k) / 2; node > 0; node /= 2) {
      if (beats(tree_[node], winner)) std::swap(tree_[node], winner);
    }
    tree_[0] = winner;
  }

 private:
  void load(std::size_t i) {
    alive_[i] = sources_[i]->next(heads_[i]);
  }

  bool beats(std::size_t a, std::size_t b) const {
    if (!alive_[a]) return false;
    if (!alive_[b]) return true;
    if (less_(heads_[a], heads_[b])) return true;
    if (less_(heads_[b], heads_[a])) return false;
    return a < b;
  }

  // Leaves are nodes k..2k-1; internal node i stores the loser of its match.
  std::size_t build(std::size_t node) {
    const std::size_t k = sources_.size();
    if (node >= k) return node - k;
    const std::size_t left = build(2 * node);
    const std::size_t right = build(2 * node + 1);
    if (beats(left, right)) {
      tree_[node] = right;
      return left;
    }
    tree_[node] = left;
    return right;
  }

  std::vector<TupleStream<T>*> sources_;
  Less less_;
  std::vector<T> heads_;
  std::vector<bool> alive_;
  std::vector<std::size_t> tree_;
};

struct SortReport {
  std::uint64_t items = 0;
  std::uint64_t runs = 0;
  std::uint64_t merge_passes = 0;
  std::size_t fan_in = 0;
  IoStats io;
};

namespace detail {

template <class T, class Less>
TupleStream<T> merge_into(std::vector<TupleStream<T>*> sources, const Less& less,
                          TupleStream<T> out) {
  LoserTree<T, Less> tree(std::move(sources), less);
  while (!tree.empty()) {
    out.push(tree.top());
    tree.pop();
  }
  out.finalize();
  return out;
}

}  // namespace detail

/// Stable external merge sort. Reads `input` from its start and returns a
/// new finalized stream ordered by `less`. The returned stream's io stats
/// include the traffic of all intermediate runs.
template <class T, class Less>
TupleStream<T> sort_stream(TupleStream<T>& input, Less less,
                           const MemoryBudget& budget,
                           SortReport* report = nullptr) {
  budget.validate();
  if (sizeof(T) > budget.block_size) {
    throw ConfigError("record width exceeds the block size of the budget");
  }
  input.rewind();

  SortReport rep;
  rep.items = input.size();
  rep.fan_in = budget.fan_in();

  const std::uint64_t run_items_u64 =
      budget.unlimited()
          ? std::max<std::uint64_t>(input.size(), 1)
          : std::max<std::uint64_t>(budget.block_size / sizeof(T),
                                    budget.run_bytes() / sizeof(T));
  const std::size_t run_items = static_cast<std::size_t>(
      std::min<std::uint64_t>(run_items_u64, std::max<std::uint64_t>(input.size(), 1)));

  std::vector<T> run;
  run.reserve(run_items);
  std::vector<TupleStream<T>> runs;
  T item;
  bool single_run = false;
  while (true) {
    run.clear();
    while (run.size() < run_items && input.next(item)) run.push_back(item);
    if (run.empty()) break;
    std::stable_sort(run.begin(), run.end(), less);
    if (runs.empty() && input.remaining() == 0) {
      single_run = true;
      break;
    }
    auto r = TupleStream<T>::on_disk(budget);
    for (const T& x : run) r.push(x);
    r.finalize();
    runs.push_back(std::move(r));
  }

  TupleStream<T> out(budget);
  if (single_run || runs.empty()) {
    for (const T& x : run) out.push(x);
    out.finalize();
    rep.runs = run.empty() ? 0 : 1;
    rep.io = out.stats();
    if (report) *report = rep;
    return out;
  }
  std::vector<T>().swap(run);
  rep.runs = runs.size();

  IoStats run_io;
  const std::size_t fan_in = rep.fan_in;
  while (runs.size() > fan_in) {
    std::vector<TupleStream<T>> next_level;
    for (std::size_t i = 0; i < runs.size(); i += fan_in) {
      const std::size_t end = std::min(runs.size(), i + fan_in);
      std::vector<TupleStream<T>*> group;
      for (std::size_t j = i; j < end; ++j) group.push_back(&runs[j]);
      next_level.push_back(
          detail::merge_into(group, less, TupleStream<T>::on_disk(budget)));
      for (std::size_t j = i; j < end; ++j) run_io += runs[j].stats();
    }
    runs = std::move(next_level);
    ++rep.merge_passes;
  }
  std::vector<TupleStream<T>*> group;
  for (auto& r : runs) group.push_back(&r);
  out = detail::merge_into(group, less, std::move(out));
  ++rep.merge_passes;
  for (auto& r : runs) run_io += r.stats();
  out.add_stats(run_io);
  rep.io = out.stats();
  if (report) *report = rep;
  return out;
}

/// Consuming variant: an in-core input that fits one run is sorted in
/// place instead of copied, and the order of equal items is unspecified.
/// The input is left empty.
template <class T, class Less>
TupleStream<T> sort_stream(TupleStream<T>&& input, Less less,
                           const MemoryBudget& budget,
                           SortReport* report = nullptr) {
  budget.validate();
  const std::uint64_t run_items =
      budget.unlimited() ? MemoryBudget::kUnlimited : budget.run_bytes() / sizeof(T);
  if (!input.spilled() && input.size() <= run_items) {
    std::vector<T> items = std::move(*input.take_in_core());
    std::sort(items.begin(), items.end(), less);
    SortReport rep;
    rep.items = items.size();
    rep.fan_in = budget.fan_in();
    rep.runs = items.empty() ? 0 : 1;
    TupleStream<T> out = TupleStream<T>::from_vector(std::move(items), budget);
    rep.io = out.stats();
    if (report) *report = rep;
    return out;
  }
  TupleStream<T> out = sort_stream(input, less, budget, report);
  input = TupleStream<T>(input.budget());
  input.finalize();
  return out;
}

namespace detail {

template <class Key, class Item>
auto invoke_key(const Key& key, const Item& item, std::uint64_t ordinal) {
  if constexpr (std::is_invocable_v<const Key&, const Item&, std::uint64_t>) {
    return key(item, ordinal);
  } else {
    return key(item);
  }
}

}  // namespace detail

/// Visits the items of two sorted streams in merged key order; on ties the
/// item of `a` comes first. Keys are computed from the item, or from the
/// item and its 1-based ordinal in its stream when the key function accepts
/// two arguments (useful for streams stored in position order). Both
/// streams are rewound first. Throws std::logic_error when either stream's
/// keys decrease.
template <class A, class B, class KeyA, class KeyB, class OnA, class OnB>
void scan_zip(TupleStream<A>& a, TupleStream<B>& b, KeyA key_a, KeyB key_b,
              OnA on_a, OnB on_b) {
  a.rewind();
  b.rewind();
  using KA = decltype(detail::invoke_key(key_a, std::declval<const A&>(), 0));
  using KB = decltype(detail::invoke_key(key_b, std::declval<const B&>(), 0));
  std::uint64_t ord_a = 0;
  std::uint64_t ord_b = 0;
  A item_a{};
  B item_b{};
  bool have_a = a.next(item_a);
  bool have_b = b.next(item_b);
  KA ka{};
  KB kb{};
  if (have_a) ka = detail::invoke_key(key_a, item_a, ++ord_a);
  if (have_b) kb = detail::invoke_key(key_b, item_b, ++ord_b);
  while (have_a || have_b) {
    const bool take_a = have_a && (!have_b || !(kb < ka));
    if (take_a) {
      on_a(item_a);
      KA prev = ka;
      have_a = a.next(item_a);
      if (have_a) {
        ka = detail::invoke_key(key_a, item_a, ++ord_a);
        if (ka < prev) throw std::logic_error("scan_zip: first stream is not sorted");
      }
    } else {
      on_b(item_b);
      KB prev = kb;
      have_b = b.next(item_b);
      if (have_b) {
        kb = detail::invoke_key(key_b, item_b, ++ord_b);
        if (kb < prev) throw std::logic_error("scan_zip: second stream is not sorted");
      }
    }
  }
}

/// Min-priority queue that moves sorted batches of its contents to spill
/// files once its in-core share is full. Equal items leave the queue in
/// insertion order.
template <class T, class Less = std::less<T>>
class SpillingPriorityQueue {
 public:
  explicit SpillingPriorityQueue(MemoryBudget budget, Less less = Less())
      : budget_(std::move(budget)), less_(std::move(less)) {
    const std::uint64_t share = budget_.stream_share();
    capacity_ = share == MemoryBudget::kUnlimited
                    ? std::numeric_limits<std::size_t>::max()
                    : std::max<std::size_t>(
                          64, static_cast<std::size_t>(share / sizeof(Entry)));
  }

  void push(const T& item) {
    if (heap_.size() >= capacity_) spill();
    heap_.push_back(Entry{item, seq_++});
    std::push_heap(heap_.begin(), heap_.end(), heap_order());
    ++size_;
    peak_size_ = std::max(peak_size_, size_);
  }

  bool empty() const { return size_ == 0; }
  std::uint64_t size() const { return size_; }
  std::uint64_t peak_size() const { return peak_size_; }
  std::uint64_t spills() const { return spills_; }

  IoStats stats() const {
    IoStats s = retired_;
    for (const auto& r : runs_) s += r.stats();
    return s;
  }

  const T& top() {
    const Source src = min_source();
    return src.run < 0 ? heap_.front().item : runs_[src.run].peek()->item;
  }

  T pop() {
    const Source src = min_source();
    T out;
    if (src.run < 0) {
      std::pop_heap(heap_.begin(), heap_.end(), heap_order());
      out = heap_.back().item;
      heap_.pop_back();
    } else {
      Entry e;
      runs_[src.run].next(e);
      out = e.item;
      if (runs_[src.run].remaining() == 0) {
        retired_ += runs_[src.run].stats();
        runs_.erase(runs_.begin() + src.run);
      }
    }
    --size_;
    return out;
  }

 private:
  struct Entry {
    T item;
    std::uint64_t seq;
  };

  struct Source {
    int run;  // -1: in-core heap
  };

  bool entry_less(const Entry& a, const Entry& b) const {
    if (less_(a.item, b.item)) return true;
    if (less_(b.item, a.item)) return false;
    return a.seq < b.seq;
  }

  auto heap_order() const {
    return [this](const Entry& a, const Entry& b) { return entry_less(b, a); };
  }

  Source min_source() {
    if (size_ == 0) throw std::logic_error("top/pop on an empty priority queue");
    Source best{-1};
    const Entry* best_entry = heap_.empty() ? nullptr : &heap_.front();
    for (std::size_t i = 0; i < runs_.size(); ++i) {
      const Entry* head = runs_[i].peek();
      if (head && (!best_entry || entry_less(*head, *best_entry))) {
        best_entry = head;
        best.run = static_cast<int>(i);
      }
    }
    return best;
  }

  void spill() {
    std::sort(heap_.begin(), heap_.end(),
              [this](const Entry& a, const Entry& b) { return entry_less(a, b); });
    auto run = TupleStream<Entry>::on_disk(budget_);
    for (const Entry& e : heap_) run.push(e);
    run.finalize();
    heap_.clear();
    runs_.push_back(std::move(run));
    ++spills_;
    if (runs_.size() > budget_.fan_in()) compact_runs();
  }

  void compact_runs() {
    std::vector<TupleStream<Entry>*> group;
    for (auto& r : runs_) group.push_back(&r);
    auto cmp = [this](const Entry& a, const Entry& b) { return entry_less(a, b); };
    auto merged =
        detail::merge_into(group, cmp, TupleStream<Entry>::on_disk(budget_));
    for (auto& r : runs_) retired_ += r.stats();
    runs_.clear();
    runs_.push_back(std::move(merged));
  }

  MemoryBudget budget_;
  Less less_;
  std::vector<Entry> heap_;
  std::vector<TupleStream<Entry>> runs_;
  std::size_t capacity_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t size_ = 0;
  std::uint64_t peak_size_ = 0;
  std::uint64_t spills_ = 0;
  IoStats retired_;
};

}  // namespace plcpcomp::stream
