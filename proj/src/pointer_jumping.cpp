#include <algorithm>
#include <bit>
#include <deque>
#include <optional>
#include <string>

#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/errors.hpp"

namespace plcpcomp {

namespace {

/// T[dst..dst+len-1] = T[src..src+len-1]. A final piece copies from
/// literal positions only.
struct Piece {
  std::uint64_t dst : 40;
  std::uint64_t len : 24;
  std::uint64_t src : 40;
  std::uint64_t final : 1;
};
static_assert(sizeof(Piece) == 16);

constexpr std::uint64_t kMaxPosition = (std::uint64_t{1} << 40) - 1;
constexpr std::uint64_t kMaxPieceLength = (std::uint64_t{1} << 24) - 1;

struct Resolution {
  std::uint64_t src;
  std::uint64_t dst;
  std::uint64_t len;
};

// Pieces never share a dst, so both orders are total.
const auto by_dst = [](const Piece& a, const Piece& b) { return a.dst < b.dst; };
const auto by_src = [](const Piece& a, const Piece& b) {
  return a.src != b.src ? a.src < b.src : a.dst < b.dst;
};

/// Forward-only reader of the bytes at literal positions.
class LiteralCursor {
 public:
  explicit LiteralCursor(const Factorization& f) : f_(f) {}

  std::uint8_t at(std::uint64_t pos) {
    const auto& fs = f_.factors();
    while (k_ < fs.size() && fs[k_].end() <= pos) ++k_;
    if (k_ == fs.size() || fs[k_].is_reference() || fs[k_].dst > pos) {
      throw std::logic_error("resolution reads a non-literal position " + std::to_string(pos));
    }
    return f_.literal_pool()[fs[k_].literal_offset + (pos - fs[k_].dst)];
  }

 private:
  const Factorization& f_;
  std::size_t k_ = 0;
};

std::uint64_t ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : std::bit_width(x - 1);
}

}  // namespace

bool PjMetrics::spilled() const { return total_io().spill_files > 0; }

stream::IoStats PjMetrics::total_io() const {
  stream::IoStats s = resolution_io;
  for (const auto& it : iterations) s += it.io;
  return s;
}

void decompress_pj(const Factorization& f, const stream::MemoryBudget& budget,
                   const std::function<void(std::span<const std::uint8_t>)>& sink,
                   PjMetrics* metrics) {
  f.validate();
  budget.validate();
  const std::uint64_t n = f.text_length();
  if (n > kMaxPosition) throw ConfigError("pointer jumping supports texts below 2^40 bytes");
  PjMetrics m;

  // Initially every referencing factor is one pending piece.
  stream::TupleStream<Piece> refs(budget);
  for (const Factor& fac : f.factors()) {
    if (!fac.is_reference()) continue;
    for (std::uint64_t off = 0; off < fac.len; off += kMaxPieceLength) {
      refs.push({fac.dst + off, std::min(kMaxPieceLength, fac.len - off), fac.src + off, 0});
    }
  }
  refs.finalize();
  auto requests = stream::sort_stream(refs, by_src, budget);

  const std::uint64_t limit = ceil_log2(n) + 2;
  while (!requests.empty()) {
    PjIteration it;
    it.index = m.iterations.size() + 1;
    if (it.index > limit) {
      throw CodingError("pointer jumping did not converge after " + std::to_string(limit) +
                        " iterations; the coding is cyclic");
    }
    stream::TupleStream<Piece> produced(budget);
    std::optional<stream::SpillingPriorityQueue<Piece, decltype(by_src)>> split;
    split.emplace(budget, by_src);

    refs.rewind();
    Piece cur{};
    bool have_cur = refs.next(cur);
    auto process = [&](const Piece& r) {
      while (have_cur && cur.dst + cur.len <= r.src) have_cur = refs.next(cur);
      Piece out{r.dst, r.len, r.src, 1};
      if (!have_cur || cur.dst > r.src) {
        // Source starts inside literal text.
        const std::uint64_t gap_end = have_cur ? cur.dst : n + 1;
        out.len = std::min(r.len, gap_end - r.src);
      } else {
        // Source starts inside the piece `cur`: jump through it.
        out.len = std::min(r.len, cur.dst + cur.len - r.src);
        out.src = cur.src + (r.src - cur.dst);
        out.final = cur.final;
        ++it.jumps;
      }
      produced.push(out);
      ++(out.final ? it.finalized : it.pending);
      if (out.len < r.len) {
        split->push({r.dst + out.len, static_cast<std::uint64_t>(r.len - out.len), r.src + out.len, 0});
        ++it.splits;
      }
    };

    requests.rewind();
    Piece r;
    while (true) {
      const Piece* head = requests.peek();
      if (!split->empty() && (head == nullptr || split->top().src < head->src)) {
        process(split->pop());
      } else if (head != nullptr) {
        requests.next(r);
        ++it.requests;
        process(r);
      } else {
        break;
      }
    }

    produced.finalize();
    it.pq_peak = split->peak_size();
    for (const stream::IoStats& s : {requests.stats(), produced.stats(), split->stats()}) {
      it.io += s;
    }
    requests = stream::TupleStream<Piece>(budget);
    split.reset();

    // New pieces replace the pending ones; finished pieces carry over.
    // Both sides are in dst order, so a merge yields the next references.
    auto ordered = stream::sort_stream(std::move(produced), by_dst, budget);
    stream::TupleStream<Piece> next_refs(budget);
    Piece run{};
    bool have_run = false;
    auto append = [&](const Piece& p) {
      if (have_run && run.final && p.final && run.dst + run.len == p.dst &&
          run.src + run.len == p.src && static_cast<std::uint64_t>(run.len + p.len) <= kMaxPieceLength) {
        run.len = run.len + p.len;
        return;
      }
      if (have_run) next_refs.push(run);
      run = p;
      have_run = true;
    };
    auto dst_key = [](const Piece& p) { return p.dst; };
    stream::scan_zip(
        refs, ordered, dst_key, dst_key,
        [&](const Piece& p) {
          if (p.final) append(p);
        },
        append);
    if (have_run) next_refs.push(run);
    next_refs.finalize();
    it.pieces = next_refs.size();
    it.io += refs.stats();
    it.io += ordered.stats();
    refs = std::move(next_refs);
    ordered = stream::TupleStream<Piece>(budget);

    stream::TupleStream<Piece> pending(budget);
    Piece p;
    refs.rewind();
    while (refs.next(p)) {
      if (!p.final) pending.push(p);
    }
    pending.finalize();
    it.io += pending.stats();
    requests = stream::sort_stream(std::move(pending), by_src, budget);
    it.io += requests.stats();
    m.iterations.push_back(it);
  }
  m.resolution_io += requests.stats();

  // Every piece is final now. Expand them against the literal text in
  // source order, in chunks of at most one block.
  const std::uint64_t chunk = budget.block_size;
  stream::TupleStream<Resolution> raw_res(budget);
  refs.rewind();
  Piece piece;
  while (refs.next(piece)) {
    const Piece& p = piece;
    for (std::uint64_t off = 0; off < p.len; off += chunk) {
      raw_res.push({p.src + off, p.dst + off, std::min(chunk, p.len - off)});
    }
  }
  raw_res.finalize();
  m.resolution_io += refs.stats();
  m.resolution_io += raw_res.stats();
  refs = stream::TupleStream<Piece>(budget);
  auto resolutions = stream::sort_stream(
      std::move(raw_res), [](const Resolution& a, const Resolution& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
      }, budget);
  m.resolution_tuples = resolutions.size();

  stream::TupleStream<std::uint64_t> chars(budget);
  {
    LiteralCursor lit(f);
    std::deque<std::uint8_t> window;
    std::uint64_t window_start = 1;
    Resolution res;
    while (resolutions.next(res)) {
      const std::uint64_t window_end = window_start + window.size();
      if (res.src >= window_end) {
        window.clear();
        window_start = res.src;
      } else {
        while (window_start < res.src) {
          window.pop_front();
          ++window_start;
        }
      }
      while (window_start + window.size() < res.src + res.len) {
        window.push_back(lit.at(window_start + window.size()));
      }
      for (std::uint64_t k = 0; k < res.len; ++k) {
        chars.push(((res.dst + k) << 8) | window[k]);
      }
    }
  }
  chars.finalize();
  m.resolution_io += chars.stats();
  auto placed = stream::sort_stream(std::move(chars), std::less<std::uint64_t>(), budget);

  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(chunk, n)));
  auto flush = [&] {
    sink(out);
    out.clear();
  };
  std::uint64_t c = 0;
  for (const Factor& fac : f.factors()) {
    if (fac.is_reference()) {
      for (std::uint64_t k = 0; k < fac.len; ++k) {
        if (!placed.next(c) || (c >> 8) != fac.dst + k) {
          throw std::logic_error("pointer jumping left position " + std::to_string(fac.dst + k) +
                                 " unresolved");
        }
        out.push_back(static_cast<std::uint8_t>(c & 0xff));
        if (out.size() >= chunk) flush();
      }
    } else {
      for (std::uint8_t b : f.literal_bytes(fac)) {
        out.push_back(b);
        if (out.size() >= chunk) flush();
      }
    }
  }
  if (!out.empty()) flush();

  m.resolution_io += resolutions.stats();
  m.resolution_io += placed.stats();
  if (metrics) *metrics = std::move(m);
}

std::vector<std::uint8_t> decompress_pj(const Factorization& f,
                                        const stream::MemoryBudget& budget,
                                        PjMetrics* metrics) {
  std::vector<std::uint8_t> text;
  text.reserve(f.text_length());
  decompress_pj(
      f, budget,
      [&](std::span<const std::uint8_t> part) { text.insert(text.end(), part.begin(), part.end()); },
      metrics);
  return text;
}

}  // namespace plcpcomp
