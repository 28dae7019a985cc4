#include "plcpcomp/factorizer.hpp"

#include <algorithm>
#include <stdexcept>

#include "plcpcomp/errors.hpp"

namespace plcpcomp {

void check_theta(std::uint64_t theta) {
  if (theta < 2) throw ConfigError("theta must be at least 2");
}

void PeakList::push_back(PeakEntry e) {
  if (!entries_.empty() &&
      (entries_.back().pos >= e.pos || entries_.back().val >= e.val)) {
    throw std::logic_error("peak list must ascend in position and value");
  }
  entries_.push_back(e);
  max_size_ = std::max(max_size_, entries_.size());
}

void process_peak_list(PeakList& list, std::uint64_t dst, std::uint64_t len,
                       std::uint64_t theta,
                       const std::function<void(FactorPair)>& emit) {
  // Rule (D) for the new factor, walking from the tail.
  for (std::size_t k = list.size(); k > 0 && list[k - 1].pos + len >= dst; --k) {
    list[k - 1].val = std::min(list[k - 1].val, dst - list[k - 1].pos);
  }

  // The effective value min(val, cap - pos) rises then falls along the
  // prefix [0, hi), so its leftmost maximum sits at the crossover.
  std::uint64_t cap = dst;
  std::size_t hi = list.size();
  while (hi > 0) {
    std::size_t lo = 0;
    std::size_t up = hi;
    while (lo < up) {
      const std::size_t mid = lo + (up - lo) / 2;
      if (list[mid].val >= cap - list[mid].pos) {
        up = mid;
      } else {
        lo = mid + 1;
      }
    }
    std::size_t best = lo;
    std::uint64_t eff = 0;
    if (lo > 0) {
      best = lo - 1;
      eff = list[lo - 1].val;
    }
    if (lo < hi && cap - list[lo].pos > eff) {
      best = lo;
      eff = cap - list[lo].pos;
    }
    if (eff < theta) break;

    const std::uint64_t m = list[best].pos;
    emit({m, eff});
    // The part of [m, cap) not covered by the new factor is the tail of a
    // swallowed peak's range and becomes one factor on its own.
    const std::uint64_t rest = m + eff;
    if (rest < cap && cap - rest >= theta) emit({rest, cap - rest});
    hi = best;
    cap = m;
  }
  list.clear();
}

StreamFactorizer::StreamFactorizer(std::uint64_t theta, Sink sink, Observer* observer)
    : theta_(theta), sink_(std::move(sink)), observer_(observer) {
  check_theta(theta);
}

void StreamFactorizer::emit(FactorPair p) {
  ++emitted_;
  sink_(p);
}

void StreamFactorizer::push(std::uint64_t v) {
  const std::uint64_t i = ++pos_;
  const bool peak = v >= theta_ && (i == segment_start_ || prev_ < v);
  prev_ = v;
  if (peak) {
    bool interesting = false;
    if (!has_head_) {
      head_ = {i, v};
      has_head_ = true;
      interesting = true;
    } else if (v > head_.val) {
      list_.push_back(head_);
      head_ = {i, v};
      interesting = true;
    }
    if (observer_) observer_->on_peak(i, v, interesting);
  }
  if (has_head_ && i == head_.pos + head_.val - 1) {
    if (observer_) observer_->on_maximal(head_.pos);
    emit({head_.pos, head_.val});
    process_peak_list(list_, head_.pos, head_.val, theta_,
                      [this](FactorPair p) { emit(p); });
    has_head_ = false;
    segment_start_ = i + 1;
  }
}

namespace {

class PeakRecorder : public StreamFactorizer::Observer {
 public:
  void on_peak(std::uint64_t pos, std::uint64_t val, bool interesting) override {
    events.push_back({pos, val, interesting, false});
    if (interesting) index_of_head = events.size() - 1;
  }
  void on_maximal(std::uint64_t pos) override {
    if (events[index_of_head].pos != pos) throw std::logic_error("maximal peak is not the head");
    events[index_of_head].maximal = true;
  }

  std::vector<PeakEvent> events;
  std::size_t index_of_head = 0;
};

}  // namespace

std::vector<PeakEvent> detect_peaks(const std::vector<std::uint64_t>& plcp,
                                    std::uint64_t theta) {
  PeakRecorder recorder;
  StreamFactorizer f(theta, [](FactorPair) {}, &recorder);
  for (std::uint64_t v : plcp) f.push(v);
  return std::move(recorder.events);
}

StreamFactorizeResult stream_factorize(stream::TupleStream<std::uint64_t>& plcp,
                                       std::uint64_t theta,
                                       const stream::MemoryBudget& budget) {
  StreamFactorizeResult out{stream::TupleStream<FactorPair>(budget), 0};
  StreamFactorizer f(theta, [&](FactorPair p) { out.pairs.push(p); });
  plcp.rewind();
  std::uint64_t v = 0;
  while (plcp.next(v)) f.push(v);
  out.pairs.finalize();
  out.max_list_size = f.max_list_size();
  return out;
}

std::vector<FactorPair> stream_factorize(const std::vector<std::uint64_t>& plcp,
                                         std::uint64_t theta,
                                         std::size_t* max_list_size) {
  std::vector<FactorPair> out;
  StreamFactorizer f(theta, [&](FactorPair p) { out.push_back(p); });
  for (std::uint64_t v : plcp) f.push(v);
  if (max_list_size) *max_list_size = f.max_list_size();
  return out;
}

bool CompressionMetrics::spilled() const {
  return std::any_of(stages.begin(), stages.end(),
                     [](const StageStats& s) { return s.io.spill_files > 0; });
}

Factorization pipeline_compress(const Text& text, StreamIndex& index,
                                std::uint64_t theta, const stream::MemoryBudget& budget,
                                CompressionMetrics* metrics) {
  check_theta(theta);
  budget.validate();
  if (index.n != text.size()) throw InputError("index does not belong to this text");

  CompressionMetrics m;
  m.n = index.n;
  m.theta = theta;
  m.bwt_runs = index.bwt_runs;

  const stream::IoStats plcp_before = index.plcp.stats();
  auto factorized = stream_factorize(index.plcp, theta, budget);
  m.max_list_size = factorized.max_list_size;
  const std::uint64_t plcp_reads = index.plcp.stats().items_read;
  {
    stream::IoStats io = index.plcp.stats();
    io.items_read -= plcp_before.items_read;
    io.blocks_read -= plcp_before.blocks_read;
    io += factorized.pairs.stats();
    m.stages.push_back({"factorize", io});
  }

  auto sorted = stream::sort_stream(
      factorized.pairs,
      [](const FactorPair& a, const FactorPair& b) { return a.dst < b.dst; }, budget);
  m.stages.push_back({"sort", sorted.stats()});

  stream::TupleStream<FactorTriple> triples(budget);
  const stream::IoStats phi_before = index.phi.stats();
  std::uint64_t phi_value = 0;
  stream::scan_zip(
      index.phi, sorted, [](const std::uint64_t&, std::uint64_t ord) { return ord; },
      [](const FactorPair& p) { return p.dst; },
      [&](const std::uint64_t& v) { phi_value = v; },
      [&](const FactorPair& p) { triples.push({p.dst, phi_value, p.len}); });
  triples.finalize();
  {
    stream::IoStats io = index.phi.stats();
    io.items_read -= phi_before.items_read;
    io.blocks_read -= phi_before.blocks_read;
    io += triples.stats();
    m.stages.push_back({"attach-sources", io});
  }

  Factorization f(theta);
  const auto bytes = text.bytes();
  std::uint64_t next = 1;
  FactorTriple t;
  triples.rewind();
  while (triples.next(t)) {
    if (t.dst < next) throw std::logic_error("overlapping factors from the factorizer");
    f.append_literal(bytes.subspan(next - 1, t.dst - next));
    f.append_reference(t.src, t.len);
    next = t.dst + t.len;
  }
  f.append_literal(bytes.subspan(next - 1));
  m.stages.push_back({"substitute", triples.stats()});

  m.plcp_rereads = index.plcp.stats().items_read - plcp_reads;
  m.factors = f.factors().size();
  m.references = f.reference_count();
  if (metrics) *metrics = std::move(m);
  return f;
}

Factorization pipeline_compress(const Text& text, const IndexBundle& index,
                                std::uint64_t theta, const stream::MemoryBudget& budget,
                                CompressionMetrics* metrics) {
  StreamIndex s = stream_index_of(index, budget);
  return pipeline_compress(text, s, theta, budget, metrics);
}

Text lower_bound_text(std::uint64_t m) {
  if (m < 2 || m > 255) throw ConfigError("lower-bound text needs 2 <= m <= 255");
  // Printable symbols while they suffice.
  const std::uint64_t base = m <= 94 ? 32 : 0;
  std::vector<std::uint8_t> t;
  t.reserve(m * m + 1);
  for (std::uint64_t i = m; i >= 1; --i) {
    // F_i = s_i s_{i+1} ... s_m ... s_{i+1} s_i
    for (std::uint64_t k = i; k <= m; ++k) t.push_back(static_cast<std::uint8_t>(base + k));
    for (std::uint64_t k = m; k-- > i;) t.push_back(static_cast<std::uint8_t>(base + k));
  }
  return Text::from_bytes(t);
}

}  // namespace plcpcomp
