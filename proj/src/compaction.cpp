#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <tuple>

#include "plcpcomp/decompressor.hpp"
#include "plcpcomp/errors.hpp"

namespace plcpcomp {

namespace {

constexpr std::uint64_t kNone = 0;

enum class NodeKind : std::uint8_t { literal, multi_dependent, single_dependent };

/// Parent factor index (1-based) of every factor, or kNone for chain roots.
std::vector<std::uint64_t> parents_in_core(const Factorization& f) {
  const auto& fs = f.factors();
  std::vector<std::uint64_t> parent(fs.size(), kNone);
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const Factor& fac = fs[k];
    if (!fac.is_reference()) continue;
    auto it = std::upper_bound(fs.begin(), fs.end(), fac.src,
                               [](std::uint64_t p, const Factor& x) { return p < x.dst; });
    const Factor& host = *(it - 1);
    if (fac.src + fac.len <= host.end()) {
      parent[k] = static_cast<std::uint64_t>(it - fs.begin());
    }
  }
  return parent;
}

}  // namespace

Factorization compact_im(const Factorization& f) {
  f.validate();
  Factorization out = f;
  auto& fs = out.mutable_factors();
  const auto parent = parents_in_core(f);
  const auto sends = [&](std::uint64_t id) {
    return fs[id - 1].is_reference() && parent[id - 1] != kNone;
  };

  // 0 = pending, 1 = on the stack, 2 = final.
  std::vector<std::uint8_t> state(fs.size(), 0);
  std::vector<std::uint64_t> stack;
  for (std::uint64_t start = 1; start <= fs.size(); ++start) {
    if (state[start - 1] != 0) continue;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::uint64_t id = stack.back();
      const std::uint64_t p = parent[id - 1];
      if (state[id - 1] == 2) {
        stack.pop_back();
        continue;
      }
      if (p == kNone || !sends(p)) {
        state[id - 1] = 2;
        stack.pop_back();
        continue;
      }
      if (state[p - 1] == 2) {
        Factor& child = fs[id - 1];
        const Factor& par = fs[p - 1];
        child.src = par.src + (child.src - par.dst);
        state[id - 1] = 2;
        stack.pop_back();
        continue;
      }
      if (state[p - 1] == 1) {
        throw CodingError("cyclic chain of single-dependent references at " +
                          std::to_string(fs[id - 1].dst));
      }
      state[id - 1] = 1;
      stack.push_back(p);
    }
  }
  return out;
}

namespace {

struct NodeRec {
  std::uint64_t id;
  std::uint64_t dst;
  std::uint64_t src;
  std::uint64_t len;
  NodeKind kind;
};

struct RequestRec {
  std::uint64_t src;
  std::uint64_t len;
  std::uint64_t id;
};

struct Edge {
  std::uint64_t parent;
  std::uint64_t child;
};

struct FirstChild {
  std::uint64_t parent;
  std::uint64_t child;
};

struct Sibling {
  std::uint64_t child;
  std::uint64_t parent;
  std::uint64_t next;
};

struct Arc {
  std::uint64_t id;
  std::uint64_t succ;
  std::int64_t val;
};

struct NodeDepth {
  std::uint64_t id;
  std::uint64_t depth;
  NodeKind kind;
};

struct LayeredNode {
  std::uint64_t depth;
  std::uint64_t id;
  std::uint64_t dst;
  std::uint64_t src;
  NodeKind kind;
};

struct LayeredEdge {
  std::uint64_t depth;
  std::uint64_t parent;
  std::uint64_t child;
};

struct Message {
  std::uint64_t depth;
  std::uint64_t id;
  std::uint64_t parent_src;
  std::uint64_t parent_dst;
};

struct Update {
  std::uint64_t id;
  std::uint64_t src;
};

struct KindRec {
  std::uint64_t id;
  NodeKind kind;
};

class IoLedger {
 public:
  template <class T>
  void absorb(const stream::TupleStream<T>& s) {
    total_ += s.stats();
  }
  void add(const stream::IoStats& s) { total_ += s; }
  const stream::IoStats& total() const { return total_; }

 private:
  stream::IoStats total_;
};

// Sum of weights from every arc to the end of its list, by pointer
// doubling: each round joins every arc with its successor through two
// sorts and a merge.
stream::TupleStream<Arc> rank_list(stream::TupleStream<Arc> arcs, std::uint64_t arc_count,
                                   const stream::MemoryBudget& budget, IoLedger& io,
                                   std::uint64_t& rounds) {
  const std::uint64_t limit = std::bit_width(std::max<std::uint64_t>(arc_count, 1)) + 1;
  const auto by_id = [](const Arc& a, const Arc& b) { return a.id < b.id; };
  const auto by_succ = [](const Arc& a, const Arc& b) { return a.succ < b.succ; };
  rounds = 0;
  while (true) {
    bool open = false;
    arcs.rewind();
    Arc a;
    while (arcs.next(a)) open = open || a.succ != kNone;
    if (!open) return arcs;
    if (++rounds > limit) {
      throw CodingError("dependency forest has a cycle (list ranking does not terminate)");
    }

    stream::TupleStream<Arc> linked(budget);
    stream::TupleStream<Arc> next(budget);
    arcs.rewind();
    while (arcs.next(a)) {
      if (a.succ == kNone) {
        next.push(a);
      } else {
        linked.push(a);
      }
    }
    linked.finalize();
    auto waiting = stream::sort_stream(linked, by_succ, budget);
    io.absorb(linked);
    stream::scan_zip(
        arcs, waiting, [](const Arc& x) { return x.id; }, [](const Arc& x) { return x.succ; },
        [&](const Arc& y) { a = y; },
        [&](const Arc& x) {
          if (a.id != x.succ) throw std::logic_error("list ranking lost a successor");
          next.push({x.id, a.succ, x.val + a.val});
        });
    io.absorb(waiting);
    io.absorb(arcs);
    next.finalize();
    arcs = stream::sort_stream(next, by_id, budget);
    io.absorb(next);
  }
}

}  // namespace

Factorization compact_em(const Factorization& f, const stream::MemoryBudget& budget,
                         CompactionMetrics* metrics) {
  f.validate();
  budget.validate();
  CompactionMetrics m;
  IoLedger io;
  const auto& fs = f.factors();
  m.nodes = fs.size();

  // Step 1: classify every reference by the factor holding its source.
  stream::TupleStream<NodeRec> nodes(budget);
  stream::TupleStream<RequestRec> raw_requests(budget);
  for (std::uint64_t id = 1; id <= fs.size(); ++id) {
    const Factor& fac = fs[id - 1];
    nodes.push({id, fac.dst, fac.src, fac.len, NodeKind::literal});
    if (fac.is_reference()) raw_requests.push({fac.src, fac.len, id});
  }
  nodes.finalize();
  raw_requests.finalize();
  auto requests = stream::sort_stream(
      raw_requests, [](const RequestRec& a, const RequestRec& b) { return a.src < b.src; },
      budget);
  io.absorb(raw_requests);

  stream::TupleStream<Edge> raw_edges(budget);
  stream::TupleStream<KindRec> kinds(budget);
  {
    NodeRec host{};
    stream::scan_zip(
        nodes, requests, [](const NodeRec& x) { return x.dst; },
        [](const RequestRec& r) { return r.src; }, [&](const NodeRec& x) { host = x; },
        [&](const RequestRec& r) {
          const bool single = r.src + r.len <= host.dst + host.len;
          raw_edges.push({single ? host.id : kNone, r.id});
          kinds.push({r.id, single ? NodeKind::single_dependent : NodeKind::multi_dependent});
        });
  }
  io.absorb(requests);
  nodes.rewind();
  {
    NodeRec x;
    while (nodes.next(x)) {
      if (!fs[x.id - 1].is_reference()) raw_edges.push({kNone, x.id});
    }
  }
  raw_edges.finalize();
  kinds.finalize();
  auto sorted_kinds = stream::sort_stream(
      kinds, [](const KindRec& a, const KindRec& b) { return a.id < b.id; }, budget);
  io.absorb(kinds);

  // Step 2: group children under their parents.
  auto edges = stream::sort_stream(
      raw_edges,
      [](const Edge& a, const Edge& b) {
        return std::tie(a.parent, a.child) < std::tie(b.parent, b.child);
      },
      budget);
  io.absorb(raw_edges);

  stream::TupleStream<FirstChild> first_child(budget);
  stream::TupleStream<Sibling> raw_siblings(budget);
  {
    Edge e;
    Edge prev{};
    bool have_prev = false;
    edges.rewind();
    while (edges.next(e)) {
      const bool new_group = !have_prev || prev.parent != e.parent;
      if (new_group) first_child.push({e.parent, e.child});
      if (have_prev) raw_siblings.push({prev.child, prev.parent, new_group ? kNone : e.child});
      prev = e;
      have_prev = true;
    }
    if (have_prev) raw_siblings.push({prev.child, prev.parent, kNone});
  }
  first_child.finalize();
  raw_siblings.finalize();
  auto siblings = stream::sort_stream(
      raw_siblings, [](const Sibling& a, const Sibling& b) { return a.child < b.child; },
      budget);
  io.absorb(raw_siblings);

  // Step 3: Euler tour of the tree under the virtual root; arc 2c enters
  // node c, arc 2c + 1 leaves it. Depth(c) is the prefix sum of +1/-1
  // weights up to arc 2c, i.e. 1 minus the suffix sum from that arc.
  stream::TupleStream<Arc> arcs(budget);
  {
    std::uint64_t fc_parent = kNone;
    std::uint64_t fc_child = kNone;
    stream::scan_zip(
        first_child, siblings, [](const FirstChild& x) { return x.parent; },
        [](const Sibling& s) { return s.child; },
        [&](const FirstChild& x) {
          fc_parent = x.parent;
          fc_child = x.child;
        },
        [&](const Sibling& s) {
          const std::uint64_t c = s.child;
          const std::uint64_t first = fc_parent == c ? fc_child : kNone;
          arcs.push({2 * c, first != kNone ? 2 * first : 2 * c + 1, 1});
          const std::uint64_t up =
              s.next != kNone ? 2 * s.next : (s.parent == kNone ? kNone : 2 * s.parent + 1);
          arcs.push({2 * c + 1, up, -1});
        });
  }
  io.absorb(first_child);
  io.absorb(siblings);
  arcs.finalize();
  if (arcs.size() != 2 * fs.size()) throw std::logic_error("Euler tour lost nodes");
  auto ranked = rank_list(std::move(arcs), 2 * fs.size(), budget, io, m.ranking_rounds);

  stream::TupleStream<NodeDepth> depths(budget);
  {
    KindRec kind{};
    stream::scan_zip(
        sorted_kinds, ranked, [](const KindRec& k) { return 2 * k.id; },
        [](const Arc& a) { return a.id; }, [&](const KindRec& k) { kind = k; },
        [&](const Arc& a) {
          if (a.id % 2 != 0) return;
          const std::uint64_t id = a.id / 2;
          const auto d = static_cast<std::uint64_t>(1 - a.val);
          const NodeKind k = kind.id == id ? kind.kind : NodeKind::literal;
          depths.push({id, d, k});
          m.tree_depth = std::max(m.tree_depth, d);
          if (k == NodeKind::single_dependent) ++m.single_dependent;
        });
  }
  io.absorb(sorted_kinds);
  io.absorb(ranked);
  depths.finalize();

  // Step 4: time-forward processing layer by layer. A single-dependent
  // reference tells each child where its own (already compacted) source
  // lies; children of literals and multi-dependent factors keep theirs.
  stream::TupleStream<LayeredNode> raw_layers(budget);
  {
    NodeDepth nd{};
    nodes.rewind();
    depths.rewind();
    NodeRec x;
    while (nodes.next(x)) {
      if (!depths.next(nd) || nd.id != x.id) throw std::logic_error("depth stream out of step");
      raw_layers.push({nd.depth, x.id, x.dst, x.src, nd.kind});
    }
  }
  raw_layers.finalize();
  auto layers = stream::sort_stream(
      raw_layers,
      [](const LayeredNode& a, const LayeredNode& b) {
        return std::tie(a.depth, a.id) < std::tie(b.depth, b.id);
      },
      budget);
  io.absorb(raw_layers);
  io.absorb(nodes);

  stream::TupleStream<LayeredEdge> raw_sends(budget);
  {
    NodeDepth nd{};
    stream::scan_zip(
        depths, edges, [](const NodeDepth& d) { return d.id; },
        [](const Edge& e) { return e.parent; }, [&](const NodeDepth& d) { nd = d; },
        [&](const Edge& e) {
          if (e.parent != kNone && nd.id == e.parent && nd.kind == NodeKind::single_dependent) {
            raw_sends.push({nd.depth, e.parent, e.child});
          }
        });
  }
  io.absorb(depths);
  io.absorb(edges);
  raw_sends.finalize();
  auto sends = stream::sort_stream(
      raw_sends,
      [](const LayeredEdge& a, const LayeredEdge& b) {
        return std::tie(a.depth, a.parent, a.child) < std::tie(b.depth, b.parent, b.child);
      },
      budget);
  io.absorb(raw_sends);

  const auto message_order = [](const Message& a, const Message& b) {
    return std::tie(a.depth, a.id) < std::tie(b.depth, b.id);
  };
  stream::SpillingPriorityQueue<Message, decltype(message_order)> pq(budget, message_order);
  stream::TupleStream<Update> raw_updates(budget);
  {
    LayeredNode u;
    layers.rewind();
    sends.rewind();
    while (layers.next(u)) {
      std::uint64_t src = u.src;
      if (!pq.empty() && pq.top().depth == u.depth && pq.top().id == u.id) {
        const Message msg = pq.pop();
        src = msg.parent_src + (u.src - msg.parent_dst);
      }
      if (u.kind != NodeKind::literal) raw_updates.push({u.id, src});
      if (src != u.src) ++m.rewritten;
      while (const LayeredEdge* e = sends.peek()) {
        if (std::tie(e->depth, e->parent) > std::tie(u.depth, u.id)) break;
        if (e->parent != u.id) throw std::logic_error("time-forward processing out of step");
        pq.push({u.depth + 1, e->child, src, u.dst});
        ++m.messages;
        LayeredEdge skip;
        sends.next(skip);
      }
    }
    if (!pq.empty()) throw std::logic_error("undelivered compaction messages");
  }
  io.absorb(layers);
  io.absorb(sends);
  io.add(pq.stats());
  m.pq_peak = pq.peak_size();
  raw_updates.finalize();
  auto updates = stream::sort_stream(
      raw_updates, [](const Update& a, const Update& b) { return a.id < b.id; }, budget);
  io.absorb(raw_updates);

  Factorization out = f;
  auto& outs = out.mutable_factors();
  Update up;
  updates.rewind();
  while (updates.next(up)) outs[up.id - 1].src = up.src;
  io.absorb(updates);

  m.io = io.total();
  if (metrics) *metrics = m;
  return out;
}

}  // namespace plcpcomp
