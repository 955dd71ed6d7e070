#include "vsp/spt.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <tuple>

namespace vsp {

PathHandle SPTree::path_to(const DynGraph& g, Vertex v) const {
  assert(reached(v) && "path_to on unreached vertex");
  std::vector<EdgeId> seq;
  Vertex x = v;
  while (parent_edge[x] != kNoEdge) {
    seq.push_back(parent_edge[x]);
    x = parent_vertex[x];
  }
  std::reverse(seq.begin(), seq.end());
  return g.make_path(x, seq);
}

namespace {

// Edge-id multiset of the tree path to `v` plus an optional extra edge.
std::vector<EdgeId> chain_multiset(const SPTree& t, Vertex v, EdgeId extra) {
  std::vector<EdgeId> seq;
  if (extra != kNoEdge) seq.push_back(extra);
  while (v != kNoVertex && t.parent_edge[v] != kNoEdge) {
    seq.push_back(t.parent_edge[v]);
    v = t.parent_vertex[v];
  }
  std::sort(seq.begin(), seq.end());
  return seq;
}

}  // namespace

SPTree tiebreak_sssp(const DynGraph& g, const SPTOptions& opt) {
  const Vertex nb = g.vertex_bound();
  SPTree t;
  t.settled.assign(nb, 0);
  t.dist.assign(nb, 0);
  t.hops.assign(nb, 0);
  t.parent_edge.assign(nb, kNoEdge);
  t.parent_vertex.assign(nb, kNoVertex);
  t.source_of.assign(nb, kNoVertex);

  // Per-vertex current best candidate; full-order comparisons materialize the
  // parent chains only on (dist, hops) ties.
  struct Cand {
    Length d = 0;
    int64_t h = 0;
    EdgeId pe = kNoEdge;
    Vertex pv = kNoVertex;
    Vertex src = kNoVertex;
    bool valid = false;
  };
  std::vector<Cand> best(nb);
  auto cand_less = [&](const Cand& a, const Cand& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.h != b.h) return a.h < b.h;
    std::vector<EdgeId> ma = chain_multiset(t, a.pv, a.pe);
    std::vector<EdgeId> mb = chain_multiset(t, b.pv, b.pe);
    return ma < mb;
  };

  using QKey = std::tuple<Length, int64_t, Vertex>;
  std::priority_queue<QKey, std::vector<QKey>, std::greater<QKey>> pq;

  for (Vertex s : opt.sources) {
    if (!g.has_vertex(s)) continue;
    if (opt.allowed && !(*opt.allowed)[s]) continue;
    best[s] = {0, 0, kNoEdge, kNoVertex, s, true};
    pq.push({0, 0, s});
  }

  int64_t settled_count = 0;
  while (!pq.empty()) {
    auto [d, h, v] = pq.top();
    pq.pop();
    if (t.settled[v] || !best[v].valid) continue;
    if (d != best[v].d || h != best[v].h) continue;  // stale entry
    if (opt.max_dist >= 0 && d > opt.max_dist) break;
    t.settled[v] = 1;
    t.dist[v] = best[v].d;
    t.hops[v] = best[v].h;
    t.parent_edge[v] = best[v].pe;
    t.parent_vertex[v] = best[v].pv;
    t.source_of[v] = best[v].src;
    t.settle_order.push_back(v);
    ++settled_count;
    if (opt.stop_at && (*opt.stop_at)[v]) {
      t.first_stop = v;
      break;
    }
    if (opt.max_settled >= 0 && settled_count >= opt.max_settled) break;
    if (opt.expand_if && !opt.expand_if(v, d)) continue;
    for (EdgeId e : g.incident(v)) {
      if (opt.edge_filter && !opt.edge_filter(e)) continue;
      const EdgeRec& er = g.edge(e);
      Vertex w = er.other(v);
      if (w == v) continue;  // self-loop never shortens
      if (t.settled[w]) continue;
      if (opt.allowed && !(*opt.allowed)[w]) continue;
      Cand c{d + er.len, h + 1, e, v, best[v].src, true};
      if (!best[w].valid || cand_less(c, best[w])) {
        best[w] = c;
        pq.push({c.d, c.h, w});
      }
    }
  }
  return t;
}

Vertex double_sweep_center(const DynGraph& g, Vertex seed) {
  auto farthest = [&](Vertex s, SPTree& out) {
    out = tiebreak_sssp(g, {.sources = {s}});
    Vertex best = s;
    for (Vertex v : out.settle_order)
      if (out.dist[v] > out.dist[best] || (out.dist[v] == out.dist[best] && v < best)) best = v;
    return best;
  };
  SPTree t0, t1;
  Vertex a = farthest(seed, t0);
  Vertex b = farthest(a, t1);
  Length half = (t1.dist[b] + 1) / 2;
  Vertex m = b;
  while (t1.parent_vertex[m] != kNoVertex && t1.dist[m] > half) m = t1.parent_vertex[m];
  return m;
}

}  // namespace vsp
