#include "vsp/harness.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <queue>
#include <random>
#include <set>
#include <tuple>

namespace vsp {

OracleSSSP oracle_sssp(const DynGraph& g, Vertex s) {
  OracleSSSP out;
  out.source = s;
  out.best.assign(g.vertex_bound(), std::nullopt);
  if (!g.has_vertex(s)) return out;
  PathHandle trivial;
  trivial.src = trivial.dst = s;
  out.best[s] = trivial;
  using QKey = std::tuple<Length, int64_t, Vertex>;
  std::priority_queue<QKey, std::vector<QKey>, std::greater<QKey>> pq;
  std::vector<char> done(g.vertex_bound(), 0);
  pq.push({0, 0, s});
  while (!pq.empty()) {
    auto [d, h, v] = pq.top();
    pq.pop();
    if (done[v]) continue;
    if (!out.best[v] || out.best[v]->len != d || out.best[v]->hops() != h) continue;
    done[v] = 1;
    for (EdgeId e : g.incident(v)) {
      const EdgeRec& er = g.edge(e);
      Vertex w = er.other(v);
      if (w == v || done[w]) continue;
      PathHandle cand = *out.best[v];
      cand.dst = w;
      cand.len += er.len;
      cand.edges.push_back(e);
      if (!out.best[w] || tiebreak_compare(cand, *out.best[w]) < 0) {
        out.best[w] = cand;
        pq.push({cand.len, cand.hops(), w});
      }
    }
  }
  return out;
}

std::optional<PathHandle> oracle_path(const DynGraph& g, Vertex u, Vertex v) {
  OracleSSSP t = oracle_sssp(g, u);
  if (!t.reached(v)) return std::nullopt;
  return t.best[v];
}

std::optional<Length> oracle_dist(const DynGraph& g, Vertex u, Vertex v) {
  auto p = oracle_path(g, u, v);
  if (!p) return std::nullopt;
  return p->len;
}

Length oracle_diameter(const DynGraph& g) { return oracle_diameter_of(g, g.vertices()); }

Length oracle_diameter_of(const DynGraph& g, const std::vector<Vertex>& xs) {
  Length diam = 0;
  for (Vertex u : xs) {
    OracleSSSP t = oracle_sssp(g, u);
    for (Vertex v : xs)
      if (t.reached(v)) diam = std::max(diam, t.dist(v));
  }
  return diam;
}

OracleBall oracle_ball(const DynGraph& g, Vertex v, const std::vector<char>& is_terminal) {
  OracleBall out;
  OracleSSSP t = oracle_sssp(g, v);
  // Nearest terminal under the canonical order. Distinct paths always differ
  // in their edge multiset, so the extra dst key never actually decides.
  for (Vertex a = 0; a < (Vertex)is_terminal.size(); ++a) {
    if (!is_terminal[a] || !t.reached(a)) continue;
    if (out.pivot == kNoVertex) {
      out.pivot = a;
      continue;
    }
    const PathHandle& pa = *t.best[a];
    const PathHandle& pb = *t.best[out.pivot];
    if (pa.len != pb.len) {
      if (pa.len < pb.len) out.pivot = a;
      continue;
    }
    if (pa.hops() != pb.hops()) {
      if (pa.hops() < pb.hops()) out.pivot = a;
      continue;
    }
    std::vector<EdgeId> ma = pa.edges, mb = pb.edges;
    std::sort(ma.begin(), ma.end());
    std::sort(mb.begin(), mb.end());
    if (ma < mb) out.pivot = a;
  }
  if (out.pivot == kNoVertex) return out;
  out.pivot_dist = t.dist(out.pivot);
  for (Vertex w = 0; w < g.vertex_bound(); ++w)
    if (t.reached(w) && t.dist(w) < out.pivot_dist) out.ball.push_back(w);
  return out;
}

int64_t oracle_max_flow(int n, const std::vector<std::tuple<int, int, int64_t>>& edges, int s, int t) {
  // Edmonds-Karp on the bidirected graph: one arc per direction, shared residual.
  struct Arc {
    int to;
    int64_t cap;
    size_t rev;
  };
  std::vector<std::vector<Arc>> adj(n);
  for (auto& [u, v, c] : edges) {
    adj[u].push_back({v, c, adj[v].size()});
    adj[v].push_back({u, c, adj[u].size() - 1});
  }
  int64_t flow = 0;
  while (true) {
    std::vector<std::pair<int, size_t>> pred(n, {-1, 0});
    std::deque<int> q{s};
    pred[s] = {s, 0};
    while (!q.empty() && pred[t].first == -1) {
      int v = q.front();
      q.pop_front();
      for (size_t i = 0; i < adj[v].size(); ++i) {
        const Arc& a = adj[v][i];
        if (a.cap > 0 && pred[a.to].first == -1) {
          pred[a.to] = {v, i};
          q.push_back(a.to);
        }
      }
    }
    if (pred[t].first == -1) break;
    int64_t aug = INT64_MAX;
    for (int v = t; v != s;) {
      auto [pv, pi] = pred[v];
      aug = std::min(aug, adj[pv][pi].cap);
      v = pv;
    }
    for (int v = t; v != s;) {
      auto [pv, pi] = pred[v];
      Arc& a = adj[pv][pi];
      a.cap -= aug;
      adj[a.to][a.rev].cap += aug;
      v = pv;
    }
    flow += aug;
  }
  return flow;
}

DynGraph gen_path(int n, Length len) {
  DynGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, len);
  return g;
}

DynGraph gen_cycle(int n, Length len) {
  DynGraph g = gen_path(n, len);
  if (n > 2) g.add_edge(n - 1, 0, len);
  return g;
}

DynGraph gen_star(int leaves, Length len) {
  DynGraph g;
  g.add_vertex();
  for (int i = 0; i < leaves; ++i) {
    Vertex v = g.add_vertex();
    g.add_edge(0, v, len);
  }
  return g;
}

DynGraph gen_dumbbell(int side, Length bridge_len) {
  DynGraph g;
  for (int i = 0; i < 2 * side; ++i) g.add_vertex();
  for (int i = 0; i < side; ++i)
    for (int j = i + 1; j < side; ++j) {
      g.add_edge(i, j, 1);
      g.add_edge(side + i, side + j, 1);
    }
  g.add_edge(0, side, bridge_len);
  return g;
}

DynGraph gen_random_connected(int n, int deg_cap, int extra_edges, Length max_len, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto rnd_len = [&]() { return (Length)(rng() % (uint64_t)max_len) + 1; };
  DynGraph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  // Random spanning tree respecting the degree cap.
  std::vector<int> deg(n, 0);
  for (int i = 1; i < n; ++i) {
    int tries = 0;
    while (true) {
      int p = (int)(rng() % (uint64_t)i);
      if (deg_cap <= 0 || deg[p] < deg_cap - 1 || ++tries > 8 * n) {
        g.add_edge(p, i, rnd_len());
        ++deg[p];
        ++deg[i];
        break;
      }
    }
  }
  for (int it = 0; it < extra_edges; ++it) {
    int u = (int)(rng() % (uint64_t)n);
    int v = (int)(rng() % (uint64_t)n);
    if (u == v) continue;
    if (deg_cap > 0 && (deg[u] >= deg_cap || deg[v] >= deg_cap)) continue;
    g.add_edge(u, v, rnd_len());
    ++deg[u];
    ++deg[v];
  }
  return g;
}

Instance gen_random_connected_scaled(int n, int deg_cap, int extra_edges, Length max_len, uint64_t seed) {
  DynGraph plain = gen_random_connected(n, deg_cap, extra_edges, max_len, seed);
  Length scale = std::max<Length>(1, (Length)plain.num_edges());
  DynGraph g(scale);
  for (size_t i = 0; i < plain.num_vertices(); ++i) g.add_vertex();
  for (EdgeId e : plain.live_edges()) {
    const EdgeRec& er = plain.edge(e);
    g.add_edge(er.u, er.v, er.len * scale);
  }
  return {std::move(g), scale};
}

bool is_bridge(const DynGraph& g, EdgeId e) {
  const EdgeRec& er = g.edge(e);
  // BFS from er.u avoiding e.
  std::vector<char> seen(g.vertex_bound(), 0);
  std::deque<Vertex> q{er.u};
  seen[er.u] = 1;
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop_front();
    for (EdgeId f : g.incident(v)) {
      if (f == e) continue;
      Vertex w = g.edge(f).other(v);
      if (!seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
    }
  }
  return !seen[er.v];
}

UpdateBatch gen_update(DynGraph& g, const std::string& profile, uint64_t seed, int64_t step,
                       bool keep_connected, Length scale) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + (uint64_t)step);
  UpdateBatch b;
  auto live = g.live_edges();
  auto pick_deletable = [&]() -> EdgeId {
    for (int tries = 0; tries < 64 && !live.empty(); ++tries) {
      EdgeId e = live[rng() % live.size()];
      if (!keep_connected || !is_bridge(g, e)) return e;
    }
    return kNoEdge;
  };
  if (profile == "deletions-only" || profile == "terminal-churn") {
    EdgeId e = pick_deletable();
    if (e != kNoEdge) b.ops.push_back(Update::edge_delete(e));
    return b;
  }
  // fully-dynamic: weighted mix of op kinds.
  uint64_t r = rng() % 100;
  if (r < 45) {
    EdgeId e = pick_deletable();
    if (e != kNoEdge) {
      b.ops.push_back(Update::edge_delete(e));
      return b;
    }
    r = 50;
  }
  if (r < 90) {
    auto vs = g.vertices();
    if (vs.size() >= 2) {
      for (int tries = 0; tries < 32; ++tries) {
        Vertex u = vs[rng() % vs.size()];
        Vertex v = vs[rng() % vs.size()];
        if (u == v) continue;
        if (g.degree_cap() > 0 &&
            (g.degree(u) >= g.degree_cap() || g.degree(v) >= g.degree_cap()))
          continue;
        Length l = ((Length)(rng() % 8) + 1) * scale;
        b.ops.push_back(Update::edge_insert(u, v, l));
        return b;
      }
    }
    r = 95;
  }
  if (r < 97) {
    b.ops.push_back(Update::vertex_insert());
    return b;
  }
  for (Vertex v : g.vertices())
    if (g.degree(v) == 0) {
      b.ops.push_back(Update::vertex_delete(v));
      return b;
    }
  b.ops.push_back(Update::vertex_insert());
  return b;
}

}  // namespace vsp
