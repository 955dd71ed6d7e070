#include "vsp/pivots.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

#include "vsp/centers.hpp"
#include "vsp/spt.hpp"

namespace vsp {

void PivotDelta::append(PivotDelta&& o) {
  auto move_into = [](auto& dst, auto& src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
  };
  move_into(new_terminals, o.new_terminals);
  move_into(removed_ball, o.removed_ball);
  move_into(pivot_changes, o.pivot_changes);
  move_into(forest_removed, o.forest_removed);
  move_into(forest_added, o.forest_added);
  move_into(dropped_paths, o.dropped_paths);
}

PivotState::PivotState(DynGraph& g, int64_t k, const std::vector<Vertex>* initial_terminals)
    : g_(g), k_(k) {
  grow();
  std::vector<Vertex> a = initial_terminals ? *initial_terminals : center(g, k);
  for (Vertex v : a) {
    a_.insert(v);
    is_terminal_[v] = 1;
  }
  for (Vertex v : g.vertices()) {
    // The stopped search only supplies the radius: on distance ties the heap
    // settles by vertex id, so first_stop need not be the canonical choice.
    SPTree probe = tiebreak_sssp(g_, {.sources = {v}, .stop_at = &is_terminal_});
    assert(probe.first_stop != kNoVertex && "every component holds a terminal");
    Length r = probe.dist[probe.first_stop];
    SPTree t = tiebreak_sssp(g_, {.sources = {v}, .max_dist = r});
    Vertex p = kNoVertex;
    for (Vertex w : t.settle_order) {
      if (!is_terminal_[w] || t.dist[w] != r) continue;
      if (p == kNoVertex || tiebreak_key_compare(t.path_to(g_, w), t.path_to(g_, p)) < 0) p = w;
    }
    pivot_[v] = p;
    pivot_len_[v] = r;
    for (Vertex w : t.settle_order) {
      if (t.dist[w] >= r) continue;
      ball_[v].push_back(w);
      cluster_[w].insert(v);
      paths_[v][w] = t.path_to(g_, w);
    }
    paths_[v][p] = t.path_to(g_, p);
    const PathHandle& pp = paths_[v][p];
    if (v == p) {
      fparent_[v] = kNoVertex;
      fparent_edge_[v] = kNoEdge;
    } else {
      fparent_[v] = g_.edge(pp.edges[0]).other(v);
      fparent_edge_[v] = pp.edges[0];
    }
  }
}

void PivotState::grow() {
  size_t n = (size_t)g_.vertex_bound();
  if (is_terminal_.size() >= n) return;
  is_terminal_.resize(n, 0);
  pivot_.resize(n, kNoVertex);
  pivot_len_.resize(n, -1);
  ball_.resize(n);
  cluster_.resize(n);
  paths_.resize(n);
  fparent_.resize(n, kNoVertex);
  fparent_edge_.resize(n, kNoEdge);
}

bool PivotState::is_terminal(Vertex v) const {
  return v >= 0 && v < (Vertex)is_terminal_.size() && is_terminal_[v];
}

Vertex PivotState::pivot(Vertex v) const { return pivot_[v]; }
Length PivotState::dist_to_a(Vertex v) const { return pivot_len_[v]; }
const PathHandle& PivotState::pivot_path(Vertex v) const { return paths_[v].at(pivot_[v]); }
const std::vector<Vertex>& PivotState::ball(Vertex v) const { return ball_[v]; }
const std::set<Vertex>& PivotState::cluster(Vertex v) const { return cluster_[v]; }
const std::map<Vertex, PathHandle>& PivotState::paths(Vertex v) const { return paths_[v]; }
Vertex PivotState::forest_parent(Vertex v) const { return fparent_[v]; }
EdgeId PivotState::forest_parent_edge(Vertex v) const { return fparent_edge_[v]; }

void PivotState::set_pivot(Vertex u, Vertex piv, PathHandle path, PivotDelta& d) {
  Vertex old = pivot_[u];
  if (old != kNoVertex && old != piv) {
    d.dropped_paths.push_back({u, old});
    paths_[u].erase(old);
  }
  d.pivot_changes.push_back({u, old, piv});
  if (fparent_[u] != kNoVertex) d.forest_removed.push_back({u, fparent_edge_[u], fparent_[u]});
  pivot_[u] = piv;
  pivot_len_[u] = path.len;
  if (u == piv) {
    fparent_[u] = kNoVertex;
    fparent_edge_[u] = kNoEdge;
  } else {
    fparent_[u] = g_.edge(path.edges[0]).other(u);
    fparent_edge_[u] = path.edges[0];
    d.forest_added.push_back({u, path.edges[0], fparent_[u]});
  }
  paths_[u][piv] = std::move(path);
}

void PivotState::truncate_ball(Vertex u, Length radius, PivotDelta& d) {
  while (!ball_[u].empty()) {
    Vertex w = ball_[u].back();
    if (paths_[u].at(w).len < radius) break;
    ball_[u].pop_back();
    cluster_[w].erase(u);
    d.removed_ball.push_back({u, w});
    if (w != pivot_[u]) {
      d.dropped_paths.push_back({u, w});
      paths_[u].erase(w);
    }
  }
}

PivotDelta PivotState::absorb_terminal(Vertex v) {
  PivotDelta d;
  if (is_terminal(v)) return d;
  grow();
  assert(g_.has_vertex(v) && "terminal must be live");
  is_terminal_[v] = 1;
  a_.insert(v);
  d.new_terminals.push_back(v);
  auto cur_len = [&](Vertex u) {
    return pivot_[u] == kNoVertex ? std::numeric_limits<Length>::max() / 4 : pivot_len_[u];
  };
  // Pruned search from v: expansion stops where v cannot improve the pivot.
  SPTree t = tiebreak_sssp(
      g_,
      {.sources = {v}, .expand_if = [&](Vertex u, Length dd) { return dd <= cur_len(u); }});
  for (Vertex u : t.settle_order) {
    Length dd = t.dist[u];
    if (dd > cur_len(u)) continue;
    PathHandle to_v = t.path_to(g_, u).reversed();
    bool better = dd < cur_len(u);
    if (!better) better = tiebreak_key_compare(to_v, paths_[u].at(pivot_[u])) < 0;
    if (!better) {
      // Equal distance, old pivot path wins the tiebreak: nothing changes.
      continue;
    }
    set_pivot(u, v, std::move(to_v), d);
    truncate_ball(u, pivot_len_[u], d);
  }
  return d;
}

PivotDelta PivotState::add_terminal(Vertex v) { return absorb_terminal(v); }

PivotDelta PivotState::prepare_delete(EdgeId e) {
  if (!g_.has_edge(e)) throw UnknownEdge(e);
  const EdgeRec& er = g_.edge(e);
  PivotDelta d = absorb_terminal(er.u);
  d.append(absorb_terminal(er.v));
  return d;
}

void PivotState::on_deleted(EdgeId e) {
#ifndef NDEBUG
  for (Vertex v : g_.vertices())
    for (const auto& [w, p] : paths_[v])
      for (EdgeId pe : p.edges) assert(pe != e && "stored path survived a deletion it uses");
#else
  (void)e;
#endif
}

PivotDelta PivotState::delete_edge(EdgeId e) {
  PivotDelta d = prepare_delete(e);
  UpdateBatch b;
  b.ops.push_back(Update::edge_delete(e));
  g_.apply_batch(b);
  on_deleted(e);
  return d;
}

PivotDelta PivotState::prepare_insert(Vertex u, Vertex v) {
  PivotDelta d = absorb_terminal(u);
  d.append(absorb_terminal(v));
  return d;
}

void PivotState::on_inserted(EdgeId e) {
  grow();
#ifndef NDEBUG
  const EdgeRec& er = g_.edge(e);
  // Pre-existing endpoints were made terminals before the insertion; brand-new
  // vertices must be absorbed via add_terminal right after it.
  for (Vertex x : {er.u, er.v})
    assert((is_terminal(x) || pivot_[x] == kNoVertex) && "insert endpoint must be a terminal");
#else
  (void)e;
#endif
}

void PivotState::remove_vertex(Vertex v) {
  assert(v >= 0 && v < (Vertex)is_terminal_.size());
  assert(is_terminal_[v] && "removed vertex was isolated, hence a terminal");
  assert(cluster_[v].empty() && "terminals belong to no ball");
  assert(ball_[v].empty());
  a_.erase(v);
  is_terminal_[v] = 0;
  pivot_[v] = kNoVertex;
  pivot_len_[v] = -1;
  paths_[v].clear();
  fparent_[v] = kNoVertex;
  fparent_edge_[v] = kNoEdge;
}

void PivotState::self_check() const {
  for (Vertex v : g_.vertices()) {
    assert(pivot_[v] != kNoVertex);
    if (is_terminal_[v]) {
      assert(pivot_[v] == v && pivot_len_[v] == 0 && ball_[v].empty());
      continue;
    }
    // Pivot path walks the forest to the root with exact lengths.
    Length walked = 0;
    Vertex x = v;
    int64_t guard = 0;
    while (fparent_[x] != kNoVertex) {
      walked += g_.edge(fparent_edge_[x]).len;
      x = fparent_[x];
      assert(++guard <= (int64_t)is_terminal_.size() && "forest has a cycle");
    }
    assert(x == pivot_[v] && "forest root is the pivot");
    assert(walked == pivot_len_[v] && "forest distance equals pivot distance");
    // Ball order is by nondecreasing distance, all strictly inside the radius.
    Length prev = -1;
    for (Vertex w : ball_[v]) {
      Length dw = paths_[v].at(w).len;
      assert(dw >= prev);
      assert(dw < pivot_len_[v]);
      assert(cluster_[w].count(v));
      prev = dw;
    }
  }
}

}  // namespace vsp
