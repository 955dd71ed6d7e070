#include "vsp/lssf.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "vsp/spt.hpp"

namespace vsp {

namespace {

int64_t ceil_div(int64_t a, int64_t b) {
  assert(a >= 0 && b >= 1);
  return (a + b - 1) / b;
}

}  // namespace

void LssfDelta::append(LssfDelta&& o) {
  cut_edges.insert(cut_edges.end(), o.cut_edges.begin(), o.cut_edges.end());
  new_roots.insert(new_roots.end(), o.new_roots.begin(), o.new_roots.end());
}

StretchForest::StretchForest(const DynGraph& g, const std::map<EdgeId, int64_t>& w, int64_t k,
                             const std::vector<Vertex>& seed_roots)
    : g_(g), df_(g.vertex_bound()), k_(k), w_(w) {
  assert(k_ >= 1 && "split parameter must be positive");
  finc_.resize((size_t)g.vertex_bound());
  std::set<Vertex> seeds(seed_roots.begin(), seed_roots.end());
  for (Vertex s : seeds) assert(g.has_vertex(s) && "seed root must be live");

  // One shortest-path tree per component, rooted at the seeds inside it or
  // at an approximate center when it holds none.
  std::vector<char> seen((size_t)g.vertex_bound(), 0);
  for (Vertex v0 : g.vertices()) {
    if (seen[v0]) continue;
    SPTree probe = tiebreak_sssp(g, {.sources = {v0}});
    std::vector<Vertex> src;
    for (Vertex v : probe.settle_order)
      if (seeds.count(v)) src.push_back(v);
    if (src.empty()) src.push_back(double_sweep_center(g, v0));
    SPTree t = tiebreak_sssp(g, {.sources = src});
    for (Vertex v : probe.settle_order) {
      seen[v] = 1;
      if (t.parent_edge[v] == kNoEdge) {
        roots_.insert(v);
        continue;
      }
      EdgeId e = t.parent_edge[v];
      Vertex p = t.parent_vertex[v];
      df_.link(v, p, g.edge(e).len);
      fedges_[e] = {v, p};
      finc_[v].insert(e);
      finc_[p].insert(e);
    }
  }

  // Split components until each one's host-edge incidence fits under k*Delta.
  std::vector<std::pair<NodeId, NodeId>> tedges;
  std::vector<EdgeId> teids;
  for (const auto& [e, cp] : fedges_) {
    tedges.push_back({cp.first, cp.second});
    teids.push_back(e);
  }
  std::map<NodeId, int64_t> weight;
  for (Vertex v : g.vertices()) {
    weight[v] = g.degree(v);
    delta_bound_ = std::max<int64_t>(delta_bound_, g.degree(v));
  }
  std::vector<NodeId> pref(roots_.begin(), roots_.end());
  LssfDelta build_cuts;
  for (size_t idx : find_sets(tedges, weight, k_, pref)) cut_forest_edge(teids[idx], build_cuts);

  // Freeze the overestimates against the final build forest.
  for (EdgeId e : g.live_edges()) str_[e] = 1 + ceil_div(detour_len(e), g.edge(e).len);
  gamma_num_ = 0;
  gamma_den_ = 0;
  for (const auto& [e, we] : w_) {
    if (we == 0) continue;
    assert(g.has_edge(e) && "build weights must name live edges");
    gamma_num_ += we * str_.at(e);
    gamma_den_ += we;
  }
  if (gamma_den_ == 0) gamma_den_ = 1;

  int64_t lg = 1;
  while (((int64_t)1 << lg) < (int64_t)g.num_edges() + 2) ++lg;
  budget_ = 4 * lg * lg;
  last_recourse_ = max_recourse_ = total_cuts_ = 0;
}

Vertex StretchForest::root_of(Vertex v) { return (Vertex)df_.find_root(v); }
Length StretchForest::root_path_len(Vertex v) { return df_.root_path_length(v); }

Length StretchForest::detour_len(EdgeId e) {
  const EdgeRec& er = g_.edge(e);
  if (er.u == er.v) return 0;
  if (df_.connected(er.u, er.v)) return df_.path_length(er.u, er.v);
  return df_.root_path_length(er.u) + df_.root_path_length(er.v);
}

int64_t StretchForest::str_over(EdgeId e) const {
  auto it = str_.find(e);
  if (it == str_.end()) throw UnknownEdge(e);
  return it->second;
}

int64_t StretchForest::str_or_one(EdgeId e) const {
  auto it = str_.find(e);
  return it == str_.end() ? 1 : it->second;
}

void StretchForest::cut_forest_edge(EdgeId e, LssfDelta& d) {
  auto it = fedges_.find(e);
  assert(it != fedges_.end() && "cut of an edge outside the forest");
  auto [child, par] = it->second;
  df_.cut(child);
  finc_[child].erase(e);
  finc_[par].erase(e);
  fedges_.erase(it);
  d.cut_edges.push_back(e);
  ++last_recourse_;
  ++total_cuts_;
  bool fresh = roots_.insert(child).second;
  assert(fresh && "cut child held a parent, so it was no root");
  d.new_roots.push_back(child);
}

void StretchForest::make_root_impl(Vertex v, LssfDelta& d) {
  std::vector<EdgeId> inc(finc_[v].begin(), finc_[v].end());
  for (EdgeId e : inc) cut_forest_edge(e, d);
  assert(roots_.count(v) && "make_root must leave v a root");
}

void StretchForest::repair(LssfDelta& d) {
  for (;;) {
    EdgeId worst = kNoEdge;
    __int128 wnum = 0;
    Length wden = 1;
    for (EdgeId e : g_.live_edges()) {
      const EdgeRec& er = g_.edge(e);
      __int128 excess = (__int128)detour_len(e) - (__int128)(str_or_one(e) - 1) * er.len;
      if (excess <= 0) continue;
      if (worst == kNoEdge || excess * wden > wnum * er.len) {
        worst = e;
        wnum = excess;
        wden = er.len;
      }
    }
    if (worst == kNoEdge) return;
    const EdgeRec& er = g_.edge(worst);
    size_t before = d.cut_edges.size();
    make_root_impl(er.u, d);
    make_root_impl(er.v, d);
    assert(d.cut_edges.size() > before && "a violating edge always touches the forest");
  }
}

void StretchForest::finish_op() {
  max_recourse_ = std::max(max_recourse_, last_recourse_);
  if (last_recourse_ > budget_) ++breaches_;
}

LssfDelta StretchForest::insert_edge(EdgeId e) {
  if (!g_.has_edge(e)) throw UnknownEdge(e);
  const EdgeRec& er = g_.edge(e);
  assert(!str_.count(e) && "edge ids are never reused");
  str_[e] = 1;
  delta_bound_ = std::max<int64_t>(delta_bound_, std::max(g_.degree(er.u), g_.degree(er.v)));
  LssfDelta d;
  last_recourse_ = 0;
  make_root_impl(er.u, d);
  if (er.v != er.u) make_root_impl(er.v, d);
  repair(d);
  finish_op();
  return d;
}

LssfDelta StretchForest::delete_edge(EdgeId e) {
  if (!g_.has_edge(e)) throw UnknownEdge(e);
  const EdgeRec& er = g_.edge(e);
  LssfDelta d;
  last_recourse_ = 0;
  make_root_impl(er.u, d);
  if (er.v != er.u) make_root_impl(er.v, d);
  repair(d);
  finish_op();
  return d;
}

LssfDelta StretchForest::delete_edge_from_forest(EdgeId e) {
  if (!g_.has_edge(e)) throw UnknownEdge(e);
  const EdgeRec& er = g_.edge(e);
  LssfDelta d;
  last_recourse_ = 0;
  make_root_impl(er.u, d);
  if (er.v != er.u) make_root_impl(er.v, d);
  repair(d);
  finish_op();
  return d;
}

LssfDelta StretchForest::make_root(Vertex v) {
  LssfDelta d;
  last_recourse_ = 0;
  make_root_impl(v, d);
  repair(d);
  finish_op();
  return d;
}

void StretchForest::add_vertex(Vertex v) {
  assert(g_.has_vertex(v) && "add_vertex after the host created it");
  while (df_.num_nodes() <= v) df_.add_node();
  if ((size_t)v >= finc_.size()) finc_.resize((size_t)v + 1);
  assert(finc_[v].empty());
  roots_.insert(v);
}

void StretchForest::remove_vertex(Vertex v) {
  assert(finc_[v].empty() && "only forest-isolated vertices can go");
  roots_.erase(v);
}

void StretchForest::self_check() {
  // Forest bookkeeping against the link-cut structure and the host graph.
  for (const auto& [e, cp] : fedges_) {
    assert(g_.has_edge(e) && "forest edge must be live in the host");
    const EdgeRec& er = g_.edge(e);
    auto [child, par] = cp;
    assert(((er.u == child && er.v == par) || (er.u == par && er.v == child)) &&
           "forest edge endpoints must match the host record");
    assert(df_.parent(child) == par && "link-cut parent mismatch");
    assert(df_.edge_len(child) == er.len && "link-cut edge length mismatch");
    assert(finc_[child].count(e) && finc_[par].count(e));
  }
  for (Vertex v : g_.vertices()) {
    bool parentless = !df_.has_parent(v);
    assert(parentless == (roots_.count(v) != 0) && "roots are exactly the parentless vertices");
  }
  // No stretch violations.
  for (EdgeId e : g_.live_edges()) {
    const EdgeRec& er = g_.edge(e);
    assert((__int128)detour_len(e) <= (__int128)(str_or_one(e) - 1) * er.len &&
           "stretch overestimate violated");
  }
  // Component incidence cap.
  std::map<Vertex, std::set<EdgeId>> by_root;
  for (EdgeId e : g_.live_edges()) {
    const EdgeRec& er = g_.edge(e);
    by_root[root_of(er.u)].insert(e);
    by_root[root_of(er.v)].insert(e);
  }
  for (const auto& [r, es] : by_root)
    assert((int64_t)es.size() <= k_ * delta_bound_ && "component incidence exceeds k*Delta");
}

}  // namespace vsp
