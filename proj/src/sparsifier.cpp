#include "vsp/sparsifier.hpp"

#include <algorithm>
#include <cassert>

#include "vsp/treekit.hpp"

namespace vsp {

namespace {

std::vector<StretchForest> build_forests(DynGraph& g, const PivotState& ps, int64_t k) {
  PathCollection base = build_base_paths(ps);
  PathCollection proj = project_paths(ps, base);
  std::vector<Vertex> seeds(ps.terminals().begin(), ps.terminals().end());
  EmbedResult em = embed_iteratively(g, proj, k, seeds);
  return std::move(em.forests);
}

}  // namespace

Sparsifier::Sparsifier(DynGraph& g, int64_t k, int64_t levels_cfg, int64_t delta,
                       int64_t gamma_deg_constr, int64_t spanner_budget)
    : g_(g),
      k_(k),
      kk_(levels_cfg),
      delta_(delta),
      gamma_deg_(gamma_deg_constr),
      ps_(g, k),
      forests_(build_forests(g, ps_, k)),
      view_(g, forests_),
      spanner_(view_.tilde(), 3, spanner_budget) {
  assert(k_ >= 1 && kk_ >= 1 && delta_ >= 1 && gamma_deg_ >= 1);
  build_h_initial();
  int64_t phi = potential();
  while (true) {
    auto [node, lvl] = max_degree_pair();
    if (node == kNoVertex || degree_of(node) <= 2 * gamma_deg_ * delta_) break;
    std::vector<Update> scratch;  // pre-time-0 shaping; H^(0) is the end state
    SparsifierMetrics m;
    reduce_degree_impl(node, lvl, gamma_deg_, &scratch, &m);
    ++init_iters_;
    int64_t now = potential();
    if (now >= phi) throw DegreeLoopStuck();
    phi = now;
  }
  h0_ = h_;
}

void Sparsifier::build_h_initial() {
  for (Vertex nd : view_.tilde().vertices()) {
    auto [i, r] = view_.label(nd);
    (void)i;
    gnode_host_[nd] = r;
    ++copies_cnt_[r];
    if (!hvert_of_host_.count(r)) {
      Vertex hv = h_.add_vertex();
      hvert_of_host_[r] = hv;
      host_of_hvert_[hv] = r;
    }
  }
  for (EdgeId ge : view_.tilde().live_edges()) {
    EdgeId se = spanner_.spanner_edge(ge);
    if (se == kNoEdge) continue;
    if (view_.is_zero_link(ge)) {
      link_members_.insert(se);
      continue;
    }
    const EdgeRec& ger = view_.tilde().edge(ge);
    Vertex a = hvert_of_host_.at(gnode_host_.at(ger.u));
    Vertex b = hvert_of_host_.at(gnode_host_.at(ger.v));
    EdgeId he = h_.add_edge(a, b, ger.len);
    hedge_of_spanner_[se] = he;
    hinfo_[he] = {se, ge};
  }
}

void Sparsifier::validate_unit(const Update& op) const {
  switch (op.kind) {
    case Update::EdgeDelete:
      if (!g_.has_edge(op.e)) throw UnknownEdge(op.e);
      break;
    case Update::EdgeInsert:
      if (!g_.has_vertex(op.u)) throw UnknownVertex(op.u);
      if (!g_.has_vertex(op.v)) throw UnknownVertex(op.v);
      if (op.len < g_.min_len() || (g_.max_len() && op.len > g_.max_len()))
        throw LengthOutOfRange(op.len);
      if (g_.degree_cap()) {
        if (g_.degree(op.u) + 1 > g_.degree_cap()) throw DegreeCapExceeded(op.u);
        if (op.v != op.u && g_.degree(op.v) + 1 > g_.degree_cap())
          throw DegreeCapExceeded(op.v);
      }
      break;
    case Update::VertexDelete:
      if (!g_.has_vertex(op.w)) throw UnknownVertex(op.w);
      if (g_.degree(op.w) != 0) throw MalformedBatch("vertex delete requires isolation");
      break;
    case Update::VertexInsert:
      break;
  }
}

void Sparsifier::root_new_terminals(const PivotDelta& pd, std::vector<LssfDelta>* deltas) {
  for (Vertex t : pd.new_terminals)
    for (size_t i = 0; i < forests_.size(); ++i)
      if (!forests_[i].roots().count(t)) (*deltas)[i].append(forests_[i].make_root(t));
}

UpdateBatch Sparsifier::maintain(const UpdateBatch& b) {
  UpdateBatch total;
  for (const Update& op : b.ops) {
    UpdateBatch one = maintain_one(op);
    total.ops.insert(total.ops.end(), one.ops.begin(), one.ops.end());
  }
  journal_.push_back(total);
  for (auto& [hid, r] : hier_) refresh_hier(r);
  return total;
}

UpdateBatch Sparsifier::maintain_one(const Update& op) {
  validate_unit(op);
  std::vector<LssfDelta> deltas(forests_.size());
  HostDelta hd;
  SparsifierMetrics m;
  std::vector<Update> u_h;

  if (op.kind == Update::EdgeDelete) {
    PivotDelta pd = ps_.prepare_delete(op.e);
    root_new_terminals(pd, &deltas);
    hd.deleted_edges.push_back(op.e);
    for (size_t i = 0; i < forests_.size(); ++i)
      deltas[i].append(forests_[i].delete_edge(op.e));
  } else if (op.kind == Update::EdgeInsert) {
    PivotDelta pd = ps_.prepare_insert(op.u, op.v);
    root_new_terminals(pd, &deltas);
  }

  UpdateBatch unit;
  unit.ops.push_back(op);
  auto ap = g_.apply_batch(unit);

  switch (op.kind) {
    case Update::EdgeDelete:
      ps_.on_deleted(op.e);
      break;
    case Update::EdgeInsert: {
      EdgeId e = ap.inserted_edges[0];
      ps_.on_inserted(e);
      hd.inserted_edges.push_back(e);
      for (size_t i = 0; i < forests_.size(); ++i)
        deltas[i].append(forests_[i].insert_edge(e));
      break;
    }
    case Update::VertexInsert: {
      Vertex w = ap.inserted_vertices[0];
      for (auto& f : forests_) f.add_vertex(w);
      PivotDelta pd = ps_.add_terminal(w);
      root_new_terminals(pd, &deltas);
      hd.inserted_vertices.push_back(w);
      break;
    }
    case Update::VertexDelete:
      ps_.remove_vertex(op.w);
      for (auto& f : forests_) f.remove_vertex(op.w);
      hd.deleted_vertices.push_back(op.w);
      break;
  }

  push_down(deltas, hd, &u_h, &m);
  auto [node, lvl] = max_degree_pair();
  if (node != kNoVertex)
    m.reduce_cut = (int64_t)reduce_degree_impl(node, lvl, gamma_deg_, &u_h, &m).size();
  ++q_;
  for (const auto& [nd, d] : level_degrees()) {
    (void)nd;
    m.deg_max = std::max(m.deg_max, d);
  }
  deg_max_obs_ = std::max(deg_max_obs_, m.deg_max);
  ht_max_ = std::max(ht_max_, m.htilde_batch);
  m.u_h_size = (int64_t)u_h.size();
  u_h_max_ = std::max(u_h_max_, m.u_h_size);
  last_ = m;
  UpdateBatch ret;
  ret.ops = std::move(u_h);
  return ret;
}

void Sparsifier::push_down(const std::vector<LssfDelta>& deltas, const HostDelta& hd,
                           std::vector<Update>* u_h, SparsifierMetrics* m) {
  for (const auto& d : deltas)
    m->forest_deltas += (int64_t)d.cut_edges.size() + (int64_t)d.new_roots.size();
  UpdateBatch gt = view_.apply_forest_delta(deltas, hd);
  m->gtilde_batch += (int64_t)gt.ops.size();
  if (gt.ops.empty()) return;
  UpdateBatch ht = spanner_.apply_update(gt);
  m->htilde_batch += (int64_t)ht.ops.size();
  emulate_to_h(ht, spanner_.last_host_ids(), u_h);
}

void Sparsifier::emulate_to_h(const UpdateBatch& ht, const std::vector<EdgeId>& gids,
                              std::vector<Update>* u_h) {
  assert(gids.size() == ht.ops.size());
  UpdateBatch out;
  struct EiPlan {
    EdgeId se, gid;
  };
  std::vector<EiPlan> ei_plan;
  std::vector<Vertex> vi_hosts;
  std::vector<EdgeId> ed_spanner;
  std::vector<Vertex> vd_hosts;
  std::map<Vertex, Vertex> planned_hv;  // host vertex -> predicted H vertex id
  int64_t vi_count = 0;
  auto hv_of = [&](Vertex r) {
    auto it = hvert_of_host_.find(r);
    if (it != hvert_of_host_.end()) return it->second;
    return planned_hv.at(r);
  };
  for (size_t idx = 0; idx < ht.ops.size(); ++idx) {
    const Update& op = ht.ops[idx];
    switch (op.kind) {
      case Update::EdgeInsert: {
        EdgeId se = op.e, gid = gids[idx];
        assert(se != kNoEdge && gid != kNoEdge);
        if (view_.is_zero_link(gid)) {
          link_members_.insert(se);
          break;
        }
        const EdgeRec& ger = view_.tilde().edge(gid);
        Vertex a = hv_of(gnode_host_.at(ger.u));
        Vertex b = hv_of(gnode_host_.at(ger.v));
        out.ops.push_back(Update::edge_insert(a, b, op.len));
        ei_plan.push_back({se, gid});
        break;
      }
      case Update::EdgeDelete: {
        EdgeId se = op.e;
        if (link_members_.erase(se)) break;
        out.ops.push_back(Update::edge_delete(hedge_of_spanner_.at(se)));
        ed_spanner.push_back(se);
        break;
      }
      case Update::VertexInsert: {
        Vertex gnode = op.w;
        auto [i, r] = view_.label(gnode);
        (void)i;
        gnode_host_[gnode] = r;
        ++copies_cnt_[r];
        if (!hvert_of_host_.count(r) && !planned_hv.count(r)) {
          planned_hv[r] = (Vertex)(h_.vertex_bound() + vi_count);
          ++vi_count;
          vi_hosts.push_back(r);
          out.ops.push_back(Update::vertex_insert());
        }
        break;
      }
      case Update::VertexDelete: {
        Vertex gnode = op.w;
        Vertex r = gnode_host_.at(gnode);
        gnode_host_.erase(gnode);
        auto it = copies_cnt_.find(r);
        if (--it->second == 0) {
          copies_cnt_.erase(it);
          out.ops.push_back(Update::vertex_delete(hvert_of_host_.at(r)));
          vd_hosts.push_back(r);
        }
        break;
      }
    }
  }
  if (out.ops.empty()) return;
  auto ap = h_.apply_batch(out);
  for (EdgeId se : ed_spanner) {
    auto it = hedge_of_spanner_.find(se);
    hinfo_.erase(it->second);
    hedge_of_spanner_.erase(it);
  }
  assert(ap.inserted_vertices.size() == vi_hosts.size());
  for (size_t j = 0; j < vi_hosts.size(); ++j) {
    Vertex r = vi_hosts[j];
    assert(ap.inserted_vertices[j] == planned_hv.at(r));
    hvert_of_host_[r] = ap.inserted_vertices[j];
    host_of_hvert_[ap.inserted_vertices[j]] = r;
  }
  assert(ap.inserted_edges.size() == ei_plan.size());
  for (size_t j = 0; j < ei_plan.size(); ++j) {
    hedge_of_spanner_[ei_plan[j].se] = ap.inserted_edges[j];
    hinfo_[ap.inserted_edges[j]] = {ei_plan[j].se, ei_plan[j].gid};
  }
  for (Vertex r : vd_hosts) {
    host_of_hvert_.erase(hvert_of_host_.at(r));
    hvert_of_host_.erase(r);
  }
  const UpdateBatch& logged = h_.log().back();
  u_h->insert(u_h->end(), logged.ops.begin(), logged.ops.end());
}

std::vector<EdgeId> Sparsifier::reduce_degree_impl(Vertex node, int level, int64_t z,
                                                   std::vector<Update>* u_h,
                                                   SparsifierMetrics* m) {
  auto [i, r] = view_.label(node);  // throws UnknownVertex for non-nodes
  if (i != level) throw NotARoot();
  assert(forests_[i].roots().count(r) && "node labels name forest roots");
  std::vector<EdgeId> pre;  // host pre-images of incident level-i spanner edges
  for (EdgeId ge : view_.tilde().incident(node)) {
    if (view_.is_zero_link(ge)) continue;
    if (spanner_.spanner_edge(ge) == kNoEdge) continue;
    auto [j, he] = view_.preimage(ge);
    if (j != i) continue;
    pre.push_back(he);
  }
  std::map<Vertex, std::vector<std::pair<Vertex, EdgeId>>> kids;
  for (const auto& [e, cp] : forests_[i].forest_edges())
    kids[cp.second].push_back({cp.first, e});
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::vector<EdgeId> pair_edge;
  std::set<Vertex> in_tree{r};
  std::vector<Vertex> st{r};
  while (!st.empty()) {
    Vertex x = st.back();
    st.pop_back();
    auto it = kids.find(x);
    if (it == kids.end()) continue;
    for (auto [c, e] : it->second) {
      pairs.push_back({c, x});
      pair_edge.push_back(e);
      in_tree.insert(c);
      st.push_back(c);
    }
  }
  std::vector<EdgeId> cuts;
  if (pairs.empty()) return cuts;
  std::map<NodeId, int64_t> weight;
  for (EdgeId he : pre) {
    const EdgeRec& er = g_.edge(he);
    if (in_tree.count(er.u)) ++weight[er.u];
    if (er.v != er.u && in_tree.count(er.v)) ++weight[er.v];
  }
  std::vector<LssfDelta> deltas(forests_.size());
  for (size_t ix : find_sets(pairs, weight, z, {r})) {
    EdgeId fe = pair_edge[ix];
    if (!forests_[i].in_forest(fe)) continue;  // a repair cascade got there first
    deltas[i].append(forests_[i].delete_edge_from_forest(fe));
    cuts.push_back(fe);
  }
  if (!deltas[i].empty()) push_down(deltas, HostDelta{}, u_h, m);
  return cuts;
}

std::vector<EdgeId> Sparsifier::reduce_degree(Vertex node, int level, int64_t z) {
  std::vector<Update> u_h;
  SparsifierMetrics m;
  std::vector<EdgeId> cuts = reduce_degree_impl(node, level, z, &u_h, &m);
  UpdateBatch b;
  b.ops = std::move(u_h);
  journal_.push_back(b);
  for (auto& [hid, r] : hier_) refresh_hier(r);
  return cuts;
}

std::map<Vertex, int64_t> Sparsifier::level_degrees() const {
  std::map<Vertex, int64_t> deg;
  for (EdgeId ge : view_.tilde().live_edges()) {
    if (view_.is_zero_link(ge)) continue;
    if (spanner_.spanner_edge(ge) == kNoEdge) continue;
    const EdgeRec& er = view_.tilde().edge(ge);
    ++deg[er.u];
    if (er.v != er.u) ++deg[er.v];
  }
  return deg;
}

int64_t Sparsifier::degree_of(Vertex gtilde_node) const {
  auto deg = level_degrees();
  auto it = deg.find(gtilde_node);
  return it == deg.end() ? 0 : it->second;
}

std::pair<Vertex, int> Sparsifier::max_degree_pair() const {
  auto deg = level_degrees();
  Vertex best = kNoVertex;
  int64_t bd = -1;
  for (Vertex nd : view_.tilde().vertices()) {
    auto it = deg.find(nd);
    int64_t d = it == deg.end() ? 0 : it->second;
    if (d > bd) {
      bd = d;
      best = nd;
    }
  }
  if (best == kNoVertex) return {kNoVertex, -1};
  return {best, view_.label(best).first};
}

int64_t Sparsifier::potential() const {
  int64_t phi = 0;
  for (const auto& [nd, d] : level_degrees()) {
    (void)nd;
    phi += std::max<int64_t>(d - delta_ * gamma_deg_, 0);
  }
  return phi;
}

Vertex Sparsifier::h_vertex_of(Vertex host_v) const {
  auto it = hvert_of_host_.find(host_v);
  return it == hvert_of_host_.end() ? kNoVertex : it->second;
}

Vertex Sparsifier::host_of(Vertex h_v) const {
  auto it = host_of_hvert_.find(h_v);
  if (it == host_of_hvert_.end()) throw UnknownVertex(h_v);
  return it->second;
}

PathHandle Sparsifier::decode_edge(EdgeId h_edge) const {
  if (!h_.has_edge(h_edge)) throw UnknownEdge(h_edge);
  const HEdgeInfo& info = hinfo_.at(h_edge);
  Vertex host_u = host_of_hvert_.at(h_.edge(h_edge).u);
  int lvl = view_.preimage(info.gtilde_e).first;
  return view_.decode_image(info.gtilde_e, view_.node(lvl, host_u));
}

size_t Sparsifier::register_hier_forest(const FlatForest& f, int64_t gamma_cong_rep) {
  assert(gamma_cong_rep >= 1);
  int64_t deg_h = 1;
  for (Vertex v : h_.vertices()) deg_h = std::max<int64_t>(deg_h, h_.degree(v));
  RegisteredHier r;
  r.spec = f;
  r.budget = gamma_cong_rep * deg_h;
  refresh_hier(r);  // throws before anything is registered
  size_t handle = next_hier_++;
  hier_.emplace(handle, std::move(r));
  return handle;
}

void Sparsifier::hier_update(size_t handle, const FlatForest& f) {
  RegisteredHier& r = hier_.at(handle);
  assert(f.node_image.size() >= r.spec.node_image.size() && "forest nodes are only added");
  r.spec = f;
  refresh_hier(r);
}

void Sparsifier::unregister_hier_forest(size_t handle) {
  if (hier_.erase(handle) == 0) throw std::out_of_range("unknown forest handle");
}

const HierForest& Sparsifier::hier(size_t handle) const { return hier_.at(handle).out; }

void Sparsifier::refresh_hier(RegisteredHier& r) {
  // Copy assignment: nodes sharing a host image get distinct copies.
  std::map<Vertex, std::set<int64_t>> used;
  for (const auto& [x, j] : r.copy_of_node)
    used[host_of_hvert_.at(r.spec.node_image[x])].insert(j);
  for (int x = 0; x < (int)r.spec.node_image.size(); ++x) {
    if (r.copy_of_node.count(x)) continue;
    Vertex v = host_of_hvert_.at(r.spec.node_image[x]);
    int64_t j = 0;
    while (used[v].count(j)) ++j;
    if (j >= r.budget) throw BudgetExceeded();
    used[v].insert(j);
    r.copy_of_node[x] = j;
  }

  std::vector<Update> vi_ops;
  std::vector<std::pair<Vertex, Vertex>> new_nodes;  // (predicted id, host image)
  int64_t vi_count = 0;
  auto fresh_vertex = [&](Vertex host_img) {
    Vertex id = (Vertex)(r.out.f.vertex_bound() + vi_count);
    ++vi_count;
    vi_ops.push_back(Update::vertex_insert());
    new_nodes.push_back({id, host_img});
    return id;
  };
  auto ensure_root = [&](Vertex v, int64_t j) {
    auto key = std::make_pair(v, j);
    auto it = r.root_vid.find(key);
    if (it != r.root_vid.end()) return it->second;
    Vertex id = fresh_vertex(v);
    r.root_vid.emplace(key, id);
    return id;
  };
  auto ensure_member = [&](Vertex v, int64_t j, Vertex u, int i) {
    auto key = std::make_tuple(v, j, u, i);
    auto it = r.member_vid.find(key);
    if (it != r.member_vid.end()) return it->second;
    Vertex id = fresh_vertex(u);
    r.member_vid.emplace(key, id);
    return id;
  };

  // Kids adjacency per level, shared across copies.
  std::vector<std::map<Vertex, std::vector<std::pair<Vertex, EdgeId>>>> kids(forests_.size());
  for (size_t i = 0; i < forests_.size(); ++i)
    for (const auto& [e, cp] : forests_[i].forest_edges())
      kids[i][cp.second].push_back({cp.first, e});

  std::set<std::pair<Vertex, int64_t>> want_copy;
  for (int x = 0; x < (int)r.spec.node_image.size(); ++x)
    want_copy.insert({host_of_hvert_.at(r.spec.node_image[x]), r.copy_of_node.at(x)});

  std::map<std::tuple<Vertex, int64_t, int, EdgeId>, std::tuple<Vertex, Vertex, Length, EdgeId>>
      want_tree;
  for (const auto& [v, j] : want_copy) {
    ensure_root(v, j);
    for (int i = 0; i < (int)forests_.size(); ++i) {
      if (view_.node(i, v) == kNoVertex) continue;  // v roots no tree at this level
      std::vector<Vertex> st{v};
      while (!st.empty()) {
        Vertex x = st.back();
        st.pop_back();
        auto it = kids[i].find(x);
        if (it == kids[i].end()) continue;
        for (auto [c, e] : it->second) {
          Vertex a = x == v ? ensure_root(v, j) : ensure_member(v, j, x, i);
          Vertex b = ensure_member(v, j, c, i);
          want_tree[{v, j, i, e}] = {a, b, g_.edge(e).len, e};
          st.push_back(c);
        }
      }
    }
  }

  std::map<int, std::tuple<Vertex, Vertex, Length, EdgeId>> want_proj;
  for (int idx = 0; idx < (int)r.spec.edges.size(); ++idx) {
    auto [na, nb, hedge] = r.spec.edges[idx];
    const EdgeRec& her = h_.edge(hedge);
    Vertex xa = r.spec.node_image[na], xb = r.spec.node_image[nb];
    assert(((xa == her.u && xb == her.v) || (xa == her.v && xb == her.u)) &&
           "forest edge endpoints must image to the edge's endpoints");
    const HEdgeInfo& info = hinfo_.at(hedge);
    auto [i, he] = view_.preimage(info.gtilde_e);
    const EdgeRec& er = g_.edge(he);
    Vertex va = host_of_hvert_.at(xa), vb = host_of_hvert_.at(xb);
    Vertex ua, ub;
    if (view_.host_root(i, er.u) == va && view_.host_root(i, er.v) == vb) {
      ua = er.u;
      ub = er.v;
    } else {
      assert(view_.host_root(i, er.v) == va && view_.host_root(i, er.u) == vb);
      ua = er.v;
      ub = er.u;
    }
    int64_t ja = r.copy_of_node.at(na), jb = r.copy_of_node.at(nb);
    Vertex fa = ua == va ? ensure_root(va, ja) : ensure_member(va, ja, ua, i);
    Vertex fb = ub == vb ? ensure_root(vb, jb) : ensure_member(vb, jb, ub, i);
    want_proj[idx] = {fa, fb, er.len, he};
  }

  std::vector<Update> ed_ops, ei_ops;
  std::vector<std::tuple<Vertex, int64_t, int, EdgeId>> dead_tree;
  std::vector<int> dead_proj;
  struct InsPlan {
    bool tree;
    std::tuple<Vertex, int64_t, int, EdgeId> tkey;
    int pkey;
    EdgeId host_e;
  };
  std::vector<InsPlan> ins_plan;
  for (const auto& [key, eid] : r.tree_eid)
    if (!want_tree.count(key)) {
      ed_ops.push_back(Update::edge_delete(eid));
      dead_tree.push_back(key);
    }
  for (const auto& [key, want] : want_tree) {
    if (r.tree_eid.count(key)) continue;
    auto [a, b, len, he] = want;
    ei_ops.push_back(Update::edge_insert(a, b, len));
    ins_plan.push_back({true, key, -1, he});
  }
  for (const auto& [idx, eid] : r.proj_eid) {
    auto wit = want_proj.find(idx);
    bool keep = false;
    if (wit != want_proj.end()) {
      auto [a, b, len, he] = wit->second;
      const EdgeRec& cur = r.out.f.edge(eid);
      keep = ((cur.u == a && cur.v == b) || (cur.u == b && cur.v == a)) && cur.len == len &&
             r.out.embed.at(eid) == he;
    }
    if (keep) {
      want_proj.erase(wit);
    } else {
      ed_ops.push_back(Update::edge_delete(eid));
      dead_proj.push_back(idx);
    }
  }
  for (const auto& [idx, want] : want_proj) {
    auto [a, b, len, he] = want;
    ei_ops.push_back(Update::edge_insert(a, b, len));
    ins_plan.push_back({false, {}, idx, he});
  }

  UpdateBatch b;
  b.ops = std::move(vi_ops);
  b.ops.insert(b.ops.end(), ed_ops.begin(), ed_ops.end());
  b.ops.insert(b.ops.end(), ei_ops.begin(), ei_ops.end());
  r.out.last_changes = (int64_t)b.ops.size();
  r.out.max_changes = std::max(r.out.max_changes, r.out.last_changes);
  if (!b.ops.empty()) {
    auto ap = r.out.f.apply_batch(b);
    assert(ap.inserted_vertices.size() == new_nodes.size());
    for (size_t jx = 0; jx < new_nodes.size(); ++jx) {
      assert(ap.inserted_vertices[jx] == new_nodes[jx].first);
      r.out.f_to_host[new_nodes[jx].first] = new_nodes[jx].second;
    }
    for (const auto& key : dead_tree) {
      r.out.embed.erase(r.tree_eid.at(key));
      r.tree_eid.erase(key);
    }
    for (int idx : dead_proj) {
      r.out.embed.erase(r.proj_eid.at(idx));
      r.proj_eid.erase(idx);
    }
    assert(ap.inserted_edges.size() == ins_plan.size());
    for (size_t jx = 0; jx < ins_plan.size(); ++jx) {
      EdgeId eid = ap.inserted_edges[jx];
      if (ins_plan[jx].tree)
        r.tree_eid[ins_plan[jx].tkey] = eid;
      else
        r.proj_eid[ins_plan[jx].pkey] = eid;
      r.out.embed[eid] = ins_plan[jx].host_e;
    }
  }
  r.out.econg.clear();
  for (const auto& [eid, he] : r.out.embed) {
    (void)eid;
    ++r.out.econg[he];
  }
  for (const auto& [vH, x] : r.spec.terminal_node) {
    Vertex root = r.root_vid.at({host_of_hvert_.at(vH), r.copy_of_node.at(x)});
    auto it = r.out.a_to_f.find(vH);
    assert((it == r.out.a_to_f.end() || it->second == root) && "terminal images never move");
    r.out.a_to_f[vH] = root;
  }
}

void Sparsifier::self_check() {
  ps_.self_check();
  for (auto& f : forests_) f.self_check();
  view_.self_check();
  spanner_.self_check();
  for (Vertex t : ps_.terminals()) {
    for (auto& f : forests_) assert(f.roots().count(t) && "terminals root every forest");
    assert(hvert_of_host_.count(t) && "terminals appear in the sparsifier");
  }
  std::map<Vertex, int64_t> cnt;
  for (Vertex nd : view_.tilde().vertices()) {
    auto [i, rr] = view_.label(nd);
    (void)i;
    assert(gnode_host_.at(nd) == rr);
    ++cnt[rr];
  }
  assert(gnode_host_.size() == view_.tilde().num_vertices());
  assert(cnt == copies_cnt_);
  assert(hvert_of_host_.size() == host_of_hvert_.size());
  assert(hvert_of_host_.size() == h_.num_vertices());
  for (const auto& [v, hv] : hvert_of_host_) {
    assert(host_of_hvert_.at(hv) == v);
    assert(h_.has_vertex(hv));
    assert(g_.has_vertex(v) && "sparsifier vertices identify with live host vertices");
    assert(copies_cnt_.count(v));
  }
  int64_t member_imgs = 0;
  for (EdgeId ge : view_.tilde().live_edges()) {
    EdgeId se = spanner_.spanner_edge(ge);
    if (se == kNoEdge) continue;
    if (view_.is_zero_link(ge)) {
      assert(link_members_.count(se));
      continue;
    }
    ++member_imgs;
    EdgeId he = hedge_of_spanner_.at(se);
    const HEdgeInfo& info = hinfo_.at(he);
    assert(info.spanner_e == se && info.gtilde_e == ge);
    const EdgeRec& ger = view_.tilde().edge(ge);
    const EdgeRec& her = h_.edge(he);
    assert(her.len == ger.len);
    Vertex a = hvert_of_host_.at(gnode_host_.at(ger.u));
    Vertex b = hvert_of_host_.at(gnode_host_.at(ger.v));
    assert((her.u == a && her.v == b) || (her.u == b && her.v == a));
  }
  assert((int64_t)hedge_of_spanner_.size() == member_imgs);
  assert((int64_t)hinfo_.size() == member_imgs);
  assert((int64_t)h_.num_edges() == member_imgs);
  assert(member_imgs + (int64_t)link_members_.size() ==
         (int64_t)spanner_.spanner().num_edges());
  for (const auto& [he, info] : hinfo_) {
    (void)info;
    PathHandle p = decode_edge(he);
    assert(p.len <= h_.edge(he).len && "decoded paths never exceed the edge");
  }
  for (const auto& [hid, r] : hier_) {
    (void)hid;
    for (const auto& [eid, he] : r.out.embed) {
      assert(r.out.f.has_edge(eid));
      assert(g_.has_edge(he));
      assert(r.out.f.edge(eid).len == g_.edge(he).len);
    }
    assert((int64_t)r.out.embed.size() == (int64_t)r.out.f.num_edges());
    for (const auto& [fv, hv] : r.out.f_to_host) assert(r.out.f.has_vertex(fv) && hv >= 0);
    for (const auto& [vH, root] : r.out.a_to_f) {
      (void)vH;
      assert(r.out.f.has_vertex(root));
    }
  }
}

}  // namespace vsp
