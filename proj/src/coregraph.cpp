#include "vsp/coregraph.hpp"

#include <algorithm>
#include <cassert>

namespace vsp {

CoreGraphView::CoreGraphView(const DynGraph& host, const std::vector<StretchForest>& forests)
    : host_(host), forests_(&forests), lambda_(forests.size()) {
  assert(lambda_ >= 1 && "at least one forest");
  par_.resize(lambda_);
  kids_.resize(lambda_);
  medge_.resize(lambda_);
  images_.resize(lambda_);
  for (int i = 0; i < (int)lambda_; ++i) {
    for (const auto& [e, cp] : forests[i].forest_edges()) {
      par_[i][cp.first] = {cp.second, e};
      kids_[i][cp.second].insert(cp.first);
      medge_[i][e] = cp;
    }
  }
  for (int i = 0; i < (int)lambda_; ++i) {
    for (Vertex r : forests[i].roots()) {
      Vertex id = tilde_.add_vertex();
      node_id_[{i, r}] = id;
      node_label_[id] = {i, r};
      copies_[r].insert(i);
    }
  }
  for (const auto& [v, levs] : copies_) {
    if (levs.size() < 2) continue;
    int c = *levs.begin();
    for (int j : levs) {
      if (j == c) continue;
      EdgeId lk = tilde_.add_edge(node_id_.at({j, v}), node_id_.at({c, v}), 0);
      zl_edge_[{j, v}] = lk;
      zl_rev_[lk] = {j, v};
    }
  }
  Length lmax = 1;
  for (EdgeId e : host_.live_edges()) lmax = std::max(lmax, host_.edge(e).len);
  len_cap_ = ((Length)host_.num_vertices() + 1) * lmax;
  for (int i = 0; i < (int)lambda_; ++i) {
    for (EdgeId e : host_.live_edges()) {
      const EdgeRec& er = host_.edge(e);
      Length len = forests[i].str_over(e) * er.len;
      EdgeId img = tilde_.add_edge(node_id_.at({i, host_root(i, er.u)}),
                                   node_id_.at({i, host_root(i, er.v)}), len);
      images_[i][e] = img;
      preimage_[img] = {i, e};
    }
  }
}

Vertex CoreGraphView::node(int i, Vertex root) const {
  auto it = node_id_.find({i, root});
  return it == node_id_.end() ? kNoVertex : it->second;
}

std::pair<int, Vertex> CoreGraphView::label(Vertex node) const {
  auto it = node_label_.find(node);
  if (it == node_label_.end()) throw UnknownVertex(node);
  return it->second;
}

Vertex CoreGraphView::host_root(int i, Vertex v) const {
  for (;;) {
    auto it = par_[i].find(v);
    if (it == par_[i].end()) return v;
    v = it->second.first;
  }
}

EdgeId CoreGraphView::image(int i, EdgeId host_edge) const {
  auto it = images_[i].find(host_edge);
  return it == images_[i].end() ? kNoEdge : it->second;
}

std::pair<int, EdgeId> CoreGraphView::preimage(EdgeId e) const {
  auto it = preimage_.find(e);
  if (it == preimage_.end()) throw UnknownEdge(e);
  return it->second;
}

std::vector<EdgeId> CoreGraphView::mirror_root_path(int i, Vertex v) const {
  std::vector<EdgeId> out;
  for (;;) {
    auto it = par_[i].find(v);
    if (it == par_[i].end()) return out;
    out.push_back(it->second.second);
    v = it->second.first;
  }
}

std::vector<Vertex> CoreGraphView::mirror_subtree(int i, Vertex c) const {
  std::vector<Vertex> out{c}, stack{c};
  while (!stack.empty()) {
    Vertex x = stack.back();
    stack.pop_back();
    auto it = kids_[i].find(x);
    if (it == kids_[i].end()) continue;
    for (Vertex y : it->second) {
      out.push_back(y);
      stack.push_back(y);
    }
  }
  return out;
}

UpdateBatch CoreGraphView::apply_forest_delta(const std::vector<LssfDelta>& deltas,
                                              const HostDelta& host) {
  assert(deltas.size() == lambda_ && "one delta per maintained forest");
  // Same-batch insert+delete pairs cancel; nothing of theirs ever projects.
  std::vector<Vertex> ins_v, del_v;
  for (Vertex v : host.inserted_vertices)
    if (std::find(host.deleted_vertices.begin(), host.deleted_vertices.end(), v) ==
        host.deleted_vertices.end())
      ins_v.push_back(v);
  for (Vertex v : host.deleted_vertices)
    if (std::find(host.inserted_vertices.begin(), host.inserted_vertices.end(), v) ==
        host.inserted_vertices.end())
      del_v.push_back(v);

  std::vector<Update> ops;
  struct Plan {
    bool link;
    int level;
    EdgeId host_e;
    Vertex host_v;
  };
  std::vector<Plan> plans;                           // one per EdgeInsert op
  std::vector<std::pair<int, Vertex>> vi_labels;     // one per VertexInsert op
  std::vector<std::tuple<int, EdgeId, EdgeId>> gone; // images to unregister
  std::vector<std::pair<std::pair<int, Vertex>, EdgeId>> gone_links;

  // Images of host-deleted edges go first; their endpoints never move.
  std::set<EdgeId> deleted_host(host.deleted_edges.begin(), host.deleted_edges.end());
  for (EdgeId e : host.deleted_edges) {
    for (int i = 0; i < (int)lambda_; ++i) {
      auto it = images_[i].find(e);
      if (it == images_[i].end()) continue;
      ops.push_back(Update::edge_delete(it->second));
      gone.emplace_back(i, e, it->second);
    }
  }
  for (Vertex v : del_v) {
    auto ct = copies_.find(v);
    if (ct == copies_.end()) continue;
    for (int j : ct->second) {
      auto it = zl_edge_.find({j, v});
      if (it == zl_edge_.end()) continue;
      ops.push_back(Update::edge_delete(it->second));
      gone_links.push_back({{j, v}, it->second});
    }
  }

  // Replay the forest cuts on the mirrors; the child side loses its root.
  std::vector<std::set<Vertex>> touched(lambda_);
  std::vector<std::pair<int, Vertex>> new_labels;
  for (int i = 0; i < (int)lambda_; ++i) {
    assert(deltas[i].new_roots.size() == deltas[i].cut_edges.size() &&
           "every cut yields exactly its child as a new root");
    for (size_t j = 0; j < deltas[i].cut_edges.size(); ++j) {
      EdgeId fe = deltas[i].cut_edges[j];
      auto it = medge_[i].find(fe);
      assert(it != medge_[i].end() && "cut edge must mirror a forest edge");
      auto [c, p] = it->second;
      assert(c == deltas[i].new_roots[j] && "cuts report the child as the new root");
      medge_[i].erase(it);
      par_[i].erase(c);
      kids_[i][p].erase(c);
      if (kids_[i][p].empty()) kids_[i].erase(p);
      for (Vertex s : mirror_subtree(i, c)) touched[i].insert(s);
      new_labels.push_back({i, c});
    }
  }

  // New nodes are explicit vertex inserts with predictable ids.
  std::map<std::pair<int, Vertex>, Vertex> pending;
  Vertex next_id = tilde_.vertex_bound();
  auto plan_vi = [&](int i, Vertex r) {
    assert(!node_id_.count({i, r}) && !pending.count({i, r}) && "fresh node label");
    ops.push_back(Update::vertex_insert());
    vi_labels.push_back({i, r});
    pending[{i, r}] = next_id++;
  };
  for (auto [i, c] : new_labels) plan_vi(i, c);
  for (Vertex v : ins_v)
    for (int i = 0; i < (int)lambda_; ++i) plan_vi(i, v);

  auto final_node = [&](int i, Vertex root) {
    auto it = node_id_.find({i, root});
    if (it != node_id_.end()) return it->second;
    auto jt = pending.find({i, root});
    assert(jt != pending.end() && "placement targets an existing or pending node");
    return jt->second;
  };

  // Re-home every image whose endpoint roots changed, exactly once.
  for (int i = 0; i < (int)lambda_; ++i) {
    std::set<EdgeId> cand;
    for (Vertex s : touched[i])
      for (EdgeId e : host_.incident(s)) cand.insert(e);
    for (EdgeId e : cand) {
      if (deleted_host.count(e)) continue;
      auto it = images_[i].find(e);
      if (it == images_[i].end()) continue;  // inserted this batch, placed below
      EdgeId img = it->second;
      const EdgeRec& her = host_.edge(e);
      Vertex a = final_node(i, host_root(i, her.u));
      Vertex b = final_node(i, host_root(i, her.v));
      const EdgeRec& ter = tilde_.edge(img);
      if ((ter.u == a && ter.v == b) || (ter.u == b && ter.v == a)) continue;
      ops.push_back(Update::edge_delete(img));
      gone.emplace_back(i, e, img);
      ops.push_back(Update::edge_insert(a, b, ter.len));
      plans.push_back({false, i, e, kNoVertex});
    }
  }

  // Zero-link upkeep for hosts that gained copies; the star re-centers when a
  // lower-level copy appears.
  std::map<Vertex, std::set<int>> added;
  for (auto [i, c] : new_labels) added[c].insert(i);
  for (Vertex v : ins_v)
    for (int i = 0; i < (int)lambda_; ++i) added[v].insert(i);
  for (const auto& [v, levs] : added) {
    std::set<int> oldl;
    auto ct = copies_.find(v);
    if (ct != copies_.end()) oldl = ct->second;
    std::set<int> newl = oldl;
    newl.insert(levs.begin(), levs.end());
    int newc = *newl.begin();
    auto plan_link = [&](int j) {
      ops.push_back(Update::edge_insert(final_node(j, v), final_node(newc, v), 0));
      plans.push_back({true, j, kNoEdge, v});
    };
    if (oldl.empty()) {
      for (int j : newl)
        if (j != newc) plan_link(j);
    } else if (int oldc = *oldl.begin(); newc == oldc) {
      for (int j : levs) plan_link(j);
    } else {
      for (int j : oldl) {
        if (j == oldc) continue;
        EdgeId lk = zl_edge_.at({j, v});
        ops.push_back(Update::edge_delete(lk));
        gone_links.push_back({{j, v}, lk});
        plan_link(j);
      }
      plan_link(oldc);
      for (int j : levs)
        if (j != newc) plan_link(j);
    }
  }

  // Project freshly inserted host edges at their final positions.
  for (EdgeId e : host.inserted_edges) {
    if (!host_.edge(e).live) continue;  // inserted then deleted in this batch
    const EdgeRec& her = host_.edge(e);
    for (int i = 0; i < (int)lambda_; ++i) {
      Length len = (*forests_)[i].str_over(e) * her.len;
      ops.push_back(Update::edge_insert(final_node(i, host_root(i, her.u)),
                                        final_node(i, host_root(i, her.v)), len));
      plans.push_back({false, i, e, kNoVertex});
    }
  }

  std::vector<std::pair<int, Vertex>> vd_labels;
  for (Vertex v : del_v) {
    auto ct = copies_.find(v);
    if (ct == copies_.end()) continue;
    for (int j : ct->second) {
      ops.push_back(Update::vertex_delete(node_id_.at({j, v})));
      vd_labels.push_back({j, v});
    }
  }

  UpdateBatch b;
  b.ops = std::move(ops);
  b.split = !new_labels.empty();
  last_batch_ops_ = (int64_t)b.ops.size();
  max_batch_ops_ = std::max(max_batch_ops_, last_batch_ops_);
  if (b.ops.empty()) return b;
  auto ap = tilde_.apply_batch(b);

  for (auto [i, e, img] : gone) {
    images_[i].erase(e);
    preimage_.erase(img);
  }
  for (auto& [key, lk] : gone_links) {
    zl_edge_.erase(key);
    zl_rev_.erase(lk);
  }
  assert(ap.inserted_vertices.size() == vi_labels.size() && "one node per planned label");
  for (size_t j = 0; j < vi_labels.size(); ++j) {
    auto lbl = vi_labels[j];
    Vertex id = ap.inserted_vertices[j];
    assert(id == pending.at(lbl) && "node ids must match the prediction");
    node_id_[lbl] = id;
    node_label_[id] = lbl;
    copies_[lbl.second].insert(lbl.first);
  }
  assert(ap.inserted_edges.size() == plans.size() && "one plan per inserted edge");
  for (size_t j = 0; j < plans.size(); ++j) {
    EdgeId id = ap.inserted_edges[j];
    const Plan& pl = plans[j];
    if (pl.link) {
      zl_edge_[{pl.level, pl.host_v}] = id;
      zl_rev_[id] = {pl.level, pl.host_v};
    } else {
      images_[pl.level][pl.host_e] = id;
      preimage_[id] = {pl.level, pl.host_e};
    }
  }
  for (auto lbl : vd_labels) {
    node_label_.erase(node_id_.at(lbl));
    node_id_.erase(lbl);
    auto ct = copies_.find(lbl.second);
    ct->second.erase(lbl.first);
    if (ct->second.empty()) copies_.erase(ct);
  }
  return tilde_.log().back();
}

PathHandle CoreGraphView::decode_image(EdgeId e, Vertex from_node) const {
  auto [i, he] = preimage(e);
  const EdgeRec& ter = tilde_.edge(e);
  assert(ter.live && "decode only live images");
  assert(ter.u != ter.v && "self-loop images do not decode as segments");
  assert((from_node == ter.u || from_node == ter.v) && "entry must be an endpoint");
  const EdgeRec& her = host_.edge(he);
  Vertex hu = her.u, hv = her.v;
  Vertex ra = host_root(i, hu), rb = host_root(i, hv);
  Vertex from_root = node_label_.at(from_node).second;
  if (from_root != ra) {
    std::swap(hu, hv);
    std::swap(ra, rb);
  }
  assert(from_root == ra && "entry node must hold one endpoint's root");
  std::vector<EdgeId> edges = mirror_root_path(i, hu);
  std::reverse(edges.begin(), edges.end());
  edges.push_back(he);
  std::vector<EdgeId> down = mirror_root_path(i, hv);
  edges.insert(edges.end(), down.begin(), down.end());
  return host_.make_path(ra, edges);
}

PathHandle CoreGraphView::decode_path(const PathHandle& p) const {
  Vertex cur_node = p.src;
  Vertex cur_host = node_label_.at(p.src).second;
  std::vector<EdgeId> out;
  for (EdgeId te : p.edges) {
    const EdgeRec& ter = tilde_.edge(te);
    Vertex nxt = ter.other(cur_node);
    if (is_zero_link(te)) {
      assert(node_label_.at(nxt).second == cur_host && "links join copies of one host vertex");
      cur_node = nxt;
      continue;
    }
    PathHandle seg = decode_image(te, cur_node);
    assert(seg.src == cur_host && "segments must chain");
    out.insert(out.end(), seg.edges.begin(), seg.edges.end());
    cur_host = seg.dst;
    cur_node = nxt;
  }
  return host_.make_path(node_label_.at(p.src).second, out);
}

CoreCanon CoreGraphView::canonical_form() const {
  CoreCanon c;
  for (const auto& [lbl, id] : node_id_) c.nodes.insert(lbl);
  for (EdgeId e : tilde_.live_edges()) {
    const EdgeRec& er = tilde_.edge(e);
    auto la = node_label_.at(er.u), lb = node_label_.at(er.v);
    if (lb < la) std::swap(la, lb);
    auto zt = zl_rev_.find(e);
    if (zt != zl_rev_.end())
      c.edges.insert({la, lb, er.len, -1, (int64_t)zt->second.second});
    else {
      auto [i, he] = preimage_.at(e);
      c.edges.insert({la, lb, er.len, i, (int64_t)he});
    }
  }
  return c;
}

void CoreGraphView::self_check() const {
  assert(node_id_.size() == node_label_.size());
  size_t nlinks = 0, nimgs = 0;
  for (int i = 0; i < (int)lambda_; ++i) {
    assert(medge_[i] == (*forests_)[i].forest_edges() && "mirror tracks the forest");
    std::set<Vertex> roots;
    for (const auto& [lbl, id] : node_id_)
      if (lbl.first == i) roots.insert(lbl.second);
    assert(roots == (*forests_)[i].roots() && "one node per root");
    for (EdgeId e : host_.live_edges()) {
      auto it = images_[i].find(e);
      assert(it != images_[i].end() && "every live host edge projects at every level");
      const EdgeRec& ter = tilde_.edge(it->second);
      const EdgeRec& her = host_.edge(e);
      assert(ter.live);
      assert(ter.len == (*forests_)[i].str_over(e) * her.len && "image length is str*l");
      Vertex a = node_id_.at({i, host_root(i, her.u)});
      Vertex b = node_id_.at({i, host_root(i, her.v)});
      assert(((ter.u == a && ter.v == b) || (ter.u == b && ter.v == a)) &&
             "image endpoints are the endpoint roots' nodes");
      assert(preimage_.at(it->second) == std::make_pair(i, e));
    }
    nimgs += images_[i].size();
    assert(images_[i].size() == (size_t)host_.num_edges() && "no stale images");
  }
  for (const auto& [v, levs] : copies_) {
    assert(!levs.empty());
    int c = *levs.begin();
    for (int j : levs) {
      assert(node_id_.count({j, v}));
      auto it = zl_edge_.find({j, v});
      if (j == c) {
        assert(it == zl_edge_.end() && "the center copy holds no link");
        continue;
      }
      assert(it != zl_edge_.end() && "every non-center copy links to the center");
      const EdgeRec& ler = tilde_.edge(it->second);
      assert(ler.live && ler.len == 0);
      Vertex a = node_id_.at({j, v}), b = node_id_.at({c, v});
      assert(((ler.u == a && ler.v == b) || (ler.u == b && ler.v == a)));
      assert(zl_rev_.at(it->second) == std::make_pair(j, v));
      ++nlinks;
    }
  }
  assert(nlinks == zl_edge_.size() && nlinks == zl_rev_.size());
  size_t live = 0;
  for (EdgeId e : tilde_.live_edges()) {
    ++live;
    const EdgeRec& er = tilde_.edge(e);
    assert((er.len == 0 && zl_rev_.count(e)) ||
           (er.len >= 1 && er.len <= len_cap_ && preimage_.count(e)));
  }
  assert(live == nlinks + nimgs && "every live edge is a link or an image");
  assert((size_t)tilde_.num_vertices() == node_id_.size());
}

}  // namespace vsp
