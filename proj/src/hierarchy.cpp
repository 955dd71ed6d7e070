#include "vsp/hierarchy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <tuple>

#include "vsp/spt.hpp"

namespace vsp {

namespace {

// Owned level copies track the producing sparsifier's H edge-for-edge; every
// query decodes through that id identity, so verify it aggressively.
bool graphs_match(const DynGraph& a, const DynGraph& b) {
  if (a.vertices() != b.vertices()) return false;
  std::vector<EdgeId> ea = a.live_edges(), eb = b.live_edges();
  if (ea != eb) return false;
  for (EdgeId e : ea) {
    const EdgeRec& ra = a.edge(e);
    const EdgeRec& rb = b.edge(e);
    if (ra.u != rb.u || ra.v != rb.v || ra.len != rb.len) return false;
  }
  return true;
}

}  // namespace

Hierarchy::Hierarchy(DynGraph& g, HierarchyConfig cfg)
    : g_(g), cfg_(cfg), lam_(cfg.levels) {
  assert(lam_ >= 0);
  int64_t m0 = std::max<int64_t>((int64_t)g_.num_edges(), 2);
  if (cfg_.k > 0) {
    k_ = cfg_.k;
  } else if (lam_ > 0) {
    k_ = (int64_t)std::ceil(std::pow((double)m0, 1.0 / lam_));
  }
  if (!cfg_.rebuild_every.empty()) {
    assert((int)cfg_.rebuild_every.size() == lam_);
    period_ = cfg_.rebuild_every;
  } else {
    for (int i = 0; i < lam_; ++i) {
      double u = std::pow((double)m0, 1.0 - (double)(i + 1) / lam_);
      period_.push_back(std::max<int64_t>(1, (int64_t)std::llround(u)));
    }
  }
  owned_.resize(lam_ + 1);
  sp_.resize(lam_);
  gen_.assign(lam_ + 1, 0);
  last_batches_.assign(lam_ + 1, UpdateBatch{});
  rebuild_from(0);
  refresh_queries();
}

const DynGraph& Hierarchy::level_graph(int i) const {
  assert(i >= 0 && i <= lam_);
  return i == 0 ? g_ : *owned_[i];
}

const Sparsifier& Hierarchy::level_sparsifier(int i) const {
  assert(i >= 0 && i < lam_);
  return *sp_[i];
}

int64_t Hierarchy::delta_of(const DynGraph& g) const {
  if (g.degree_cap() > 0) return g.degree_cap();
  int64_t d = 1;
  for (Vertex v : g.vertices()) d = std::max<int64_t>(d, g.degree(v));
  return d;
}

void Hierarchy::rebuild_from(int i) {
  for (int j = lam_ - 1; j >= i; --j) sp_[j].reset();
  for (int j = i; j < lam_; ++j) {
    DynGraph& host = level(j);
    sp_[j] = std::make_unique<Sparsifier>(host, k_, cfg_.levels_cfg, delta_of(host),
                                          cfg_.gamma_deg_constr, cfg_.spanner_budget);
    owned_[j + 1] = std::make_unique<DynGraph>(sp_[j]->h());
    ++gen_[j + 1];
  }
}

void Hierarchy::apply(const UpdateBatch& b) {
  last_batches_.assign(lam_ + 1, UpdateBatch{});
  last_rebuild_ = -1;
  for (const Update& op : b.ops) {
    UpdateBatch cur;
    cur.ops.push_back(op);
    for (int i = 0; i <= lam_; ++i) {
      for (const Update& o : cur.ops) last_batches_[i].ops.push_back(o);
      if (i == lam_) {
        if (lam_ == 0) g_.apply_batch(cur);
        break;
      }
      cur = sp_[i]->maintain(cur);
    }
    if (op.kind == Update::VertexDelete) marked_.erase(op.w);
    ++t_;
    for (int i = 0; i < lam_; ++i) {
      if (t_ % period_[i] == 0) {
        rebuild_from(i);
        last_rebuild_ = last_rebuild_ == -1 ? i : std::min(last_rebuild_, i);
        break;
      }
    }
  }
  refresh_queries();
}

void Hierarchy::force_rebuild(int level) {
  assert(level >= 0 && level <= lam_);
  last_batches_.assign(lam_ + 1, UpdateBatch{});
  if (level < lam_) {
    rebuild_from(level);
    last_rebuild_ = level;
  } else {
    last_rebuild_ = -1;
  }
  refresh_queries();
}

void Hierarchy::refresh_queries() {
  top_tab_.clear();
  const DynGraph& top = level_graph(lam_);
  for (Vertex s : top.vertices()) {
    SPTree t = tiebreak_sssp(top, {.sources = {s}});
    for (Vertex v : top.vertices())
      if (t.reached(v)) top_tab_[{s, v}] = t.dist[v];
  }
  wit_journal_.clear();
  if (marked_.size() >= 2) {
    wit_ = run_witness();
  } else {
    wit_.reset();
  }
}

std::optional<Length> Hierarchy::top_dist(Vertex x, Vertex y) const {
  auto it = top_tab_.find({x, y});
  if (it == top_tab_.end()) return std::nullopt;
  return it->second;
}

std::optional<Length> Hierarchy::query_dist(Vertex u, Vertex v) const {
  if (!g_.has_vertex(u)) throw UnknownVertex(u);
  if (!g_.has_vertex(v)) throw UnknownVertex(v);
  Vertex xu = u, xv = v;
  Length du = 0, dv = 0;
  for (int i = 0;; ++i) {
    if (xu == xv) return du + dv;
    if (i == lam_) {
      auto d = top_dist(xu, xv);
      if (!d) return std::nullopt;
      return du + *d + dv;
    }
    const PivotState& ps = sp_[i]->pivots();
    const std::vector<Vertex>& ball = ps.ball(xu);
    if (std::find(ball.begin(), ball.end(), xv) != ball.end())
      return du + ps.paths(xu).at(xv).len + dv;
    du += ps.dist_to_a(xu);
    dv += ps.dist_to_a(xv);
    xu = sp_[i]->h_vertex_of(ps.pivot(xu));
    xv = sp_[i]->h_vertex_of(ps.pivot(xv));
    assert(xu != kNoVertex && xv != kNoVertex);
  }
}

// Rewrite a path of level `lvl` into the host graph by splicing each edge's
// decoded path, one level at a time.
PathHandle Hierarchy::expand(int lvl, PathHandle p) const {
  while (lvl > 0) {
    const Sparsifier& s = *sp_[lvl - 1];
    const DynGraph& hg = level_graph(lvl);
    PathHandle out;
    out.src = out.dst = s.host_of(p.src);
    Vertex cur = p.src;
    for (EdgeId e : p.edges) {
      Vertex nxt = hg.edge(e).other(cur);
      PathHandle sub = s.decode_edge(e);
      if (sub.src != s.host_of(cur)) sub = sub.reversed();
      assert(sub.src == s.host_of(cur) && sub.dst == s.host_of(nxt));
      out = path_concat(out, sub);
      cur = nxt;
    }
    p = std::move(out);
    --lvl;
  }
  return p;
}

std::optional<PathHandle> Hierarchy::query_path(Vertex u, Vertex v) const {
  if (!g_.has_vertex(u)) throw UnknownVertex(u);
  if (!g_.has_vertex(v)) throw UnknownVertex(v);
  std::vector<std::pair<int, PathHandle>> segu, segv;  // (level, in-level path)
  Vertex xu = u, xv = v;
  for (int i = 0;; ++i) {
    std::optional<PathHandle> mid;  // in-level path at level i
    if (xu == xv) {
      PathHandle e;
      e.src = e.dst = xu;
      mid = e;
    } else if (i == lam_) {
      SPTree t = tiebreak_sssp(level_graph(lam_), {.sources = {xu}});
      if (!t.reached(xv)) return std::nullopt;
      mid = t.path_to(level_graph(lam_), xv);
    } else {
      const PivotState& ps = sp_[i]->pivots();
      const std::vector<Vertex>& ball = ps.ball(xu);
      if (std::find(ball.begin(), ball.end(), xv) != ball.end()) mid = ps.paths(xu).at(xv);
    }
    if (mid) {
      PathHandle acc = expand(i, *mid);
      for (auto it = segu.rbegin(); it != segu.rend(); ++it)
        acc = path_concat(expand(it->first, it->second), acc);
      for (auto it = segv.rbegin(); it != segv.rend(); ++it)
        acc = path_concat(acc, expand(it->first, it->second).reversed());
      assert(acc.src == u && acc.dst == v);
      return acc;
    }
    const PivotState& ps = sp_[i]->pivots();
    segu.push_back({i, ps.pivot_path(xu)});
    segv.push_back({i, ps.pivot_path(xv)});
    xu = sp_[i]->h_vertex_of(ps.pivot(xu));
    xv = sp_[i]->h_vertex_of(ps.pivot(xv));
    assert(xu != kNoVertex && xv != kNoVertex);
  }
}

void Hierarchy::add_diameter_vertex(Vertex x) {
  if (!g_.has_vertex(x)) throw UnknownVertex(x);
  marked_.insert(x);
  wit_journal_.clear();
  if (marked_.size() >= 2) {
    wit_ = run_witness();
  } else {
    wit_.reset();
  }
}

void Hierarchy::remove_diameter_vertex(Vertex x) {
  marked_.erase(x);
  wit_journal_.clear();
  if (marked_.size() >= 2) {
    wit_ = run_witness();
  } else {
    wit_.reset();
  }
}

std::pair<Vertex, Vertex> Hierarchy::query_diameter_witness() const {
  if (!wit_) throw DiameterSetTooSmall();
  return *wit_;
}

// Weighted chain tree: the node of vertex z at level i hangs below the image
// of its pivot at level i+1 with weight dist(z_i, pivot). Sweeping the balls
// along x's own chain, then every top-level root, examines each marked vertex
// exactly once (the farthest-in-subtree candidate), unmarking subtrees as it
// goes; all marks are restored before returning.
std::pair<Vertex, Vertex> Hierarchy::run_witness() {
  struct Chain {
    std::vector<Vertex> at;
    std::vector<Length> d;
  };
  std::map<Vertex, Chain> ch;
  for (Vertex z : marked_) {
    Chain c;
    c.at.push_back(z);
    c.d.push_back(0);
    Vertex x = z;
    Length acc = 0;
    for (int i = 0; i < lam_; ++i) {
      const PivotState& ps = sp_[i]->pivots();
      acc += ps.dist_to_a(x);
      x = sp_[i]->h_vertex_of(ps.pivot(x));
      assert(x != kNoVertex);
      c.at.push_back(x);
      c.d.push_back(acc);
    }
    ch[z] = std::move(c);
  }
  Vertex x0 = *marked_.begin();
  Vertex y = x0;
  Length dbest = 0;
  bool dinf = false;
  auto consider = [&](int lvl, Vertex w) {
    Vertex pick = kNoVertex;
    Length far = -1;
    for (Vertex z : marked_) {
      const Chain& c = ch.at(z);
      if (c.at[lvl] != w) continue;
      if (c.d[lvl] > far) {
        far = c.d[lvl];
        pick = z;
      }
    }
    if (pick != kNoVertex) {
      auto dq = query_dist(x0, pick);
      if (!dq) {
        if (!dinf) {
          dinf = true;
          y = pick;
        }
      } else if (!dinf && *dq > dbest) {
        dbest = *dq;
        y = pick;
      }
    }
    std::vector<Vertex> drop;
    for (Vertex z : marked_)
      if (ch.at(z).at[lvl] == w) drop.push_back(z);
    for (Vertex z : drop) {
      marked_.erase(z);
      wit_journal_.push_back(z);
    }
  };
  const Chain cx = ch.at(x0);
  for (int i = 0; i < lam_; ++i) {
    const PivotState& ps = sp_[i]->pivots();
    for (Vertex w : ps.ball(cx.at[i])) consider(i, w);
    consider(i + 1, cx.at[i + 1]);
  }
  for (Vertex w : level_graph(lam_).vertices()) consider(lam_, w);
  assert(marked_.empty() && "the sweep visits every marked chain");
  for (Vertex z : wit_journal_) marked_.insert(z);
  return {x0, y};
}

const HierForest& Hierarchy::low_diam_tree() {
  refresh_trees();
  return ldt_;
}

const DepthTree& Hierarchy::low_depth_tree() {
  refresh_trees();
  return ddt_;
}

Hierarchy::Part Hierarchy::build_part(int i) {
  Part part;
  const DynGraph& li = level_graph(i);
  if (i == lam_) {
    std::vector<Vertex> vs = li.vertices();
    if (!vs.empty()) {
      SPTree t = tiebreak_sssp(li, {.sources = {vs.front()}});
      for (Vertex v : vs) {
        if (v == vs.front()) continue;
        assert(t.reached(v));
        part.raw.push_back({v, t.parent_vertex[v], t.parent_edge[v], li.edge(t.parent_edge[v]).len});
      }
    }
  } else {
    const PivotState& ps = sp_[i]->pivots();
    for (Vertex v : li.vertices()) {
      Vertex p = ps.forest_parent(v);
      if (p == kNoVertex) continue;
      EdgeId pe = ps.forest_parent_edge(v);
      part.raw.push_back({v, p, pe, li.edge(pe).len});
    }
  }
  if (i == 0) {
    for (Vertex v : li.vertices()) part.tmap[v] = v;
    return part;  // the forest already lives in the host graph
  }
  FlatForest flat;
  std::map<Vertex, int> idx;
  for (Vertex v : li.vertices()) {
    idx[v] = (int)flat.node_image.size();
    flat.node_image.push_back(v);
  }
  for (auto& [c, p, pe, len] : part.raw) {
    (void)len;
    flat.edges.push_back({idx.at(c), idx.at(p), pe});
  }
  for (Vertex v : li.vertices()) part.tmap[v] = idx.at(v);
  for (int j = i - 1; j >= 0; --j) {
    flat.terminal_node.clear();
    for (auto& [t, n] : part.tmap) {
      (void)t;
      Vertex key = flat.node_image[n];
      assert(!flat.terminal_node.count(key) && "tracked nodes keep distinct images");
      flat.terminal_node[key] = (int)n;
    }
    size_t hdl = sp_[j]->register_hier_forest(flat, cfg_.gamma_cong_rep);
    HierForest out = sp_[j]->hier(hdl);
    sp_[j]->unregister_hier_forest(hdl);
    std::map<Vertex, Vertex> nt;
    for (auto& [t, n] : part.tmap) nt[t] = out.a_to_f.at(flat.node_image[n]);
    part.tmap = std::move(nt);
    if (j > 0) {
      FlatForest nf;
      nf.node_image.assign(out.f.vertex_bound(), kNoVertex);
      for (Vertex x : out.f.vertices()) nf.node_image[x] = out.f_to_host.at(x);
      for (EdgeId e : out.f.live_edges()) {
        const EdgeRec& er = out.f.edge(e);
        nf.edges.push_back({(int)er.u, (int)er.v, out.embed.at(e)});
      }
      flat = std::move(nf);
    }
    part.hf = std::move(out);
  }
  return part;
}

void Hierarchy::refresh_trees() {
  if (tree_epoch_ == t_ && ldt_.f.num_vertices() > 0) return;
  const DynGraph& top = level_graph(lam_);
  std::vector<Vertex> tv = top.vertices();
  for (Vertex v : tv)
    if (!top_tab_.count({tv.front(), v})) throw Disconnected();

  std::vector<Part> parts;
  for (int i = 0; i <= lam_; ++i) parts.push_back(build_part(i));

  using PK = std::pair<int, Vertex>;  // (part, node)
  std::map<PK, PK> up;
  auto find = [&up](PK a) {
    while (true) {
      auto it = up.find(a);
      if (it == up.end()) return a;
      a = it->second;
    }
  };
  auto unite = [&](PK a, PK b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    up[b] = a;
  };
  for (int i = 0; i < lam_; ++i)
    for (Vertex a : sp_[i]->terminals())
      unite({i, parts[i].tmap.at(a)}, {i + 1, parts[i + 1].tmap.at(sp_[i]->h_vertex_of(a))});

  auto part_nodes = [&](int i) {
    return i == 0 ? level_graph(0).vertices() : parts[i].hf.f.vertices();
  };
  DynGraph f(1);
  std::map<PK, Vertex> fv;
  std::map<Vertex, Vertex> f2h;
  for (int i = 0; i <= lam_; ++i) {
    for (Vertex n : part_nodes(i)) {
      PK r = find({i, n});
      auto it = fv.find(r);
      Vertex fid;
      if (it == fv.end()) {
        fid = f.add_vertex();
        fv[r] = fid;
      } else {
        fid = it->second;
      }
      Vertex host = i == 0 ? n : parts[i].hf.f_to_host.at(n);
      if (!f2h.count(fid)) {
        f2h[fid] = host;
      } else {
        assert(f2h.at(fid) == host && "merged nodes share a base vertex");
      }
    }
  }
  auto fvid = [&](int i, Vertex n) { return fv.at(find({i, n})); };
  std::map<EdgeId, EdgeId> embedF;
  std::map<EdgeId, int64_t> econg;
  for (auto& [c, p, ge, len] : parts[0].raw) {
    EdgeId ne = f.add_edge(fvid(0, c), fvid(0, p), len);
    embedF[ne] = ge;
    ++econg[ge];
  }
  for (int i = 1; i <= lam_; ++i) {
    for (EdgeId e : parts[i].hf.f.live_edges()) {
      const EdgeRec& er = parts[i].hf.f.edge(e);
      EdgeId ne = f.add_edge(fvid(i, er.u), fvid(i, er.v), er.len);
      embedF[ne] = parts[i].hf.embed.at(e);
      ++econg[embedF.at(ne)];
    }
  }
  assert(f.num_edges() + 1 == f.num_vertices() && "the glued forest is a tree");
  std::map<Vertex, Vertex> a_to_f;
  for (Vertex v : level_graph(0).vertices()) a_to_f[v] = fvid(0, v);

  std::vector<std::pair<EdgeId, Length>> now, prevc;
  for (auto& [ne, ge] : embedF) now.push_back({ge, f.edge(ne).len});
  for (auto& [ne, ge] : ldt_.embed) prevc.push_back({ge, ldt_.f.edge(ne).len});
  std::sort(now.begin(), now.end());
  std::sort(prevc.begin(), prevc.end());
  std::vector<std::pair<EdgeId, Length>> sym;
  std::set_symmetric_difference(now.begin(), now.end(), prevc.begin(), prevc.end(),
                                std::back_inserter(sym));
  int64_t changes = (int64_t)sym.size() +
                    std::llabs((int64_t)f.num_vertices() - (int64_t)ldt_.f.num_vertices());

  ldt_.last_changes = changes;
  ldt_.max_changes = std::max(ldt_.max_changes, changes);
  ldt_.f = std::move(f);
  ldt_.a_to_f = std::move(a_to_f);
  ldt_.f_to_host = std::move(f2h);
  ldt_.embed = std::move(embedF);
  ldt_.econg = std::move(econg);

  // Low-depth companion: same gluing pattern on the raw per-level forests.
  std::map<PK, PK> up2;
  auto find2 = [&up2](PK a) {
    while (true) {
      auto it = up2.find(a);
      if (it == up2.end()) return a;
      a = it->second;
    }
  };
  auto unite2 = [&](PK a, PK b) {
    a = find2(a);
    b = find2(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    up2[b] = a;
  };
  for (int i = 0; i < lam_; ++i)
    for (Vertex a : sp_[i]->terminals()) unite2({i, a}, {i + 1, sp_[i]->h_vertex_of(a)});
  DynGraph dt(1);
  std::map<PK, Vertex> tvm;
  DepthTree d;
  for (int i = 0; i <= lam_; ++i) {
    for (Vertex v : level_graph(i).vertices()) {
      PK r = find2({i, v});
      if (!tvm.count(r)) {
        Vertex nid = dt.add_vertex();
        tvm[r] = nid;
        d.label[nid] = r;
      }
    }
  }
  auto tvid = [&](int i, Vertex v) { return tvm.at(find2({i, v})); };
  for (int i = 0; i <= lam_; ++i)
    for (auto& [c, p, pe, len] : parts[i].raw) {
      (void)pe;
      dt.add_edge(tvid(i, c), tvid(i, p), len);
    }
  assert(dt.num_edges() + 1 == dt.num_vertices() && "the glued depth tree is a tree");
  for (Vertex v : level_graph(0).vertices()) d.host_to_t[v] = tvid(0, v);
  for (int i = 0; i <= lam_; ++i)
    for (Vertex v : level_graph(i).vertices()) {
      Vertex tn = tvid(i, v);
      Vertex fn = fvid(i, parts[i].tmap.at(v));
      if (!d.t_to_f.count(tn)) {
        d.t_to_f[tn] = fn;
      } else {
        assert(d.t_to_f.at(tn) == fn && "merged classes agree on the glued-tree image");
      }
    }
  d.t = std::move(dt);
  ddt_ = std::move(d);
  tree_epoch_ = t_;
}

void Hierarchy::self_check() {
  for (int i = 0; i < lam_; ++i) {
    assert(graphs_match(level_graph(i + 1), sp_[i]->h()) && "level copies stay in lockstep");
    sp_[i]->self_check();
  }
  const DynGraph& top = level_graph(lam_);
  for (Vertex s : top.vertices()) {
    assert(top_tab_.at({s, s}) == 0);
    for (Vertex v : top.vertices()) {
      auto a = top_tab_.find({s, v});
      auto b = top_tab_.find({v, s});
      assert((a == top_tab_.end()) == (b == top_tab_.end()));
      if (a != top_tab_.end()) assert(a->second == b->second);
    }
  }
  for (Vertex x : marked_) assert(g_.has_vertex(x));
  assert((marked_.size() >= 2) == wit_.has_value());
  if (wit_) {
    assert(marked_.count(wit_->first) && marked_.count(wit_->second));
  }
}

// ---------------------------------------------------------------------------

TerminalSparsifier::TerminalSparsifier(const DynGraph& g, TerminalSparsifierConfig cfg)
    : cfg_(cfg),
      scale_(cfg.scale > 0 ? cfg.scale : 4),
      m0_(std::max<int64_t>((int64_t)g.num_edges(), 2)),
      ghat_(1, 0, 0),
      host_vbound_(g.vertex_bound()),
      host_ebound_(g.edge_bound()) {
  for (Vertex v : g.vertices()) vmap_[v] = ghat_.add_vertex();
  for (EdgeId e : g.live_edges()) {
    const EdgeRec& er = g.edge(e);
    emap_[e] = ghat_.add_edge(vmap_.at(er.u), vmap_.at(er.v), er.len * scale_);
  }
  int lam = cfg_.hier.levels;
  // The wrapper drives rebuilds itself so gadget replays cannot recurse.
  cfg_.hier.rebuild_every.assign(lam, (int64_t)1 << 60);
  for (int i = 0; i < lam; ++i) {
    double u = std::pow((double)m0_, 1.0 - (double)(i + 1) / std::max(lam, 1));
    period_.push_back(std::max<int64_t>(1, (int64_t)std::llround(u)));
  }
  hier_ = std::make_unique<Hierarchy>(ghat_, cfg_.hier);
  ell_ = hier_->levels();
  refresh_mirror();  // initial content is not journaled
}

double TerminalSparsifier::dec_threshold(int ell) const {
  int lam = hier_->levels();
  return std::pow((double)m0_, 1.0 - (double)(ell - 1) / lam) / 8.0;
}

int64_t TerminalSparsifier::inc_threshold(int ell) const {
  int lam = hier_->levels();
  return (int64_t)std::floor(std::pow((double)m0_, 1.0 - (double)ell / lam) / 16.0);
}

void TerminalSparsifier::gadget(Vertex host_a) {
  Vertex ga = vmap_.at(host_a);
  UpdateBatch b1;
  b1.ops.push_back(Update::vertex_insert());
  hier_->apply(b1);
  Vertex ap = ghat_.log().back().ops[0].w;
  UpdateBatch b2;
  b2.ops.push_back(Update::edge_insert(ga, ap, 1));
  hier_->apply(b2);
  EdgeId ge = ghat_.log().back().ops[0].e;
  UpdateBatch b3;
  b3.ops.push_back(Update::edge_delete(ge));
  hier_->apply(b3);
  UpdateBatch b4;
  b4.ops.push_back(Update::vertex_delete(ap));
  hier_->apply(b4);
}

void TerminalSparsifier::replay_all() {
  for (Vertex a : a_) gadget(a);
}

// Advance the user-facing update counter and run the scheduled rebuild; the
// gadget pins die with a rebuilt level, so replay them right after.
void TerminalSparsifier::after_user_op() {
  ++t_;
  for (int i = 0; i < (int)period_.size(); ++i) {
    if (t_ % period_[i] == 0) {
      hier_->force_rebuild(i);
      if (i < ell_) replay_all();
      break;
    }
  }
}

UpdateBatch TerminalSparsifier::apply(const UpdateBatch& b) {
  for (const Update& op : b.ops) {
    UpdateBatch fb;
    switch (op.kind) {
      case Update::EdgeInsert: {
        if (!vmap_.count(op.u)) throw UnknownVertex(op.u);
        if (!vmap_.count(op.v)) throw UnknownVertex(op.v);
        fb.ops.push_back(Update::edge_insert(vmap_.at(op.u), vmap_.at(op.v), op.len * scale_));
        hier_->apply(fb);
        emap_[host_ebound_++] = ghat_.log().back().ops[0].e;
        break;
      }
      case Update::EdgeDelete: {
        auto it = emap_.find(op.e);
        if (it == emap_.end()) throw UnknownEdge(op.e);
        fb.ops.push_back(Update::edge_delete(it->second));
        hier_->apply(fb);
        emap_.erase(it);
        break;
      }
      case Update::VertexInsert: {
        fb.ops.push_back(Update::vertex_insert());
        hier_->apply(fb);
        vmap_[host_vbound_++] = ghat_.log().back().ops[0].w;
        break;
      }
      case Update::VertexDelete: {
        auto it = vmap_.find(op.w);
        if (it == vmap_.end()) throw UnknownVertex(op.w);
        fb.ops.push_back(Update::vertex_delete(it->second));
        hier_->apply(fb);
        a_.erase(op.w);
        vmap_.erase(it);
        break;
      }
    }
    after_user_op();
  }
  UpdateBatch uh = refresh_mirror();
  journal_.push_back(uh);
  journal_ops_ += (int64_t)uh.ops.size();
  return uh;
}

UpdateBatch TerminalSparsifier::add_terminal(Vertex a) {
  if (!vmap_.count(a)) throw UnknownVertex(a);
  if (a_.count(a)) throw MalformedBatch("terminal already present");
  a_.insert(a);
  if (ell_ > 0 && (double)a_.size() >= dec_threshold(ell_)) {
    --ell_;
    replay_all();
  } else {
    gadget(a);
  }
  after_user_op();
  UpdateBatch uh = refresh_mirror();
  journal_.push_back(uh);
  journal_ops_ += (int64_t)uh.ops.size();
  return uh;
}

UpdateBatch TerminalSparsifier::remove_terminal(Vertex a) {
  if (!a_.count(a)) throw MalformedBatch("not a terminal");
  a_.erase(a);
  if (ell_ < hier_->levels() && (int64_t)a_.size() <= inc_threshold(ell_)) {
    ++ell_;
    replay_all();
  }
  after_user_op();
  UpdateBatch uh = refresh_mirror();
  journal_.push_back(uh);
  journal_ops_ += (int64_t)uh.ops.size();
  return uh;
}

Vertex TerminalSparsifier::h_vertex_of(Vertex host) const {
  auto it = vmap_.find(host);
  if (it == vmap_.end()) return kNoVertex;
  auto mt = mv_.find(it->second);
  return mt == mv_.end() ? kNoVertex : mt->second;
}

// Content mirror of the level-ell graph keyed by stable base vertices: each
// level vertex descends through host_of to its scaled-copy vertex, so level
// rebuilds and level switches diff instead of swapping wholesale.
UpdateBatch TerminalSparsifier::refresh_mirror() {
  const DynGraph& lvl = hier_->level_graph(ell_);
  std::map<Vertex, Vertex> lvl_base;
  std::set<Vertex> bases;
  for (Vertex v : lvl.vertices()) {
    Vertex b = v;
    for (int j = ell_ - 1; j >= 0; --j) b = hier_->level_sparsifier(j).host_of(b);
    lvl_base[v] = b;
    bases.insert(b);
  }
  assert(bases.size() == lvl_base.size() && "base descent is injective");
  UpdateBatch out;
  std::vector<Vertex> deadm;
  for (auto it = mv_.begin(); it != mv_.end();) {
    if (!bases.count(it->first)) {
      deadm.push_back(it->second);
      it = mv_.erase(it);
    } else {
      ++it;
    }
  }
  Vertex nextv = hout_.vertex_bound();
  std::vector<Vertex> newm;
  for (Vertex b : bases)
    if (!mv_.count(b)) {
      mv_[b] = nextv++;
      newm.push_back(mv_.at(b));
    }
  using EKey = std::tuple<Vertex, Vertex, Length>;
  std::map<EKey, int64_t> want;
  for (EdgeId e : lvl.live_edges()) {
    const EdgeRec& er = lvl.edge(e);
    Vertex a = mv_.at(lvl_base.at(er.u)), b = mv_.at(lvl_base.at(er.v));
    if (b < a) std::swap(a, b);
    ++want[{a, b, er.len}];
  }
  std::map<EKey, std::vector<EdgeId>> have;
  for (EdgeId e : hout_.live_edges()) {
    const EdgeRec& er = hout_.edge(e);
    Vertex a = er.u, b = er.v;
    if (b < a) std::swap(a, b);
    have[{a, b, er.len}].push_back(e);
  }
  for (auto& [key, ids] : have) {
    int64_t keep = 0;
    auto w = want.find(key);
    if (w != want.end()) keep = std::min<int64_t>(w->second, (int64_t)ids.size());
    for (size_t ix = keep; ix < ids.size(); ++ix) out.ops.push_back(Update::edge_delete(ids[ix]));
    if (w != want.end()) w->second -= keep;
  }
  for (Vertex dm : deadm) out.ops.push_back(Update::vertex_delete(dm));
  for (size_t ix = 0; ix < newm.size(); ++ix) out.ops.push_back(Update::vertex_insert());
  for (auto& [key, cnt] : want)
    for (int64_t c = 0; c < cnt; ++c)
      out.ops.push_back(Update::edge_insert(std::get<0>(key), std::get<1>(key), std::get<2>(key)));
  if (out.ops.empty()) return out;
  DynGraph::Applied ap = hout_.apply_batch(out);
  assert(ap.inserted_vertices == newm && "mirror vertex ids are predicted exactly");
  (void)ap;
  return hout_.log().back();  // ops with assigned ids filled in
}

void TerminalSparsifier::self_check() {
  hier_->self_check();
  for (Vertex a : a_) {
    Vertex v = vmap_.at(a);
    for (int j = 0; j < ell_; ++j) {
      v = hier_->level_sparsifier(j).h_vertex_of(v);
      assert(v != kNoVertex && "terminals stay pinned through every level");
    }
    assert(h_vertex_of(a) != kNoVertex && "terminals appear in the sparsifier");
  }
  const DynGraph& lvl = hier_->level_graph(ell_);
  assert(hout_.num_vertices() == lvl.num_vertices());
  assert(hout_.num_edges() == lvl.num_edges());
  std::multiset<Length> a1, b1;
  for (EdgeId e : lvl.live_edges()) a1.insert(lvl.edge(e).len);
  for (EdgeId e : hout_.live_edges()) b1.insert(hout_.edge(e).len);
  assert(a1 == b1 && "mirror carries the level content");
}

}  // namespace vsp
