#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "vsp/coregraph.hpp"
#include "vsp/harness.hpp"
#include "vsp/lssf.hpp"

using namespace vsp;

namespace {

std::map<EdgeId, int64_t> uniform_w(const DynGraph& g) {
  std::map<EdgeId, int64_t> w;
  for (EdgeId e : g.live_edges()) w[e] = 1;
  return w;
}

// Route one host batch through the forests and the core graph the way the
// maintained stack does: edge deletions reach the forests while still live,
// insertions and vertex changes after the host applied them.
UpdateBatch drive(DynGraph& g, std::vector<StretchForest>& fs, CoreGraphView& view,
                  const UpdateBatch& b, std::vector<LssfDelta>* deltas_out = nullptr) {
  std::vector<LssfDelta> deltas(fs.size());
  HostDelta hd;
  for (const Update& op : b.ops)
    if (op.kind == Update::EdgeDelete) {
      hd.deleted_edges.push_back(op.e);
      for (size_t i = 0; i < fs.size(); ++i) deltas[i].append(fs[i].delete_edge(op.e));
    }
  auto ap = g.apply_batch(b);
  for (Vertex w : ap.inserted_vertices) {
    hd.inserted_vertices.push_back(w);
    for (auto& f : fs) f.add_vertex(w);
  }
  for (EdgeId e : ap.inserted_edges) {
    hd.inserted_edges.push_back(e);
    for (size_t i = 0; i < fs.size(); ++i) deltas[i].append(fs[i].insert_edge(e));
  }
  for (const Update& op : b.ops)
    if (op.kind == Update::VertexDelete) {
      hd.deleted_vertices.push_back(op.w);
      for (auto& f : fs) f.remove_vertex(op.w);
    }
  if (deltas_out) *deltas_out = deltas;
  return view.apply_forest_delta(deltas, hd);
}

int64_t delta_size(const std::vector<LssfDelta>& ds) {
  int64_t s = 0;
  for (const auto& d : ds) s += (int64_t)d.cut_edges.size() + (int64_t)d.new_roots.size();
  return s;
}

}  // namespace

TEST_CASE("spanning forest with a single root contracts to one node of self-loops") {
  DynGraph g = gen_random_connected(30, 5, 12, 9, 77);
  std::vector<StretchForest> fs;
  fs.emplace_back(g, uniform_w(g), 10 * (int64_t)g.num_edges(), std::vector<Vertex>{0});
  REQUIRE(fs[0].roots().size() == 1);
  CoreGraphView view(g, fs);
  view.self_check();
  CHECK(view.tilde().num_vertices() == 1);
  CHECK(view.tilde().num_edges() == g.num_edges());
  Vertex n0 = view.node(0, *fs[0].roots().begin());
  REQUIRE(n0 != kNoVertex);
  for (EdgeId e : view.tilde().live_edges()) {
    const EdgeRec& er = view.tilde().edge(e);
    CHECK(er.u == n0);
    CHECK(er.v == n0);
    auto [lvl, he] = view.preimage(e);
    CHECK(lvl == 0);
    CHECK(er.len == fs[0].str_over(he) * g.edge(he).len);
  }
  CHECK(view.canonical_form() == CoreGraphView(g, fs).canonical_form());
}

TEST_CASE("path with a held-out root contracts by hand") {
  DynGraph g;
  for (int i = 0; i < 3; ++i) g.add_vertex();
  EdgeId eab = g.add_edge(0, 1, 1);
  EdgeId ebc = g.add_edge(1, 2, 1);
  std::vector<StretchForest> fs;
  fs.emplace_back(g, uniform_w(g), 100, std::vector<Vertex>{0, 2});
  REQUIRE(fs[0].in_forest(eab));
  REQUIRE_FALSE(fs[0].in_forest(ebc));
  REQUIRE(fs[0].roots() == std::set<Vertex>{0, 2});
  CoreGraphView view(g, fs);
  view.self_check();
  CHECK(view.tilde().num_vertices() == 2);
  Vertex na = view.node(0, 0), nc = view.node(0, 2);
  REQUIRE(na != kNoVertex);
  REQUIRE(nc != kNoVertex);
  CHECK(view.node_of_host(0, 1) == na);
  const EdgeRec& loop = view.tilde().edge(view.image(0, eab));
  CHECK(loop.u == loop.v);
  CHECK(loop.u == na);
  CHECK(loop.len == 2);
  const EdgeRec& cross = view.tilde().edge(view.image(0, ebc));
  CHECK(((cross.u == na && cross.v == nc) || (cross.u == nc && cross.v == na)));
  CHECK(cross.len == fs[0].str_over(ebc) * 1);
  CHECK(cross.len == 2);
  CHECK(view.zero_links().empty());
  PathHandle dec = view.decode_image(view.image(0, ebc), na);
  CHECK(dec.src == 0);
  CHECK(dec.dst == 2);
  CHECK(dec.len <= cross.len);
  CHECK(dec.edges == std::vector<EdgeId>({eab, ebc}));
}

TEST_CASE("copies of a shared root are starred around the lowest level") {
  DynGraph g = gen_random_connected(40, 5, 20, 7, 5151);
  std::vector<StretchForest> fs;
  fs.emplace_back(g, uniform_w(g), 12, std::vector<Vertex>{0, 1, 2});
  fs.emplace_back(g, uniform_w(g), 20, std::vector<Vertex>{0, 3});
  fs.emplace_back(g, uniform_w(g), 8, std::vector<Vertex>{1, 3});
  CoreGraphView view(g, fs);
  view.self_check();
  size_t nodes = 0, want_links = 0;
  std::map<Vertex, std::vector<int>> copies;
  for (int i = 0; i < 3; ++i) {
    nodes += fs[i].roots().size();
    for (Vertex r : fs[i].roots()) copies[r].push_back(i);
  }
  CHECK((size_t)view.tilde().num_vertices() == nodes);
  for (auto& [v, levs] : copies) {
    if (levs.size() < 2) continue;
    want_links += levs.size() - 1;
    for (size_t j = 1; j < levs.size(); ++j) {
      auto it = view.zero_links().find({levs[j], v});
      REQUIRE(it != view.zero_links().end());
      const EdgeRec& er = view.tilde().edge(it->second);
      CHECK(er.len == 0);
      Vertex center = view.node(levs[0], v);
      CHECK((er.u == center || er.v == center));
    }
  }
  CHECK(view.zero_links().size() == want_links);
  CHECK((size_t)view.tilde().num_edges() == want_links + 3 * (size_t)g.num_edges());
}

TEST_CASE("core-graph paths decode to host paths that are never longer") {
  for (uint64_t seed : {11u, 22u, 33u}) {
    DynGraph g = gen_random_connected(60, 4, 25, 9, seed);
    std::vector<StretchForest> fs;
    fs.emplace_back(g, uniform_w(g), 9, std::vector<Vertex>{0, 5, 9});
    fs.emplace_back(g, uniform_w(g), 25, std::vector<Vertex>{2});
    CoreGraphView view(g, fs);
    view.self_check();
    for (EdgeId e : view.tilde().live_edges()) {
      const EdgeRec& er = view.tilde().edge(e);
      if (er.u == er.v || view.is_zero_link(e)) continue;
      PathHandle dec = view.decode_image(e, er.u);
      CHECK(dec.len <= er.len);
      CHECK(dec.src == view.label(er.u).second);
      CHECK(dec.dst == view.label(er.v).second);
    }
    std::vector<Vertex> roots(fs[0].roots().begin(), fs[0].roots().end());
    Vertex src = roots[0];
    OracleSSSP ot = oracle_sssp(view.tilde(), view.node(0, src));
    OracleSSSP oh = oracle_sssp(g, src);
    for (Vertex r : roots) {
      Vertex rn = view.node(0, r);
      REQUIRE(ot.reached(rn));
      PathHandle hp = view.decode_path(*ot.best[rn]);
      CHECK(hp.src == src);
      CHECK(hp.dst == r);
      CHECK(hp.len <= ot.best[rn]->len);
      REQUIRE(oh.reached(r));
      CHECK(oh.best[r]->len <= ot.best[rn]->len);  // sandwich lower bound
    }
  }
}

TEST_CASE("a forest-only deletion splits off the rootless sides") {
  DynGraph g;
  for (int i = 0; i < 3; ++i) g.add_vertex();
  EdgeId exy = g.add_edge(0, 1, 1);
  EdgeId eyz = g.add_edge(1, 2, 1);
  std::vector<StretchForest> fs;
  fs.emplace_back(g, uniform_w(g), 100, std::vector<Vertex>{0});
  REQUIRE(fs[0].roots() == std::set<Vertex>{0});
  CoreGraphView view(g, fs);
  Vertex nx = view.node(0, 0);
  // Rooting both endpoints cuts (x,y) first — moving the whole {y,z} subtree
  // to a fresh node — and then (y,z), peeling {z} off that node in turn.
  LssfDelta d = fs[0].delete_edge_from_forest(exy);
  REQUIRE(d.cut_edges == std::vector<EdgeId>({exy, eyz}));
  REQUIRE(d.new_roots == std::vector<Vertex>({1, 2}));
  UpdateBatch b = view.apply_forest_delta({d}, HostDelta{});
  CHECK(b.split);
  view.self_check();
  CHECK(view.canonical_form() == CoreGraphView(g, fs).canonical_form());
  CHECK(view.node(0, 0) == nx);  // the side that kept the root keeps its node
  Vertex ny = view.node(0, 1), nz = view.node(0, 2);
  REQUIRE(ny != kNoVertex);
  REQUIRE(nz != kNoVertex);
  const EdgeRec& cross = view.tilde().edge(view.image(0, exy));
  CHECK(((cross.u == nx && cross.v == ny) || (cross.u == ny && cross.v == nx)));
  CHECK(cross.len == 2);  // frozen overestimates survive the cuts
  const EdgeRec& moved = view.tilde().edge(view.image(0, eyz));
  CHECK(((moved.u == ny && moved.v == nz) || (moved.u == nz && moved.v == ny)));
  CHECK(moved.len == 2);
  // Each image was re-homed at most once despite the two-step cut sequence.
  int img_inserts = 0;
  for (const Update& op : b.ops) img_inserts += op.kind == Update::EdgeInsert;
  CHECK(img_inserts == 2);
  CHECK(view.apply_forest_delta({LssfDelta{}}, HostDelta{}).ops.empty());
  CHECK(view.tilde().log().size() == 1);  // the empty delta was not applied
}

TEST_CASE("incremental maintenance matches a canonical rebuild after every update") {
  struct Cfg {
    uint64_t seed;
    const char* profile;
  };
  for (Cfg cfg : {Cfg{401, "deletions-only"}, Cfg{402, "fully-dynamic"}, Cfg{403, "fully-dynamic"}}) {
    DynGraph g = gen_random_connected(60, 4, 30, 9, cfg.seed);
    std::vector<StretchForest> fs;
    fs.emplace_back(g, uniform_w(g), 10, std::vector<Vertex>{0});
    fs.emplace_back(g, uniform_w(g), 30, std::vector<Vertex>{1, 4});
    CoreGraphView view(g, fs);
    int64_t lg = 1;
    while (((int64_t)1 << lg) < (int64_t)g.num_edges() + 2) ++lg;
    for (int step = 0; step < 70; ++step) {
      UpdateBatch b = gen_update(g, cfg.profile, cfg.seed, step, false, 1);
      if (b.ops.empty()) break;
      std::vector<LssfDelta> deltas;
      UpdateBatch applied = drive(g, fs, view, b, &deltas);
      view.self_check();
      for (auto& f : fs) f.self_check();
      CoreGraphView fresh(g, fs);
      REQUIRE(view.canonical_form() == fresh.canonical_form());
      // Recourse: surgery stays proportional to the forest churn.
      int64_t budget = 16 * (1 + delta_size(deltas)) * lg;
      CHECK((int64_t)applied.ops.size() <= budget);
    }
    CHECK(view.max_batch_ops() > 0);
  }
}

TEST_CASE("vertex churn keeps copies, links and images consistent") {
  DynGraph g = gen_cycle(8, 3);
  std::vector<StretchForest> fs;
  fs.emplace_back(g, uniform_w(g), 6, std::vector<Vertex>{0});
  fs.emplace_back(g, uniform_w(g), 17, std::vector<Vertex>{3});
  CoreGraphView view(g, fs);
  view.self_check();

  UpdateBatch vi;
  vi.ops.push_back(Update::vertex_insert());
  UpdateBatch applied = drive(g, fs, view, vi);
  view.self_check();
  REQUIRE(view.canonical_form() == CoreGraphView(g, fs).canonical_form());
  Vertex w = g.vertex_bound() - 1;
  REQUIRE(view.node(0, w) != kNoVertex);
  REQUIRE(view.node(1, w) != kNoVertex);
  CHECK(view.zero_links().count({1, w}) == 1);

  UpdateBatch ei;
  ei.ops.push_back(Update::edge_insert(w, 2, 5));
  drive(g, fs, view, ei);
  view.self_check();
  REQUIRE(view.canonical_form() == CoreGraphView(g, fs).canonical_form());
  EdgeId he = g.live_edges().back();
  REQUIRE(g.edge(he).u == w);
  for (int i = 0; i < 2; ++i) {
    const EdgeRec& im = view.tilde().edge(view.image(i, he));
    CHECK(im.len == 5);  // fresh edges carry overestimate 1
  }

  UpdateBatch ed;
  ed.ops.push_back(Update::edge_delete(he));
  drive(g, fs, view, ed);
  view.self_check();
  REQUIRE(view.canonical_form() == CoreGraphView(g, fs).canonical_form());
  CHECK(view.image(0, he) == kNoEdge);

  UpdateBatch vd;
  vd.ops.push_back(Update::vertex_delete(w));
  drive(g, fs, view, vd);
  view.self_check();
  REQUIRE(view.canonical_form() == CoreGraphView(g, fs).canonical_form());
  CHECK(view.node(0, w) == kNoVertex);
  CHECK(view.node(1, w) == kNoVertex);
  CHECK(view.zero_links().count({1, w}) == 0);
}
