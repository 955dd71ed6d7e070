#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "vsp/dyngraph.hpp"
#include "vsp/harness.hpp"
#include "vsp/lssf.hpp"

using namespace vsp;

namespace {

// Independent recompute of roots, root paths and detours from the reported
// forest edge set, bypassing the link-cut structure.
struct ForestOracle {
  std::map<Vertex, Vertex> par;
  std::map<Vertex, EdgeId> pare;
  std::map<Vertex, Vertex> root;
  std::map<Vertex, Length> rootlen;

  ForestOracle(const DynGraph& g, const std::map<EdgeId, std::pair<Vertex, Vertex>>& fe) {
    for (const auto& [e, cp] : fe) {
      REQUIRE(par.count(cp.first) == 0);
      par[cp.first] = cp.second;
      pare[cp.first] = e;
    }
    for (Vertex v : g.vertices()) {
      Vertex x = v;
      Length acc = 0;
      int guard = 0;
      while (par.count(x)) {
        acc += g.edge(pare.at(x)).len;
        x = par.at(x);
        REQUIRE(++guard <= (int)g.vertex_bound());
      }
      root[v] = x;
      rootlen[v] = acc;
    }
  }

  Length path_len(const DynGraph& g, Vertex u, Vertex v) const {
    std::map<Vertex, Length> up;
    Vertex x = u;
    Length acc = 0;
    up[x] = 0;
    while (par.count(x)) {
      acc += g.edge(pare.at(x)).len;
      x = par.at(x);
      up[x] = acc;
    }
    x = v;
    acc = 0;
    while (!up.count(x)) {
      REQUIRE(par.count(x));
      acc += g.edge(pare.at(x)).len;
      x = par.at(x);
    }
    return acc + up.at(x);
  }

  Length detour(const DynGraph& g, EdgeId e) const {
    const EdgeRec& er = g.edge(e);
    if (er.u == er.v) return 0;
    if (root.at(er.u) == root.at(er.v)) return path_len(g, er.u, er.v);
    return rootlen.at(er.u) + rootlen.at(er.v);
  }
};

void audit(const DynGraph& g, StretchForest& sf) {
  ForestOracle fo(g, sf.forest_edges());
  std::set<Vertex> oroots;
  for (Vertex v : g.vertices()) oroots.insert(fo.root.at(v));
  for (Vertex v : g.vertices())
    if (!fo.par.count(v)) REQUIRE(oroots.count(v));
  for (Vertex v : g.vertices()) {
    if (fo.par.count(v)) continue;
    CHECK(sf.roots().count(v) == 1);
  }
  for (Vertex v : g.vertices()) {
    CHECK(sf.root_of(v) == fo.root.at(v));
    CHECK(sf.root_path_len(v) == fo.rootlen.at(v));
  }
  for (EdgeId e : g.live_edges()) {
    Length det = fo.detour(g, e);
    CHECK(sf.detour_len(e) == det);
    CHECK((__int128)det <= (__int128)(sf.str_over(e) - 1) * g.edge(e).len);
  }
  sf.self_check();
}

std::map<EdgeId, int64_t> uniform_w(const DynGraph& g) {
  std::map<EdgeId, int64_t> w;
  for (EdgeId e : g.live_edges()) w[e] = 1;
  return w;
}

}  // namespace

TEST_CASE("a tree is its own forest") {
  DynGraph g = gen_random_connected(30, 3, 0, 7, 11);
  REQUIRE(g.num_edges() == 29);
  StretchForest sf(g, uniform_w(g), 2 * (int64_t)g.num_edges() + 1);
  for (EdgeId e : g.live_edges()) {
    CHECK(sf.in_forest(e));
    CHECK(sf.str_over(e) == 2);
  }
  CHECK(sf.roots().size() == 1);
  auto [num, den] = sf.gamma_meas();
  CHECK(num == 2 * den);
  audit(g, sf);
}

TEST_CASE("unit cycle drops one edge at full stretch") {
  DynGraph g = gen_cycle(8);
  StretchForest sf(g, uniform_w(g), 2 * (int64_t)g.num_edges() + 1);
  int high = 0, tree = 0;
  for (EdgeId e : g.live_edges()) {
    if (sf.in_forest(e)) {
      ++tree;
      CHECK(sf.str_over(e) == 2);
    } else {
      ++high;
      CHECK(sf.str_over(e) == 1 + 7);
    }
  }
  CHECK(tree == 7);
  CHECK(high == 1);
  CHECK(sf.roots().size() == 1);
  audit(g, sf);
}

TEST_CASE("measured average stretch stays under the soft budget") {
  int64_t over_budget = 0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    DynGraph g = gen_random_connected(200, 6, 120, 9, seed);
    int64_t m = (int64_t)g.num_edges();
    int64_t k = (int64_t)std::ceil(std::sqrt((double)m));
    StretchForest sf(g, uniform_w(g), k);
    auto [num, den] = sf.gamma_meas();
    double gamma = (double)num / (double)den;
    double budget = 8.0 * std::log2(200.0) * std::log2(200.0);
    CHECK(gamma <= budget);
    if (gamma > budget) ++over_budget;
    // Components: about m/k of them plus the per-component roots.
    WARN_MESSAGE((int64_t)sf.roots().size() <= 4 * m / k + 1,
                 "component count above the soft bound for seed ", seed);
    if (seed <= 5) audit(g, sf);
  }
  CHECK(over_budget == 0);
}

TEST_CASE("seed roots are roots and persist") {
  DynGraph g = gen_random_connected(40, 4, 30, 5, 3);
  std::vector<Vertex> seeds{0, 7, 19, 33};
  StretchForest sf(g, uniform_w(g), 8, seeds);
  for (Vertex s : seeds) CHECK(sf.roots().count(s) == 1);
  for (int step = 0; step < 20; ++step) {
    UpdateBatch b = gen_update(g, "deletions-only", 5, step, false, 1);
    if (b.ops.empty()) break;
    sf.delete_edge(b.ops[0].e);
    g.apply_batch(b);
    for (Vertex s : seeds) CHECK(sf.roots().count(s) == 1);
  }
  audit(g, sf);
}

TEST_CASE("host deletions repair against the recompute oracle") {
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    DynGraph g = gen_random_connected(60, 4, 50, 9, seed);
    StretchForest sf(g, uniform_w(g), 10);
    audit(g, sf);
    std::set<Vertex> roots_before = sf.roots();
    std::set<EdgeId> forest_before;
    for (const auto& [e, cp] : sf.forest_edges()) forest_before.insert(e);
    for (int step = 0; step < 75; ++step) {
      UpdateBatch b = gen_update(g, "deletions-only", seed * 97 + 7, step, false, 1);
      if (b.ops.empty()) break;
      EdgeId e = b.ops[0].e;
      LssfDelta d = sf.delete_edge(e);
      g.apply_batch(b);
      CHECK(!sf.in_forest(e));
      CHECK((int64_t)d.cut_edges.size() == sf.last_recourse());
      // The forest only sheds edges and the root set only grows.
      std::set<EdgeId> forest_now;
      for (const auto& [fe, cp] : sf.forest_edges()) forest_now.insert(fe);
      for (EdgeId fe : forest_now) CHECK(forest_before.count(fe) == 1);
      for (Vertex r : roots_before) CHECK(sf.roots().count(r) == 1);
      forest_before = forest_now;
      roots_before = sf.roots();
      if (step % 5 == 0) audit(g, sf);
    }
    audit(g, sf);
    CHECK(sf.max_recourse() <= sf.recourse_budget());
    INFO("total cuts " << sf.total_cuts() << " max recourse " << sf.max_recourse());
  }
}

TEST_CASE("forest-only deletion re-roots the far side") {
  DynGraph g(1, 0, 0);
  for (int i = 0; i < 8; ++i) g.apply_batch(UpdateBatch{{Update::vertex_insert()}});
  std::vector<EdgeId> path_edges;
  for (int i = 0; i + 1 < 8; ++i) {
    auto ap = g.apply_batch(UpdateBatch{{Update::edge_insert(i, i + 1, 1)}});
    path_edges.push_back(ap.inserted_edges[0]);
  }
  StretchForest sf(g, uniform_w(g), 2 * (int64_t)g.num_edges() + 1);
  REQUIRE(sf.roots().size() == 1);
  EdgeId mid = path_edges[3];
  REQUIRE(sf.in_forest(mid));
  LssfDelta d = sf.delete_edge_from_forest(mid);
  CHECK(!sf.in_forest(mid));
  CHECK(g.has_edge(mid));
  CHECK(sf.roots().count(3) == 1);
  CHECK(sf.roots().count(4) == 1);
  CHECK(!d.empty());
  audit(g, sf);
}

TEST_CASE("inserted edges carry a fixed unit overestimate") {
  DynGraph g = gen_random_connected(30, 4, 20, 6, 9);
  StretchForest sf(g, uniform_w(g), 8);
  auto ap = g.apply_batch(UpdateBatch{{Update::edge_insert(2, 17, 4)}});
  EdgeId e = ap.inserted_edges[0];
  sf.insert_edge(e);
  CHECK(sf.str_over(e) == 1);
  CHECK(sf.roots().count(2) == 1);
  CHECK(sf.roots().count(17) == 1);
  audit(g, sf);
  for (int step = 0; step < 15; ++step) {
    UpdateBatch del = gen_update(g, "deletions-only", 31, step, false, 1);
    if (del.ops.empty() || del.ops[0].e == e) continue;
    sf.delete_edge(del.ops[0].e);
    g.apply_batch(del);
  }
  CHECK(sf.str_over(e) == 1);
  CHECK(sf.detour_len(e) == 0);
  audit(g, sf);
}

TEST_CASE("make_root leaves a singleton and vertices come and go") {
  DynGraph g = gen_random_connected(25, 4, 15, 5, 21);
  StretchForest sf(g, uniform_w(g), 6);
  Vertex v = 12;
  sf.make_root(v);
  CHECK(sf.roots().count(v) == 1);
  CHECK(sf.root_path_len(v) == 0);
  audit(g, sf);

  UpdateBatch vb{{Update::vertex_insert()}};
  g.apply_batch(vb);
  Vertex nv = g.vertex_bound() - 1;
  sf.add_vertex(nv);
  CHECK(sf.roots().count(nv) == 1);
  audit(g, sf);
  sf.remove_vertex(nv);
  UpdateBatch vd{{Update::vertex_delete(nv)}};
  g.apply_batch(vd);
  audit(g, sf);
}
