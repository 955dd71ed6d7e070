#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "vsp/dyngraph.hpp"
#include "vsp/harness.hpp"
#include "vsp/spt.hpp"

using namespace vsp;

TEST_CASE("oracle dist equals engine dist on random graphs") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    DynGraph g = gen_random_connected(30, 0, 25, 9, seed);
    SPTree t = tiebreak_sssp(g, {.sources = {0}});
    for (Vertex v : g.vertices()) {
      auto d = oracle_dist(g, 0, v);
      REQUIRE(d.has_value());
      CHECK(*d == t.dist[v]);
      auto p = oracle_path(g, 0, v);
      REQUIRE(p.has_value());
      CHECK(p->len == *d);
      // Path is valid in the graph.
      PathHandle rebuilt = g.make_path(0, p->edges);
      CHECK(rebuilt.dst == v);
    }
  }
}

TEST_CASE("oracle ball pivots and sizes on a path") {
  // 0-1-2-3-4, unit lengths, terminals {0,4}.
  DynGraph g = gen_path(5);
  std::vector<char> a(5, 0);
  a[0] = a[4] = 1;
  OracleBall b1 = oracle_ball(g, 1, a);
  CHECK(b1.pivot == 0);
  CHECK(b1.pivot_dist == 1);
  CHECK(b1.ball == std::vector<Vertex>{1});
  OracleBall b2 = oracle_ball(g, 2, a);
  CHECK(b2.pivot == 0);  // tie at dist 2 broken toward smaller multiset/raw order
  OracleBall b0 = oracle_ball(g, 0, a);
  CHECK(b0.pivot == 0);
  CHECK(b0.pivot_dist == 0);
  CHECK(b0.ball.empty());
}

TEST_CASE("max flow oracle on known instances") {
  using FE = std::tuple<int, int, int64_t>;
  // Diamond: s=0, t=3, two disjoint paths of capacity 2 and 3.
  std::vector<FE> es{{0, 1, 2}, {1, 3, 2}, {0, 2, 3}, {2, 3, 3}};
  CHECK(oracle_max_flow(4, es, 0, 3) == 5);
  // Bottleneck in the middle.
  std::vector<FE> es2{{0, 1, 10}, {1, 2, 1}, {2, 3, 10}};
  CHECK(oracle_max_flow(4, es2, 0, 3) == 1);
  // Disconnected.
  std::vector<FE> es3{{0, 1, 4}};
  CHECK(oracle_max_flow(4, es3, 0, 3) == 0);
}

TEST_CASE("generators deterministic and connected") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    DynGraph a = gen_random_connected(40, 4, 30, 7, seed);
    DynGraph b = gen_random_connected(40, 4, 30, 7, seed);
    CHECK(a.live_edges() == b.live_edges());
    for (EdgeId e : a.live_edges()) {
      CHECK(a.edge(e).u == b.edge(e).u);
      CHECK(a.edge(e).len == b.edge(e).len);
    }
    SPTree t = tiebreak_sssp(a, {.sources = {0}});
    for (Vertex v : a.vertices()) CHECK(t.reached(v));
    for (Vertex v : a.vertices()) CHECK(a.degree(v) <= 4);
  }
}

TEST_CASE("deletions-only generator keeps graph connected") {
  DynGraph g = gen_random_connected(25, 0, 20, 5, 3);
  for (int64_t step = 0; step < 15; ++step) {
    UpdateBatch b = gen_update(g, "deletions-only", 3, step, true, 1);
    if (b.ops.empty()) break;
    g.apply_batch(b);
    SPTree t = tiebreak_sssp(g, {.sources = {*g.vertices().begin()}});
    for (Vertex v : g.vertices()) CHECK(t.reached(v));
  }
}

TEST_CASE("scaled instance lengths are multiples of scale") {
  Instance inst = gen_random_connected_scaled(20, 4, 15, 6, 9);
  CHECK(inst.scale == (Length)inst.g.num_edges());
  for (EdgeId e : inst.g.live_edges()) CHECK(inst.g.edge(e).len % inst.scale == 0);
}
