#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "vsp/dyngraph.hpp"
#include "vsp/harness.hpp"
#include "vsp/spt.hpp"

using namespace vsp;

TEST_CASE("empty batch leaves graph unchanged, time+1") {
  DynGraph g = gen_path(3);
  auto edges_before = g.live_edges();
  g.apply_batch({});
  CHECK(g.time() == 1);
  CHECK(g.live_edges() == edges_before);
  CHECK(g.num_vertices() == 3);
}

TEST_CASE("triangle deletion matches Dijkstra oracle") {
  DynGraph g;
  for (int i = 0; i < 3; ++i) g.add_vertex();
  EdgeId ab = g.add_edge(0, 1, 5);
  g.add_edge(0, 2, 3);
  g.add_edge(2, 1, 4);
  CHECK(*oracle_dist(g, 0, 1) == 5);
  UpdateBatch b;
  b.ops.push_back(Update::edge_delete(ab));
  g.apply_batch(b);
  CHECK(*oracle_dist(g, 0, 1) == 3 + 4);
}

TEST_CASE("split encoding accepted, reversed inequality rejected") {
  // v=0 with neighbors 1,2,3; move edge (0,1) to a split-off vertex.
  DynGraph g;
  for (int i = 0; i < 4; ++i) g.add_vertex();
  EdgeId e01 = g.add_edge(0, 1, 1);
  g.add_edge(0, 2, 1);
  g.add_edge(0, 3, 1);
  UpdateBatch good;
  good.split = true;
  good.ops.push_back(Update::edge_delete(e01));
  good.ops.push_back(Update::edge_insert(4, 1, 1));  // 4 = v_new
  CHECK_NOTHROW(g.apply_batch(good));
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(4) == 1);

  // Reversed inequality: origin keeps fewer edges than the split-off side.
  DynGraph h;
  for (int i = 0; i < 3; ++i) h.add_vertex();
  EdgeId f01 = h.add_edge(0, 1, 1);
  EdgeId f02 = h.add_edge(0, 2, 1);
  UpdateBatch bad;
  bad.split = true;
  bad.ops.push_back(Update::edge_delete(f01));
  bad.ops.push_back(Update::edge_delete(f02));
  bad.ops.push_back(Update::edge_insert(3, 1, 1));
  bad.ops.push_back(Update::edge_insert(3, 2, 1));
  CHECK_THROWS_AS(h.apply_batch(bad), MalformedBatch);
}

TEST_CASE("batch errors abort atomically") {
  DynGraph g = gen_path(3);
  UpdateBatch b;
  b.ops.push_back(Update::edge_delete(0));
  b.ops.push_back(Update::edge_delete(99));  // unknown
  CHECK_THROWS_AS(g.apply_batch(b), UnknownEdge);
  CHECK(g.has_edge(0));
  CHECK(g.time() == 0);

  DynGraph capped(1, 0, 2);
  capped.add_vertex();
  capped.add_vertex();
  capped.add_vertex();
  capped.add_edge(0, 1, 1);
  capped.add_edge(1, 2, 1);
  UpdateBatch over;
  over.ops.push_back(Update::edge_insert(0, 1, 1));  // deg(1) would hit 3
  CHECK_THROWS_AS(capped.apply_batch(over), DegreeCapExceeded);

  DynGraph ranged(2, 10);
  ranged.add_vertex();
  ranged.add_vertex();
  UpdateBatch low;
  low.ops.push_back(Update::edge_insert(0, 1, 1));
  CHECK_THROWS_AS(ranged.apply_batch(low), LengthOutOfRange);
}

TEST_CASE("tiebreak_compare basics") {
  PathHandle a{0, 1, 5, {1}};
  PathHandle b{0, 1, 7, {2}};
  CHECK(tiebreak_compare(a, a) == 0);
  CHECK(tiebreak_compare(a, b) < 0);
  CHECK(tiebreak_compare(b, a) > 0);
  PathHandle c{0, 2, 5, {3}};
  CHECK_THROWS_AS(tiebreak_compare(a, c), EndpointMismatch);
  // Equal length and hops: edge ids (1,4) beat (2,3).
  PathHandle p14{0, 3, 2, {1, 4}};
  PathHandle p23{0, 3, 2, {2, 3}};
  CHECK(tiebreak_compare(p14, p23) < 0);
}

TEST_CASE("tiebreak order is direction independent") {
  PathHandle f{0, 3, 2, {5, 1}};
  PathHandle g{0, 3, 2, {2, 6}};
  int fwd = tiebreak_compare(f, g);
  int bwd = tiebreak_compare(f.reversed(), g.reversed());
  CHECK(fwd == bwd);
  CHECK(fwd < 0);  // multiset {1,5} < {2,6}
}

namespace {

// All simple u->v paths by DFS over edges; used to cross-check minimality.
void all_paths(const DynGraph& g, Vertex v, Vertex dst, PathHandle& cur, std::set<Vertex>& used,
               std::vector<PathHandle>& out) {
  if (v == dst) {
    out.push_back(cur);
    return;
  }
  for (EdgeId e : g.incident(v)) {
    Vertex w = g.edge(e).other(v);
    if (w == v || used.count(w)) continue;
    used.insert(w);
    cur.edges.push_back(e);
    cur.len += g.edge(e).len;
    cur.dst = w;
    all_paths(g, w, dst, cur, used, out);
    cur.edges.pop_back();
    cur.len -= g.edge(e).len;
    used.erase(w);
  }
  cur.dst = dst;
}

}  // namespace

TEST_CASE("exactly one tiebreak-minimal path; engine SPT agrees with enumeration") {
  // Exhaustive-ish sweep over random 4-vertex multigraphs plus the oracle.
  for (uint64_t seed = 0; seed < 40; ++seed) {
    DynGraph g = gen_random_connected(4, 0, 3, 3, seed);
    for (Vertex u = 0; u < 4; ++u) {
      SPTree t = tiebreak_sssp(g, {.sources = {u}});
      OracleSSSP o = oracle_sssp(g, u);
      for (Vertex v = 0; v < 4; ++v) {
        if (u == v) continue;
        std::vector<PathHandle> paths;
        PathHandle cur;
        cur.src = u;
        cur.dst = v;
        std::set<Vertex> used{u};
        all_paths(g, u, v, cur, used, paths);
        REQUIRE(!paths.empty());
        // Unique minimum under the tiebreak order.
        int min_idx = 0;
        int min_count = 1;
        for (int i = 1; i < (int)paths.size(); ++i) {
          int c = tiebreak_compare(paths[i], paths[min_idx]);
          if (c < 0) {
            min_idx = i;
            min_count = 1;
          } else if (c == 0) {
            ++min_count;
          }
        }
        CHECK(min_count == 1);
        PathHandle engine = t.path_to(g, v);
        CHECK(tiebreak_compare(engine, paths[min_idx]) == 0);
        CHECK(tiebreak_compare(*o.best[v], paths[min_idx]) == 0);
      }
    }
  }
}

TEST_CASE("replaying the log reproduces the graph") {
  DynGraph g = gen_random_connected(12, 4, 6, 5, 7);
  DynGraph replayed;  // same initial construction
  for (int i = 0; i < 12; ++i) replayed.add_vertex();
  for (EdgeId e : g.live_edges()) {
    const EdgeRec& er = g.edge(e);
    replayed.add_edge(er.u, er.v, er.len);
  }
  for (int64_t step = 0; step < 60; ++step) {
    UpdateBatch b = gen_update(g, "fully-dynamic", 11, step, false, 1);
    if (b.ops.empty()) continue;
    g.apply_batch(b);
  }
  for (const UpdateBatch& b : g.log()) {
    UpdateBatch raw = b;  // ids were filled in by apply; strip insert ids
    for (Update& op : raw.ops)
      if (op.kind == Update::EdgeInsert) op.e = kNoEdge;
    replayed.apply_batch(raw);
  }
  CHECK(replayed.time() == g.time());
  CHECK(replayed.live_edges() == g.live_edges());
  CHECK(replayed.vertices() == g.vertices());
  for (EdgeId e : g.live_edges()) {
    CHECK(replayed.edge(e).u == g.edge(e).u);
    CHECK(replayed.edge(e).v == g.edge(e).v);
    CHECK(replayed.edge(e).len == g.edge(e).len);
  }
}

TEST_CASE("trace json round trip") {
  UpdateBatch b;
  b.ops.push_back(Update::edge_insert(0, 5, 12));
  b.ops.push_back(Update::edge_delete(3));
  b.ops.push_back(Update::vertex_insert());
  b.ops.push_back(Update::vertex_delete(4));
  b.split = true;
  int64_t t = 0;
  std::string line = batch_to_json(17, b);
  UpdateBatch back = batch_from_json(line, &t);
  CHECK(t == 17);
  CHECK(back.split);
  REQUIRE(back.ops.size() == 4);
  CHECK(back.ops[0].kind == Update::EdgeInsert);
  CHECK(back.ops[0].u == 0);
  CHECK(back.ops[0].v == 5);
  CHECK(back.ops[0].len == 12);
  CHECK(back.ops[1].e == 3);
  CHECK(back.ops[3].w == 4);
}

TEST_CASE("listeners notified in registration order") {
  DynGraph g = gen_path(3);
  std::vector<int> order;
  g.add_listener([&](const UpdateBatch&, const DynGraph::Applied&) { order.push_back(1); });
  g.add_listener([&](const UpdateBatch&, const DynGraph::Applied&) { order.push_back(2); });
  g.apply_batch({});
  CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("live edge count bookkeeping") {
  DynGraph g = gen_cycle(6);
  size_t m0 = g.num_edges();
  UpdateBatch b;
  b.ops.push_back(Update::edge_delete(0));
  b.ops.push_back(Update::edge_insert(0, 3, 2));
  g.apply_batch(b);
  CHECK(g.num_edges() == m0);
  CHECK(!g.has_edge(0));
}
