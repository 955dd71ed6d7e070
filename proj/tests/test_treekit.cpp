#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "vsp/dyngraph.hpp"
#include "vsp/harness.hpp"
#include "vsp/treekit.hpp"

using namespace vsp;

namespace {

// Parent-array oracle mirroring every DynForest operation naively.
struct Naive {
  std::vector<NodeId> par;
  std::vector<Length> elen;
  std::vector<Value> eval;
  std::vector<char> marked;

  explicit Naive(int64_t n) : par(n, kNoNode), elen(n, 0), eval(n, kInfValue), marked(n, 0) {}

  NodeId root(NodeId v) const {
    while (par[v] != kNoNode) v = par[v];
    return v;
  }
  std::vector<NodeId> root_path(NodeId v) const {  // v..root inclusive
    std::vector<NodeId> p{v};
    while (par[p.back()] != kNoNode) p.push_back(par[p.back()]);
    return p;
  }
  NodeId lca(NodeId u, NodeId v) const {
    auto pu = root_path(u);
    std::set<NodeId> s(pu.begin(), pu.end());
    NodeId x = v;
    while (!s.count(x)) x = par[x];
    return x;
  }
  std::vector<NodeId> path_nodes(NodeId u, NodeId v) const {  // child ends of path edges
    NodeId a = lca(u, v);
    std::vector<NodeId> out;
    for (NodeId x = u; x != a; x = par[x]) out.push_back(x);
    for (NodeId x = v; x != a; x = par[x]) out.push_back(x);
    return out;
  }
};

}  // namespace

TEST_CASE("link then cut restores the forest; chains answer root queries") {
  DynForest f(6);
  f.link(1, 0, 3, 5);
  CHECK(f.parent(1) == 0);
  CHECK(f.edge_len(1) == 3);
  f.cut(1);
  CHECK(f.parent(1) == kNoNode);
  for (NodeId v = 1; v < 5; ++v) f.link(v, v - 1, 1, 1);
  for (NodeId v = 0; v < 5; ++v) CHECK(f.find_root(v) == 0);
  CHECK(f.root_path_length(4) == 4);
  CHECK(f.path_length(4, 0) == 4);
  CHECK_THROWS_AS(f.link(0, 4, 1, 1), WouldCreateCycle);
  CHECK_THROWS_AS(f.cut(0), UnknownNode);
  CHECK_THROWS_AS(f.link(99, 0, 1, 1), UnknownNode);
  CHECK(!f.connected(0, 5));
  CHECK_THROWS_AS(f.path_length(0, 5), DisconnectedPair);
}

TEST_CASE("path aggregates on tiny trees") {
  DynForest f(4);
  f.link(1, 0, 2, 7);
  f.link(2, 0, 5, 3);
  f.link(3, 1, 1, 9);
  CHECK(f.path_length(3, 3) == 0);
  CHECK(f.path_min_capacity(3, 3) == std::pair<NodeId, Value>{kNoNode, kInfValue});
  CHECK(f.path_length(3, 2) == 1 + 2 + 5);
  CHECK(f.path_min_capacity(3, 2) == std::pair<NodeId, Value>{2, 3});
  CHECK(f.path_min_capacity(1, 0) == std::pair<NodeId, Value>{1, 7});
  CHECK(f.lca(3, 2) == 0);
  CHECK(f.lca(3, 1) == 1);
  f.add_on_path(3, 2, -2);
  CHECK(f.edge_val(3) == 7);
  CHECK(f.edge_val(1) == 5);
  CHECK(f.edge_val(2) == 1);
  f.set_edge_val(2, 100);
  CHECK(f.path_min_capacity(3, 2) == std::pair<NodeId, Value>{1, 5});
}

TEST_CASE("marked ancestors on small trees") {
  DynForest f(7);
  for (NodeId v = 1; v < 7; ++v) f.link(v, (v - 1) / 2, 1, 1);  // binary heap shape
  CHECK(f.farthest_marked_ancestor(6) == kNoNode);
  f.mark(0);
  for (NodeId v = 0; v < 7; ++v) CHECK(f.farthest_marked_ancestor(v) == 0);
  f.mark(2);
  CHECK(f.farthest_marked_ancestor(5) == 0);  // 0 is farther than 2
  f.unmark(0);
  CHECK(f.farthest_marked_ancestor(5) == 2);
  CHECK(f.farthest_marked_ancestor(5) == f.farthest_marked_ancestor(2));
  CHECK(f.farthest_marked_ancestor(1) == kNoNode);
  f.mark(5);
  f.unmark_subtree_rooted_at(5);  // clears 5, 2, 0
  CHECK(f.farthest_marked_ancestor(5) == kNoNode);
  CHECK(f.is_marked(2) == false);
}

TEST_CASE("journal revert restores the exact digest") {
  std::mt19937_64 rng(99);
  DynForest f(20);
  Naive nv(20);
  // Build a random forest first.
  for (NodeId v = 1; v < 20; ++v) {
    if (rng() % 4 == 0) continue;
    NodeId p = (NodeId)(rng() % v);
    f.link(v, p, (Length)(rng() % 9 + 1), (Value)(rng() % 50));
    nv.par[v] = p;
  }
  for (NodeId v = 0; v < 20; v += 3) f.mark(v);
  DynForest::Digest before = f.digest();
  f.journal_begin();
  for (int i = 0; i < 200; ++i) {
    NodeId v = (NodeId)(rng() % 20);
    switch (rng() % 6) {
      case 0:
        if (f.find_root(v) == v) {
          NodeId p = (NodeId)(rng() % 20);
          if (f.find_root(p) != v) f.link(v, p, 1, 1);
        }
        break;
      case 1:
        if (f.has_parent(v)) f.cut(v);
        break;
      case 2:
        f.mark(v);
        break;
      case 3:
        f.unmark_subtree_rooted_at(v);
        break;
      case 4: {
        NodeId u = (NodeId)(rng() % 20);
        if (f.connected(u, v)) f.add_on_path(u, v, (Value)(rng() % 7) - 3);
        break;
      }
      case 5:
        if (f.has_parent(v)) f.set_edge_val(v, (Value)(rng() % 100));
        break;
    }
  }
  f.journal_revert();
  CHECK(f.digest() == before);
}

TEST_CASE("fuzz against naive forest oracle") {
  std::mt19937_64 rng(7);
  const int64_t n = 60;
  DynForest f(n);
  Naive nv(n);
  int64_t checked = 0;
  for (int step = 0; step < 10000; ++step) {
    NodeId v = (NodeId)(rng() % n);
    NodeId u = (NodeId)(rng() % n);
    switch (rng() % 10) {
      case 0: {  // link a root somewhere
        if (nv.par[v] != kNoNode) break;
        if (nv.root(u) == v) {
          CHECK_THROWS_AS(f.link(v, u, 1, 1), WouldCreateCycle);
          break;
        }
        Length l = (Length)(rng() % 9 + 1);
        Value c = (Value)(rng() % 30);
        f.link(v, u, l, c);
        nv.par[v] = u;
        nv.elen[v] = l;
        nv.eval[v] = c;
        break;
      }
      case 1: {  // cut
        if (nv.par[v] == kNoNode) break;
        f.cut(v);
        nv.par[v] = kNoNode;
        nv.elen[v] = 0;
        nv.eval[v] = kInfValue;
        break;
      }
      case 2:
        f.mark(v);
        nv.marked[v] = 1;
        break;
      case 3:
        f.unmark(v);
        nv.marked[v] = 0;
        break;
      case 4: {  // farthest marked ancestor
        NodeId got = f.farthest_marked_ancestor(v);
        NodeId want = kNoNode;
        for (NodeId x : nv.root_path(v))
          if (nv.marked[x]) want = x;  // last = nearest the root
        CHECK(got == want);
        ++checked;
        break;
      }
      case 5: {  // unmark ancestors
        f.unmark_subtree_rooted_at(v);
        for (NodeId x : nv.root_path(v)) nv.marked[x] = 0;
        break;
      }
      case 6: {  // path length + min
        if (nv.root(u) != nv.root(v)) {
          CHECK_THROWS_AS(f.path_length(u, v), DisconnectedPair);
          break;
        }
        Length wl = 0;
        Value wmin = kInfValue;
        NodeId warg = kNoNode;
        for (NodeId x : nv.path_nodes(u, v)) {
          wl += nv.elen[x];
          if (nv.eval[x] < wmin || (nv.eval[x] == wmin && x < warg)) {
            wmin = nv.eval[x];
            warg = x;
          }
        }
        CHECK(f.path_length(u, v) == wl);
        auto [garg, gmin] = f.path_min_capacity(u, v);
        CHECK(gmin == wmin);
        CHECK(garg == warg);
        ++checked;
        break;
      }
      case 7: {  // add on path
        if (nv.root(u) != nv.root(v)) break;
        Value d = (Value)(rng() % 11) - 5;
        f.add_on_path(u, v, d);
        for (NodeId x : nv.path_nodes(u, v)) nv.eval[x] += d;
        break;
      }
      case 8: {  // root / connectivity / lca
        CHECK(f.find_root(v) == nv.root(v));
        CHECK(f.connected(u, v) == (nv.root(u) == nv.root(v)));
        if (nv.root(u) == nv.root(v)) CHECK(f.lca(u, v) == nv.lca(u, v));
        ++checked;
        break;
      }
      case 9: {  // parent + channels
        CHECK(f.parent(v) == nv.par[v]);
        if (nv.par[v] != kNoNode) {
          CHECK(f.edge_len(v) == nv.elen[v]);
          CHECK(f.edge_val(v) == nv.eval[v]);
        }
        ++checked;
        break;
      }
    }
    if (step % 500 == 0) {
      DynForest::Digest d = f.digest();
      CHECK(d.parent == nv.par);
      CHECK(d.elen == nv.elen);
      CHECK(d.eval == nv.eval);
      CHECK(d.marked == nv.marked);
    }
  }
  CHECK(checked > 1000);
}

namespace {

// Incidence audit: component weights after removing the cut edges.
std::vector<int64_t> component_weights(const std::vector<std::pair<NodeId, NodeId>>& edges,
                                       const std::map<NodeId, int64_t>& w,
                                       const std::vector<size_t>& cuts) {
  std::set<size_t> cut(cuts.begin(), cuts.end());
  std::map<NodeId, std::vector<NodeId>> adj;
  std::set<NodeId> nodes;
  for (size_t i = 0; i < edges.size(); ++i) {
    nodes.insert(edges[i].first);
    nodes.insert(edges[i].second);
    if (cut.count(i)) continue;
    adj[edges[i].first].push_back(edges[i].second);
    adj[edges[i].second].push_back(edges[i].first);
  }
  std::set<NodeId> seen;
  std::vector<int64_t> out;
  for (NodeId s : nodes) {
    if (seen.count(s)) continue;
    int64_t acc = 0;
    std::vector<NodeId> st{s};
    seen.insert(s);
    while (!st.empty()) {
      NodeId x = st.back();
      st.pop_back();
      auto it = w.find(x);
      acc += it == w.end() ? 0 : it->second;
      for (NodeId y : adj[x])
        if (seen.insert(y).second) st.push_back(y);
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace

TEST_CASE("find_sets trivial and path examples") {
  // z covering everything: no cuts.
  std::vector<std::pair<NodeId, NodeId>> star{{0, 1}, {0, 2}, {0, 3}};
  std::map<NodeId, int64_t> w{{0, 1}, {1, 1}, {2, 1}, {3, 1}};
  CHECK(find_sets(star, w, 4).empty());
  CHECK(find_sets(star, w, 100).empty());

  // Path on 9 nodes, each with one incident host edge, Delta=3, z=3.
  std::vector<std::pair<NodeId, NodeId>> path;
  std::map<NodeId, int64_t> wp;
  for (NodeId i = 0; i < 9; ++i) wp[i] = 1;
  for (NodeId i = 0; i + 1 < 9; ++i) path.push_back({i, i + 1});
  std::vector<size_t> cuts = find_sets(path, wp, 3);
  auto comps = component_weights(path, wp, cuts);
  int64_t small = 0;
  for (int64_t c : comps) {
    CHECK(c <= 3 * 3);
    if (c < 3) ++small;
  }
  CHECK(small <= 1);
  CHECK(comps.size() == cuts.size() + 1);
}

TEST_CASE("find_sets bound audit on random trees") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 5 + (int)(rng() % 60);
    int delta = 3 + (int)(rng() % 3);
    DynGraph g = gen_random_connected(n, delta, n / 2, 5, rng());
    // Spanning tree via the shortest-path forest; weights = host degrees.
    std::vector<std::pair<NodeId, NodeId>> tree;
    {
      OracleSSSP o = oracle_sssp(g, 0);
      for (Vertex v : g.vertices())
        if (v != 0 && o.best[v].has_value() && !o.best[v]->edges.empty()) {
          const PathHandle& p = *o.best[v];
          Vertex pen = p.hops() >= 2 ? g.edge(p.edges[p.hops() - 1]).other(v) : 0;
          tree.push_back({v, pen});
        }
    }
    std::map<NodeId, int64_t> w;
    int64_t total = 0;
    for (Vertex v : g.vertices()) {
      w[v] = (int64_t)g.degree(v);
      total += w[v];
    }
    int64_t z = 1 + (int64_t)(rng() % 10);
    std::vector<size_t> cuts = find_sets(tree, w, z);
    auto comps = component_weights(tree, w, cuts);
    int64_t small = 0;
    for (int64_t c : comps) {
      CHECK(c <= delta * z);
      if (c < z) ++small;
    }
    CHECK(small <= 1);
    CHECK(find_sets(tree, w, total + 1).empty());
  }
}

TEST_CASE("find_sets respects preferred roots") {
  std::vector<std::pair<NodeId, NodeId>> path{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  std::map<NodeId, int64_t> w{{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}};
  std::vector<size_t> a = find_sets(path, w, 2, {0});
  std::vector<size_t> b = find_sets(path, w, 2, {4});
  CHECK(a != b);  // accumulation direction differs
  for (const auto& cuts : {a, b})
    for (int64_t c : component_weights(path, w, cuts)) CHECK(c <= 2 * 2);
}
