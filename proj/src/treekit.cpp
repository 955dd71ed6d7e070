#include "vsp/treekit.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace vsp {

DynForest::DynForest(int64_t n) : nodes_(n) {}

NodeId DynForest::add_node() {
  nodes_.emplace_back();
  return (NodeId)nodes_.size() - 1;
}

void DynForest::check(NodeId v) const {
  if (v < 0 || v >= (NodeId)nodes_.size()) throw UnknownNode("no such forest node");
}

void DynForest::apply_add(NodeId x, Value d) {
  Node& n = nodes_[x];
  if (n.has_pedge) n.eval += d;
  if (n.agg_argmin != kNoNode) n.agg_min += d;
  n.lz_add += d;
}

void DynForest::apply_clear(NodeId x) {
  Node& n = nodes_[x];
  n.marked = 0;
  n.agg_marked = 0;
  n.lz_clear = 1;
}

void DynForest::push(NodeId x) {
  Node& n = nodes_[x];
  if (n.lz_add != 0) {
    if (n.l != kNoNode) apply_add(n.l, n.lz_add);
    if (n.r != kNoNode) apply_add(n.r, n.lz_add);
    n.lz_add = 0;
  }
  if (n.lz_clear) {
    if (n.l != kNoNode) apply_clear(n.l);
    if (n.r != kNoNode) apply_clear(n.r);
    n.lz_clear = 0;
  }
}

void DynForest::pull(NodeId x) {
  Node& n = nodes_[x];
  n.agg_len = n.elen;
  n.agg_min = n.has_pedge ? n.eval : kInfValue;
  n.agg_argmin = n.has_pedge ? x : kNoNode;
  n.agg_marked = n.marked;
  for (NodeId c : {n.l, n.r}) {
    if (c == kNoNode) continue;
    const Node& cn = nodes_[c];
    n.agg_len += cn.agg_len;
    if (cn.agg_argmin != kNoNode &&
        (n.agg_argmin == kNoNode || cn.agg_min < n.agg_min ||
         (cn.agg_min == n.agg_min && cn.agg_argmin < n.agg_argmin))) {
      n.agg_min = cn.agg_min;
      n.agg_argmin = cn.agg_argmin;
    }
    n.agg_marked |= cn.agg_marked;
  }
}

void DynForest::rot(NodeId x) {
  NodeId p = nodes_[x].p;
  NodeId g = nodes_[p].p;
  nodes_[x].pp = nodes_[p].pp;
  nodes_[p].pp = kNoNode;
  if (nodes_[p].l == x) {
    nodes_[p].l = nodes_[x].r;
    if (nodes_[x].r != kNoNode) nodes_[nodes_[x].r].p = p;
    nodes_[x].r = p;
  } else {
    nodes_[p].r = nodes_[x].l;
    if (nodes_[x].l != kNoNode) nodes_[nodes_[x].l].p = p;
    nodes_[x].l = p;
  }
  nodes_[p].p = x;
  nodes_[x].p = g;
  if (g != kNoNode) {
    if (nodes_[g].l == p)
      nodes_[g].l = x;
    else
      nodes_[g].r = x;
  }
  pull(p);
  pull(x);
}

void DynForest::splay(NodeId x) {
  std::vector<NodeId> stk;
  for (NodeId y = x; y != kNoNode; y = nodes_[y].p) stk.push_back(y);
  for (auto it = stk.rbegin(); it != stk.rend(); ++it) push(*it);
  while (nodes_[x].p != kNoNode) {
    NodeId p = nodes_[x].p;
    NodeId g = nodes_[p].p;
    if (g != kNoNode) {
      if ((nodes_[g].l == p) == (nodes_[p].l == x))
        rot(p);
      else
        rot(x);
    }
    rot(x);
  }
}

NodeId DynForest::access(NodeId v) {
  splay(v);
  if (nodes_[v].r != kNoNode) {
    nodes_[nodes_[v].r].p = kNoNode;
    nodes_[nodes_[v].r].pp = v;
    nodes_[v].r = kNoNode;
    pull(v);
  }
  NodeId last = v;
  while (nodes_[v].pp != kNoNode) {
    NodeId w = nodes_[v].pp;
    last = w;
    splay(w);
    if (nodes_[w].r != kNoNode) {
      nodes_[nodes_[w].r].p = kNoNode;
      nodes_[nodes_[w].r].pp = w;
    }
    nodes_[w].r = v;
    nodes_[v].p = w;
    nodes_[v].pp = kNoNode;
    pull(w);
    splay(v);
  }
  return last;
}

void DynForest::link(NodeId child, NodeId parent, Length len, Value val) {
  check(child);
  check(parent);
  assert(find_root(child) == child && "link child must be a tree root");
  if (find_root(parent) == child) throw WouldCreateCycle();
  access(child);
  access(parent);
  assert(nodes_[child].l == kNoNode && "accessed root has no path predecessor");
  nodes_[child].l = parent;
  nodes_[parent].p = child;
  nodes_[child].has_pedge = true;
  nodes_[child].elen = len;
  nodes_[child].eval = val;
  pull(child);
  if (journal_on_ && !reverting_) journal_.push_back({JEntry::Link, child, parent, len, val, 0});
}

void DynForest::cut(NodeId child) {
  check(child);
  access(child);
  if (nodes_[child].l == kNoNode) throw UnknownNode("cut: node has no parent edge");
  NodeId pa = nodes_[child].l;
  push(pa);
  while (nodes_[pa].r != kNoNode) {
    pa = nodes_[pa].r;
    push(pa);
  }
  Length old_len = nodes_[child].elen;
  Value old_val = nodes_[child].eval;
  nodes_[nodes_[child].l].p = kNoNode;
  nodes_[child].l = kNoNode;
  nodes_[child].has_pedge = false;
  nodes_[child].elen = 0;
  nodes_[child].eval = kInfValue;
  pull(child);
  if (journal_on_ && !reverting_) journal_.push_back({JEntry::Cut, child, pa, old_len, old_val, 0});
}

bool DynForest::has_parent(NodeId v) {
  check(v);
  access(v);
  return nodes_[v].l != kNoNode;
}

NodeId DynForest::parent(NodeId v) {
  check(v);
  access(v);
  NodeId x = nodes_[v].l;
  if (x == kNoNode) return kNoNode;
  while (nodes_[x].r != kNoNode) x = nodes_[x].r;
  splay(x);
  return x;
}

NodeId DynForest::find_root(NodeId v) {
  check(v);
  access(v);
  NodeId x = v;
  while (nodes_[x].l != kNoNode) x = nodes_[x].l;
  splay(x);
  return x;
}

bool DynForest::connected(NodeId u, NodeId v) { return find_root(u) == find_root(v); }

NodeId DynForest::lca(NodeId u, NodeId v) {
  check(u);
  check(v);
  if (!connected(u, v)) throw DisconnectedPair();
  access(u);
  return access(v);
}

Length DynForest::root_path_length(NodeId v) {
  check(v);
  access(v);
  return nodes_[v].agg_len;
}

Length DynForest::edge_len(NodeId v) {
  check(v);
  splay(v);
  return nodes_[v].elen;
}

Value DynForest::edge_val(NodeId v) {
  check(v);
  splay(v);
  return nodes_[v].eval;
}

void DynForest::set_edge_val(NodeId v, Value x) {
  check(v);
  splay(v);
  if (!nodes_[v].has_pedge) throw UnknownNode("set_edge_val: node has no parent edge");
  if (journal_on_ && !reverting_)
    journal_.push_back({JEntry::SetVal, v, kNoNode, 0, nodes_[v].eval, 0});
  nodes_[v].eval = x;
  pull(v);
}

Length DynForest::path_length(NodeId u, NodeId v) {
  NodeId a = lca(u, v);
  Length total = 0;
  for (NodeId x : {u, v}) {
    access(x);
    splay(a);
    if (nodes_[a].r != kNoNode) total += nodes_[nodes_[a].r].agg_len;
  }
  return total;
}

std::pair<NodeId, Value> DynForest::path_min_capacity(NodeId u, NodeId v) {
  NodeId a = lca(u, v);
  NodeId arg = kNoNode;
  Value best = kInfValue;
  for (NodeId x : {u, v}) {
    access(x);
    splay(a);
    NodeId s = nodes_[a].r;
    if (s == kNoNode) continue;
    push(a);
    const Node& sn = nodes_[s];
    if (sn.agg_argmin != kNoNode &&
        (arg == kNoNode || sn.agg_min < best || (sn.agg_min == best && sn.agg_argmin < arg))) {
      best = sn.agg_min;
      arg = sn.agg_argmin;
    }
  }
  return {arg, best};
}

void DynForest::add_on_path(NodeId u, NodeId v, Value delta) {
  NodeId a = lca(u, v);
  for (NodeId x : {u, v}) {
    access(x);
    splay(a);
    if (nodes_[a].r != kNoNode) {
      push(a);
      apply_add(nodes_[a].r, delta);
      pull(a);
    }
  }
  if (journal_on_ && !reverting_) journal_.push_back({JEntry::AddPath, u, v, 0, delta, 0});
}

void DynForest::set_mark_bit(NodeId v, char bit) {
  splay(v);
  if (journal_on_ && !reverting_)
    journal_.push_back({JEntry::MarkBit, v, kNoNode, 0, 0, nodes_[v].marked});
  nodes_[v].marked = bit;
  pull(v);
}

void DynForest::mark(NodeId v) {
  check(v);
  set_mark_bit(v, 1);
}

void DynForest::unmark(NodeId v) {
  check(v);
  set_mark_bit(v, 0);
}

bool DynForest::is_marked(NodeId v) {
  check(v);
  splay(v);
  return nodes_[v].marked != 0;
}

NodeId DynForest::farthest_marked_ancestor(NodeId v) {
  check(v);
  access(v);
  if (!nodes_[v].agg_marked) return kNoNode;
  NodeId x = v;
  while (true) {
    push(x);
    NodeId l = nodes_[x].l;
    if (l != kNoNode && nodes_[l].agg_marked) {
      x = l;
      continue;
    }
    if (nodes_[x].marked) break;
    x = nodes_[x].r;
    assert(x != kNoNode && "agg_marked promised a marked node");
  }
  splay(x);
  return x;
}

void DynForest::unmark_subtree_rooted_at(NodeId v) {
  check(v);
  if (journal_on_ && !reverting_) {
    NodeId w;
    while ((w = farthest_marked_ancestor(v)) != kNoNode) set_mark_bit(w, 0);
    return;
  }
  access(v);
  push(v);
  nodes_[v].marked = 0;
  if (nodes_[v].l != kNoNode) apply_clear(nodes_[v].l);
  pull(v);
}

void DynForest::journal_begin() {
  journal_.clear();
  journal_on_ = true;
}

void DynForest::journal_revert() {
  reverting_ = true;
  for (auto it = journal_.rbegin(); it != journal_.rend(); ++it) {
    switch (it->kind) {
      case JEntry::Link:
        cut(it->a);
        break;
      case JEntry::Cut:
        link(it->a, it->b, it->len, it->val);
        break;
      case JEntry::AddPath:
        add_on_path(it->a, it->b, -it->val);
        break;
      case JEntry::MarkBit:
        set_mark_bit(it->a, it->bit);
        break;
      case JEntry::SetVal:
        splay(it->a);
        nodes_[it->a].eval = it->val;
        pull(it->a);
        break;
    }
  }
  reverting_ = false;
  journal_on_ = false;
  journal_.clear();
}

DynForest::Digest DynForest::digest() {
  Digest d;
  int64_t n = num_nodes();
  d.parent.resize(n);
  d.elen.resize(n);
  d.eval.resize(n);
  d.marked.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    d.parent[v] = parent(v);
    splay(v);
    d.elen[v] = nodes_[v].elen;
    d.eval[v] = nodes_[v].eval;
    d.marked[v] = nodes_[v].marked;
  }
  return d;
}

std::vector<size_t> find_sets(const std::vector<std::pair<NodeId, NodeId>>& tree_edges,
                              const std::map<NodeId, int64_t>& weight, int64_t z,
                              const std::vector<NodeId>& preferred_roots) {
  assert(z >= 1 && "find_sets: z >= 1");
  std::map<NodeId, std::vector<std::pair<NodeId, size_t>>> adj;
  for (size_t i = 0; i < tree_edges.size(); ++i) {
    auto [a, b] = tree_edges[i];
    adj[a].push_back({b, i});
    adj[b].push_back({a, i});
  }
  for (auto& [v, nb] : adj) std::sort(nb.begin(), nb.end());

  std::set<NodeId> seen;
  std::vector<size_t> cuts;
  auto run_root = [&](NodeId root) {
    // Iterative post-order accumulating subtree weight; cut a parent edge as
    // soon as the accumulated weight reaches z.
    struct Frame {
      NodeId v;
      NodeId from;
      size_t parent_edge;
      size_t next = 0;
      int64_t acc = 0;
    };
    std::vector<Frame> st;
    auto w_of = [&](NodeId v) {
      auto it = weight.find(v);
      return it == weight.end() ? (int64_t)0 : it->second;
    };
    st.push_back({root, kNoNode, (size_t)-1, 0, w_of(root)});
    seen.insert(root);
    while (!st.empty()) {
      Frame& f = st.back();
      auto& nb = adj[f.v];
      if (f.next < nb.size()) {
        auto [to, ei] = nb[f.next++];
        if (to == f.from || seen.count(to)) continue;
        seen.insert(to);
        st.push_back({to, f.v, ei, 0, w_of(to)});
        continue;
      }
      int64_t acc = f.acc;
      size_t pe = f.parent_edge;
      bool is_root = st.size() == 1;
      st.pop_back();
      if (is_root) break;
      if (acc >= z)
        cuts.push_back(pe);
      else
        st.back().acc += acc;
    }
  };
  for (NodeId r : preferred_roots)
    if (adj.count(r) && !seen.count(r)) run_root(r);
  for (const auto& [v, nb] : adj)
    if (!seen.count(v)) run_root(v);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

}  // namespace vsp
