#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vsp/dyngraph.hpp"

namespace vsp {

struct WouldCreateCycle : std::runtime_error {
  WouldCreateCycle() : std::runtime_error("link would create a cycle") {}
};
struct UnknownNode : std::runtime_error {
  explicit UnknownNode(const std::string& what) : std::runtime_error(what) {}
};
struct DisconnectedPair : std::runtime_error {
  DisconnectedPair() : std::runtime_error("nodes are in different trees") {}
};

using NodeId = int64_t;
using Value = int64_t;
constexpr NodeId kNoNode = -1;
constexpr Value kInfValue = std::numeric_limits<int64_t>::max() / 4;

// Rooted dynamic forest (splay link-cut core, no re-rooting). Each non-root
// node carries the data of the edge to its parent: a length (summed along
// paths) and a value channel (min along paths, lazy add). Nodes carry a mark
// bit with ancestor queries. An optional journal records mutations so a
// query-time sequence can be reverted exactly.
class DynForest {
 public:
  explicit DynForest(int64_t n = 0);
  NodeId add_node();
  int64_t num_nodes() const { return (int64_t)nodes_.size(); }

  // Structure. The edge is identified by its child endpoint.
  void link(NodeId child, NodeId parent, Length len, Value val = kInfValue);
  void cut(NodeId child);
  bool has_parent(NodeId v);
  NodeId parent(NodeId v);  // kNoNode for roots
  NodeId find_root(NodeId v);
  bool connected(NodeId u, NodeId v);
  NodeId lca(NodeId u, NodeId v);  // DisconnectedPair when in different trees
  Length root_path_length(NodeId v);

  // Parent-edge channels of v.
  Length edge_len(NodeId v);
  Value edge_val(NodeId v);
  void set_edge_val(NodeId v, Value x);

  // Aggregates over the unique u..v tree path (through the LCA).
  Length path_length(NodeId u, NodeId v);
  // (child endpoint of the min-value edge, its value); (kNoNode, kInfValue) when u == v.
  std::pair<NodeId, Value> path_min_capacity(NodeId u, NodeId v);
  void add_on_path(NodeId u, NodeId v, Value delta);

  // Marks and ancestor queries.
  void mark(NodeId v);
  void unmark(NodeId v);
  bool is_marked(NodeId v);
  // Marked ancestor of v (v included) farthest from v, i.e. nearest the root.
  NodeId farthest_marked_ancestor(NodeId v);
  // Clears marks on all ancestors of v, v included.
  void unmark_subtree_rooted_at(NodeId v);

  // Journal: every mutation between begin and revert is undone exactly.
  void journal_begin();
  void journal_revert();
  bool journal_active() const { return journal_on_; }

  struct Digest {
    std::vector<NodeId> parent;
    std::vector<Length> elen;
    std::vector<Value> eval;
    std::vector<char> marked;
    bool operator==(const Digest&) const = default;
  };
  Digest digest();

 private:
  struct Node {
    NodeId l = kNoNode, r = kNoNode, p = kNoNode, pp = kNoNode;
    bool has_pedge = false;
    Length elen = 0;
    Value eval = kInfValue;
    Length agg_len = 0;
    Value agg_min = kInfValue;
    NodeId agg_argmin = kNoNode;
    char marked = 0, agg_marked = 0, lz_clear = 0;
    Value lz_add = 0;
  };
  struct JEntry {
    enum Kind { Link, Cut, AddPath, MarkBit, SetVal } kind;
    NodeId a = kNoNode, b = kNoNode;
    Length len = 0;
    Value val = 0;
    char bit = 0;
  };

  void check(NodeId v) const;
  void apply_add(NodeId x, Value d);
  void apply_clear(NodeId x);
  void push(NodeId x);
  void pull(NodeId x);
  void rot(NodeId x);
  void splay(NodeId x);
  NodeId access(NodeId v);  // returns last preferred-path switch (LCA helper)
  void set_mark_bit(NodeId v, char bit);

  std::vector<Node> nodes_;
  std::vector<JEntry> journal_;
  bool journal_on_ = false;
  bool reverting_ = false;
};

// Frederickson partition. Cuts tree edges so that in tree-minus-cuts every
// component C satisfies sum of weight over C <= Delta*z (Delta = host degree
// bound implied by the weights) and, per input tree, all components except
// possibly the root's have weight sum >= z. Returns indices into tree_edges.
// weight[v] = number of host edges incident to v (absent = 0). Components are
// rooted at preferred_roots where given, else at the smallest node id.
std::vector<size_t> find_sets(const std::vector<std::pair<NodeId, NodeId>>& tree_edges,
                              const std::map<NodeId, int64_t>& weight, int64_t z,
                              const std::vector<NodeId>& preferred_roots = {});

}  // namespace vsp
