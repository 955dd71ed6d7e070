#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "vsp/dyngraph.hpp"
#include "vsp/lssf.hpp"

namespace vsp {

// Host-graph side of one maintained update batch, as seen after the host
// applied it. Edge ids are host ids; deleted edges may already be dead.
struct HostDelta {
  std::vector<EdgeId> deleted_edges;
  std::vector<EdgeId> inserted_edges;
  std::vector<Vertex> inserted_vertices;
  std::vector<Vertex> deleted_vertices;
  bool empty() const {
    return deleted_edges.empty() && inserted_edges.empty() && inserted_vertices.empty() &&
           deleted_vertices.empty();
  }
};

// Label-keyed structural snapshot used for rebuild-equivalence checks: edge
// identity is (endpoint labels, length, level, pre-image tag), never raw ids.
struct CoreCanon {
  std::set<std::pair<int, Vertex>> nodes;
  // (lo label, hi label, length, level, tag): images tag the host edge id at
  // their level; zero-links use level -1 and tag the shared host vertex.
  std::multiset<std::tuple<std::pair<int, Vertex>, std::pair<int, Vertex>, Length, int, int64_t>>
      edges;
  bool operator==(const CoreCanon&) const = default;
};

// Core graphs of every maintained forest, glued into one graph: one node per
// (forest index, root), the image of each live host edge at every level with
// length str_over(e)*l(e), and length-0 links joining the copies of a host
// vertex in a star around its lowest-level copy. Maintained incrementally:
// each forest cut splits a node (the side that lost its root moves to a fresh
// node), host edge updates project to image updates, and new roots get links.
class CoreGraphView {
 public:
  CoreGraphView(const DynGraph& host, const std::vector<StretchForest>& forests);

  const DynGraph& tilde() const { return tilde_; }
  DynGraph& tilde() { return tilde_; }
  int levels() const { return (int)lambda_; }

  // Node of label (i, root); kNoVertex if absent.
  Vertex node(int i, Vertex root) const;
  std::pair<int, Vertex> label(Vertex node) const;
  // Root of v in the mirrored forest i, then its node.
  Vertex host_root(int i, Vertex v) const;
  Vertex node_of_host(int i, Vertex v) const { return node(i, host_root(i, v)); }

  EdgeId image(int i, EdgeId host_edge) const;
  // (level, host edge) of an image; throws UnknownEdge for zero-links.
  std::pair<int, EdgeId> preimage(EdgeId e) const;
  bool is_zero_link(EdgeId e) const { return zl_rev_.count(e) != 0; }
  const std::map<std::pair<int, Vertex>, EdgeId>& zero_links() const { return zl_edge_; }

  // Replay one host update's forest deltas (one LssfDelta per level) plus the
  // host-side edge/vertex changes; applies the resulting batch to the core
  // graph and returns it as logged (empty deltas yield an empty batch).
  UpdateBatch apply_forest_delta(const std::vector<LssfDelta>& deltas, const HostDelta& host);

  // Host walk realizing an image edge: root path down to the near endpoint,
  // the pre-image, and back up to the far root (the in-tree path when both
  // endpoints share a root). Enter from `from_node`; never longer than l(e).
  PathHandle decode_image(EdgeId e, Vertex from_node) const;
  // Concatenated decoding of a whole core-graph path (zero-links vanish).
  PathHandle decode_path(const PathHandle& p) const;

  CoreCanon canonical_form() const;
  void self_check() const;

  int64_t last_batch_ops() const { return last_batch_ops_; }
  int64_t max_batch_ops() const { return max_batch_ops_; }
  // Image lengths are bounded by (n0+1)*L0 captured at build time.
  Length length_cap() const { return len_cap_; }

 private:
  // Root-path edge ids of v in mirror i, bottom-up (v towards the root).
  std::vector<EdgeId> mirror_root_path(int i, Vertex v) const;
  std::vector<Vertex> mirror_subtree(int i, Vertex c) const;

  const DynGraph& host_;
  const std::vector<StretchForest>* forests_;
  size_t lambda_;
  DynGraph tilde_{0};

  // Mirrors of the maintained forests: child -> (parent, forest edge id).
  std::vector<std::map<Vertex, std::pair<Vertex, EdgeId>>> par_;
  std::vector<std::map<Vertex, std::set<Vertex>>> kids_;
  std::vector<std::map<EdgeId, std::pair<Vertex, Vertex>>> medge_;

  std::map<std::pair<int, Vertex>, Vertex> node_id_;
  std::map<Vertex, std::pair<int, Vertex>> node_label_;
  std::map<Vertex, std::set<int>> copies_;  // host vertex -> levels rooting it

  std::vector<std::map<EdgeId, EdgeId>> images_;  // level -> host edge -> image
  std::map<EdgeId, std::pair<int, EdgeId>> preimage_;
  std::map<std::pair<int, Vertex>, EdgeId> zl_edge_;  // non-center copy -> link
  std::map<EdgeId, std::pair<int, Vertex>> zl_rev_;

  Length len_cap_ = 0;
  int64_t last_batch_ops_ = 0, max_batch_ops_ = 0;
};

}  // namespace vsp
