#pragma once

#include <map>
#include <set>
#include <vector>

#include "vsp/dyngraph.hpp"

namespace vsp {

// Delta emitted by pivot-state mutations: memberships only shrink, stored
// paths are discarded (never recomputed), and forest edges are swapped.
struct PivotDelta {
  std::vector<Vertex> new_terminals;
  std::vector<std::pair<Vertex, Vertex>> removed_ball;  // (u, w): w left B(u, A)
  struct PivotChange {
    Vertex v, old_pivot, new_pivot;
  };
  std::vector<PivotChange> pivot_changes;
  struct ForestChange {
    Vertex child;
    EdgeId edge;
    Vertex parent;
  };
  std::vector<ForestChange> forest_removed, forest_added;
  std::vector<std::pair<Vertex, Vertex>> dropped_paths;  // stored (u, w) paths discarded

  bool empty() const {
    return new_terminals.empty() && removed_ball.empty() && pivot_changes.empty() &&
           forest_removed.empty() && forest_added.empty() && dropped_paths.empty();
  }
  void append(PivotDelta&& o);
};

// Pivots, open balls, clusters, intra-ball shortest paths and the pivot
// forest of a graph, maintained under edge deletions (with the contract that
// update endpoints become terminals) and terminal insertions.
class PivotState {
 public:
  // A = center(g, k) unless an explicit initial terminal set is supplied.
  PivotState(DynGraph& g, int64_t k, const std::vector<Vertex>* initial_terminals = nullptr);

  PivotDelta add_terminal(Vertex v);
  // Endpoints of e become terminals; the deletion itself then changes nothing.
  PivotDelta prepare_delete(EdgeId e);
  void on_deleted(EdgeId e);
  PivotDelta delete_edge(EdgeId e);  // prepare + apply to the graph + verify

  // Insertion between existing vertices: endpoints become terminals first.
  PivotDelta prepare_insert(Vertex u, Vertex v);
  void on_inserted(EdgeId e);

  // A vertex was removed from the graph (it was isolated and terminal).
  void remove_vertex(Vertex v);

  const DynGraph& graph() const { return g_; }
  int64_t k() const { return k_; }
  const std::set<Vertex>& terminals() const { return a_; }
  bool is_terminal(Vertex v) const;
  const std::vector<char>& terminal_flags() const { return is_terminal_; }
  Vertex pivot(Vertex v) const;
  Length dist_to_a(Vertex v) const;
  const PathHandle& pivot_path(Vertex v) const;
  const std::vector<Vertex>& ball(Vertex v) const;          // settle order, v included
  const std::set<Vertex>& cluster(Vertex v) const;          // inverse membership
  const std::map<Vertex, PathHandle>& paths(Vertex v) const;  // ball targets + pivot
  Vertex forest_parent(Vertex v) const;                     // kNoVertex at roots
  EdgeId forest_parent_edge(Vertex v) const;

  // Exhaustive internal-consistency check (used by tests).
  void self_check() const;

 private:
  void grow();
  PivotDelta absorb_terminal(Vertex v);
  void set_pivot(Vertex u, Vertex piv, PathHandle path, PivotDelta& d);
  void truncate_ball(Vertex u, Length radius, PivotDelta& d);

  DynGraph& g_;
  int64_t k_;
  std::set<Vertex> a_;
  std::vector<char> is_terminal_;
  std::vector<Vertex> pivot_;
  std::vector<Length> pivot_len_;
  std::vector<std::vector<Vertex>> ball_;
  std::vector<std::set<Vertex>> cluster_;
  std::vector<std::map<Vertex, PathHandle>> paths_;
  std::vector<Vertex> fparent_;
  std::vector<EdgeId> fparent_edge_;
};

}  // namespace vsp
