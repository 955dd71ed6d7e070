#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "vsp/dyngraph.hpp"
#include "vsp/treekit.hpp"

namespace vsp {

// Forest edges cut and vertices turned into roots by one update.
struct LssfDelta {
  std::vector<EdgeId> cut_edges;
  std::vector<Vertex> new_roots;
  bool empty() const { return cut_edges.empty() && new_roots.empty(); }
  void append(LssfDelta&& o);
};

// Rooted spanning forest F of the host graph with frozen per-edge stretch
// overestimates. The stretch of a live edge e = (u,v) is 1 + detour/l(e),
// where the detour is the forest path length F[u,v] when u and v share a
// root and the sum of both root paths otherwise. After construction the
// edge set of F only shrinks and the root set only grows; every public
// update ends with a repair loop that cuts forest edges until
// str(e) <= str_over(e) holds for every live edge.
class StretchForest {
 public:
  // `w` are the build weights entering gamma_meas; absent ids count as 0.
  // Every seed root ends up a root of the built forest.
  StretchForest(const DynGraph& g, const std::map<EdgeId, int64_t>& w, int64_t k,
                const std::vector<Vertex>& seed_roots = {});

  // Host edge e was just inserted; call after the host applied it. The new
  // edge gets str_over = 1, fixed forever.
  LssfDelta insert_edge(EdgeId e);
  // Host edge e is about to be deleted; call while e is still live.
  LssfDelta delete_edge(EdgeId e);
  // Remove e from F only; e stays live in the host graph.
  LssfDelta delete_edge_from_forest(EdgeId e);
  // Cut every forest edge at v, leaving v a singleton root, then repair.
  LssfDelta make_root(Vertex v);
  // Host vertex v was just created (isolated); it joins F as a root.
  void add_vertex(Vertex v);
  // Host vertex v is going away; it must hold no forest edges.
  void remove_vertex(Vertex v);

  bool in_forest(EdgeId e) const { return fedges_.count(e) != 0; }
  // id -> (child endpoint, parent endpoint).
  const std::map<EdgeId, std::pair<Vertex, Vertex>>& forest_edges() const { return fedges_; }
  const std::set<Vertex>& roots() const { return roots_; }
  Vertex root_of(Vertex v);
  Length root_path_len(Vertex v);
  // Exact forest detour of a live edge (0 for self-loops).
  Length detour_len(EdgeId e);
  int64_t str_over(EdgeId e) const;
  const std::map<EdgeId, int64_t>& str_over_all() const { return str_; }
  int64_t k() const { return k_; }
  int64_t degree_bound() const { return delta_bound_; }
  // Sum of w(e)*str_over(e) over build edges as an exact fraction of the
  // total build weight; (0, 1) when the weights vanish.
  std::pair<int64_t, int64_t> gamma_meas() const { return {gamma_num_, gamma_den_}; }

  int64_t last_recourse() const { return last_recourse_; }
  int64_t max_recourse() const { return max_recourse_; }
  int64_t total_cuts() const { return total_cuts_; }
  int64_t recourse_budget() const { return budget_; }
  int64_t budget_breaches() const { return breaches_; }

  void self_check();

 private:
  void cut_forest_edge(EdgeId e, LssfDelta& d);
  void make_root_impl(Vertex v, LssfDelta& d);
  void repair(LssfDelta& d);
  void finish_op();
  int64_t str_or_one(EdgeId e) const;

  const DynGraph& g_;
  DynForest df_;
  int64_t k_;
  std::map<EdgeId, int64_t> w_;
  std::map<EdgeId, int64_t> str_;
  std::map<EdgeId, std::pair<Vertex, Vertex>> fedges_;
  std::vector<std::set<EdgeId>> finc_;
  std::set<Vertex> roots_;
  int64_t delta_bound_ = 1;
  int64_t gamma_num_ = 0, gamma_den_ = 1;
  int64_t last_recourse_ = 0, max_recourse_ = 0, total_cuts_ = 0;
  int64_t budget_ = 0, breaches_ = 0;
};

}  // namespace vsp
