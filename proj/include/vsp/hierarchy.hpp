#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vsp/dyngraph.hpp"
#include "vsp/sparsifier.hpp"

namespace vsp {

struct DiameterSetTooSmall : std::runtime_error {
  DiameterSetTooSmall()
      : std::runtime_error("witness queries need at least two marked vertices") {}
};
struct Disconnected : std::runtime_error {
  Disconnected() : std::runtime_error("operation requires a connected graph") {}
};

struct HierarchyConfig {
  int levels = 2;          // depth of the level stack (>= 0)
  int64_t k = 0;           // per-level ball size; 0 derives ceil(m^(1/levels))
  int64_t levels_cfg = 8;  // embedding round cap forwarded to each sparsifier
  int64_t gamma_deg_constr = 8;
  int64_t spanner_budget = 32;
  // Rebuild period per level i (levels i..top are rebuilt from scratch every
  // rebuild_every[i] updates). Empty derives round(m^(1-(i+1)/levels)).
  std::vector<int64_t> rebuild_every;
  int64_t gamma_cong_rep = 64;  // copy budget factor for pushed-down forests
};

// Low-depth companion of the glued tree: one node per (level, vertex) class,
// edges are the raw per-level forest edges with level lengths.
struct DepthTree {
  DynGraph t{1};
  std::map<Vertex, Vertex> host_to_t;              // V(G) -> tree node
  std::map<Vertex, Vertex> t_to_f;                 // V(T) -> glued-tree node
  std::map<Vertex, std::pair<int, Vertex>> label;  // node -> (level, level vertex) rep
};

// Level stack G = G_0, G_1, ..., G_levels where each G_{i+1} is the vertex
// sparsifier of G_i, plus an exact all-pairs table on the top level. Distance
// queries walk lazy pivot chains; diameter witnesses come from a weighted
// chain tree over the marked set; glued per-level pivot forests yield a
// low-diameter spanning tree and its low-depth companion.
class Hierarchy {
 public:
  explicit Hierarchy(DynGraph& g, HierarchyConfig cfg = {});

  // Applies `b` to the host graph and forwards the induced batches through
  // every level, rebuilding suffixes of the stack on their schedules. The
  // top-level table and the cached witness pair are refreshed before return.
  void apply(const UpdateBatch& b);

  // Rebuild levels `level`+1 .. top from scratch right now (no-op on the
  // level stack when level == levels); query structures are refreshed.
  void force_rebuild(int level);

  // Estimate within [dist, sigma * dist] for the measured chain factor;
  // nullopt when u and v are disconnected.
  std::optional<Length> query_dist(Vertex u, Vertex v) const;
  // A real host path no longer than the query_dist estimate.
  std::optional<PathHandle> query_path(Vertex u, Vertex v) const;

  void add_diameter_vertex(Vertex x);
  void remove_diameter_vertex(Vertex x);
  // Cached pair (x, y) of marked vertices with dist(x, y) a bounded fraction
  // of the marked-set diameter; recomputed after every update or mark change.
  std::pair<Vertex, Vertex> query_diameter_witness() const;
  const std::set<Vertex>& diameter_set() const { return marked_; }
  // Marks temporarily cleared (and restored) by the last witness recompute.
  const std::vector<Vertex>& last_witness_journal() const { return wit_journal_; }

  // Spanning tree of the host graph glued from the pushed-down per-level
  // pivot forests; a_to_f covers all of V(G). Throws Disconnected.
  const HierForest& low_diam_tree();
  // Direct sum of the raw per-level forests, merged at terminal images.
  const DepthTree& low_depth_tree();

  int levels() const { return lam_; }
  int64_t k() const { return k_; }
  const DynGraph& level_graph(int i) const;
  const Sparsifier& level_sparsifier(int i) const;  // i in [0, levels)
  const std::vector<int64_t>& rebuild_schedule() const { return period_; }
  // Bumped whenever level i is recreated from scratch; level 0 stays at 0.
  int64_t level_generation(int i) const { return gen_.at(i); }
  // Ops delivered to each level during the last apply(), index 0 = input.
  const std::vector<UpdateBatch>& last_level_batches() const { return last_batches_; }
  int last_rebuild_level() const { return last_rebuild_; }
  int64_t updates_processed() const { return t_; }
  std::optional<Length> top_dist(Vertex x, Vertex y) const;
  void self_check();

 private:
  struct Part {  // one level's forest, pushed down to the host graph
    std::vector<std::tuple<Vertex, Vertex, EdgeId, Length>> raw;  // child, parent, level edge, level len
    HierForest hf;                     // empty for level 0 (forest already lives in G)
    std::map<Vertex, Vertex> tmap;     // level vertex -> node of its pushed forest
  };

  DynGraph& level(int i) { return i == 0 ? g_ : *owned_[i]; }
  int64_t delta_of(const DynGraph& g) const;
  void rebuild_from(int i);
  void refresh_queries();
  std::pair<Vertex, Vertex> run_witness();
  PathHandle expand(int lvl, PathHandle p) const;
  Part build_part(int i);
  void refresh_trees();

  DynGraph& g_;
  HierarchyConfig cfg_;
  int lam_;
  int64_t k_ = 1;
  std::vector<int64_t> period_;
  std::vector<std::unique_ptr<DynGraph>> owned_;   // [0] unused
  std::vector<std::unique_ptr<Sparsifier>> sp_;    // size lam_
  std::vector<int64_t> gen_;
  int64_t t_ = 0;
  std::vector<UpdateBatch> last_batches_;
  int last_rebuild_ = -1;

  std::map<std::pair<Vertex, Vertex>, Length> top_tab_;
  std::set<Vertex> marked_;
  std::optional<std::pair<Vertex, Vertex>> wit_;
  std::vector<Vertex> wit_journal_;

  HierForest ldt_;
  DepthTree ddt_;
  int64_t tree_epoch_ = -1;
};

struct TerminalSparsifierConfig {
  HierarchyConfig hier;
  Length scale = 4;  // host length multiplier; unit gadget edges stay negligible
};

// Online-terminal wrapper: runs a hierarchy on a scaled copy of the host
// graph, pins each terminal into every level with a transient unit-length
// pendant gadget, and serves the level-ell graph (ell shrinking as terminals
// accumulate) as the sparsifier H through a stable content mirror.
class TerminalSparsifier {
 public:
  explicit TerminalSparsifier(const DynGraph& g, TerminalSparsifierConfig cfg = {});

  // Host updates in host ids; lengths are scaled internally. Returns the
  // batch turning the previous mirror H into the new one.
  UpdateBatch apply(const UpdateBatch& b);
  UpdateBatch add_terminal(Vertex a);
  UpdateBatch remove_terminal(Vertex a);

  // Mirror of the level-ell graph; lengths are in scaled units.
  const DynGraph& current_h() const { return hout_; }
  Vertex h_vertex_of(Vertex host) const;  // kNoVertex when absent from H
  const std::set<Vertex>& terminals() const { return a_; }
  int level() const { return ell_; }
  Length scale() const { return scale_; }
  const Hierarchy& hierarchy() const { return *hier_; }
  const std::vector<UpdateBatch>& journal() const { return journal_; }
  int64_t journal_ops() const { return journal_ops_; }
  int64_t updates_processed() const { return t_; }
  void self_check();

 private:
  void gadget(Vertex host_a);
  void replay_all();
  void after_user_op();
  double dec_threshold(int ell) const;
  int64_t inc_threshold(int ell) const;
  UpdateBatch refresh_mirror();

  TerminalSparsifierConfig cfg_;
  Length scale_;
  int64_t m0_;
  std::vector<int64_t> period_;
  DynGraph ghat_{1};
  std::map<Vertex, Vertex> vmap_;  // host vertex -> scaled-copy vertex
  std::map<EdgeId, EdgeId> emap_;  // host edge -> scaled-copy edge
  Vertex host_vbound_;
  EdgeId host_ebound_;
  std::unique_ptr<Hierarchy> hier_;
  int ell_;
  std::set<Vertex> a_;

  DynGraph hout_{1};
  std::map<Vertex, Vertex> mv_;  // scaled-copy base vertex -> mirror vertex
  std::vector<UpdateBatch> journal_;
  int64_t journal_ops_ = 0;
  int64_t t_ = 0;
};

}  // namespace vsp
