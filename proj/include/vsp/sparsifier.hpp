#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "vsp/coregraph.hpp"
#include "vsp/dyngraph.hpp"
#include "vsp/lssf.hpp"
#include "vsp/paths.hpp"
#include "vsp/pivots.hpp"
#include "vsp/spanner.hpp"

namespace vsp {

struct NotARoot : std::runtime_error {
  NotARoot() : std::runtime_error("vertex does not root a tree at that level") {}
};
struct BudgetExceeded : std::runtime_error {
  BudgetExceeded()
      : std::runtime_error("vertex congestion exceeds the configured copy budget") {}
};
struct DegreeLoopStuck : std::runtime_error {
  DegreeLoopStuck()
      : std::runtime_error(
            "degree-reduction potential failed to decrease; raise the degree constant") {}
};

// Caller-side description of a flat hierarchical forest living on H: nodes
// image to H vertices, edges image to single H edges, and terminals of the
// forest pick one node each. Node indices must be stable across updates.
struct FlatForest {
  std::vector<Vertex> node_image;                     // forest node -> V(H)
  std::vector<std::tuple<int, int, EdgeId>> edges;    // (node a, node b, H edge)
  std::map<Vertex, int> terminal_node;                // A_F member (H vertex) -> node
};

// The mapped-down forest over the host graph, maintained by the sparsifier:
// vertices never die (images stay constant once assigned), edges carry host
// lengths, and every edge embeds into a single host edge.
struct HierForest {
  DynGraph f{1};
  std::map<Vertex, Vertex> a_to_f;     // A_F member (H vertex) -> F' vertex
  std::map<Vertex, Vertex> f_to_host;  // F' vertex -> host vertex
  std::map<EdgeId, EdgeId> embed;      // F' edge -> host edge
  std::map<EdgeId, int64_t> econg;     // host edge -> multiplicity in embed
  int64_t last_changes = 0, max_changes = 0;
};

struct SparsifierMetrics {
  int64_t forest_deltas = 0;  // forest cuts + new roots, summed over levels
  int64_t gtilde_batch = 0;
  int64_t htilde_batch = 0;
  int64_t u_h_size = 0;
  int64_t deg_max = 0;     // max per-level spanner degree after the update
  int64_t reduce_cut = 0;  // forest edges removed by the degree step
};

// One-step vertex sparsifier: pivots/balls/paths over the host pick the
// terminal set, iteratively embedded low-stretch forests encode all relevant
// paths, their glued core graphs form G-tilde, a greedy spanner thins it to
// H-tilde, and contracting the zero-links yields H whose vertices identify
// with host vertices. Updates flow through every layer; each unit update
// ends with one degree-reduction step on the currently heaviest node.
class Sparsifier {
 public:
  Sparsifier(DynGraph& g, int64_t k, int64_t levels_cfg, int64_t delta,
             int64_t gamma_deg_constr = 8, int64_t spanner_budget = 32);

  // Process one host batch op-by-op; applies it to the host graph itself.
  // Returns the concatenated update batch turning H^(t-1) into H^(t).
  UpdateBatch maintain(const UpdateBatch& b);

  // One degree-reduction step: Frederickson-split the tree rooted under
  // `node` (which lives at `level`) so no piece keeps more than z * Delta
  // incident sparsifier edges. Returns the forest edges removed; journals
  // the induced H updates as their own entry.
  std::vector<EdgeId> reduce_degree(Vertex node, int level, int64_t z);

  const DynGraph& graph() const { return g_; }
  const DynGraph& h() const { return h_; }
  const DynGraph& h0() const { return h0_; }
  const DynGraph& gtilde() const { return view_.tilde(); }
  const DynGraph& htilde() const { return spanner_.spanner(); }
  const PivotState& pivots() const { return ps_; }
  const CoreGraphView& core() const { return view_; }
  const SpannerState& spanner_state() const { return spanner_; }
  const std::vector<StretchForest>& forests() const { return forests_; }
  const std::set<Vertex>& terminals() const { return ps_.terminals(); }

  int64_t lambda() const { return (int64_t)forests_.size(); }
  int64_t k() const { return k_; }
  int64_t levels_cfg() const { return kk_; }
  int64_t delta_cfg() const { return delta_; }
  int64_t gamma_deg_constr() const { return gamma_deg_; }

  // H vertices are identified with host vertices.
  Vertex h_vertex_of(Vertex host_v) const;  // kNoVertex when absent
  Vertex host_of(Vertex h_v) const;         // throws UnknownVertex

  // Host path realizing an H edge, no longer than the edge.
  PathHandle decode_edge(EdgeId h_edge) const;

  // Per-level spanner degree bookkeeping (level is the node's own level).
  int64_t degree_of(Vertex gtilde_node) const;
  std::pair<Vertex, int> max_degree_pair() const;  // (kNoVertex, -1) if none
  int64_t potential() const;

  const std::vector<UpdateBatch>& journal() const { return journal_; }
  const SparsifierMetrics& last_metrics() const { return last_; }
  int64_t updates_processed() const { return q_; }
  int64_t init_degree_iterations() const { return init_iters_; }
  int64_t deg_max_observed() const { return deg_max_obs_; }
  int64_t u_h_max() const { return u_h_max_; }
  int64_t htilde_batch_max() const { return ht_max_; }

  // Map a flat hierarchical forest on H down to the host graph; the result
  // is refreshed after every maintain() and after hier_update(). Copies per
  // H vertex are capped at gamma_cong_rep * max(deg_H); exceeding the cap
  // throws BudgetExceeded.
  size_t register_hier_forest(const FlatForest& f, int64_t gamma_cong_rep);
  void hier_update(size_t handle, const FlatForest& f);
  void unregister_hier_forest(size_t handle);
  const HierForest& hier(size_t handle) const;

  void self_check();

 private:
  struct HEdgeInfo {
    EdgeId spanner_e = kNoEdge;
    EdgeId gtilde_e = kNoEdge;
  };
  struct RegisteredHier {
    FlatForest spec;
    int64_t budget = 1;
    std::map<int, int64_t> copy_of_node;  // forest node -> copy index j
    std::map<std::pair<Vertex, int64_t>, Vertex> root_vid;
    std::map<std::tuple<Vertex, int64_t, Vertex, int>, Vertex> member_vid;
    // (host v, j, level, forest edge) for tree edges; (-1, F-edge, -1, -1)
    // style is avoided: projected edges key on the F-edge index.
    std::map<std::tuple<Vertex, int64_t, int, EdgeId>, EdgeId> tree_eid;
    std::map<int, EdgeId> proj_eid;
    HierForest out;
  };

  void validate_unit(const Update& op) const;
  UpdateBatch maintain_one(const Update& op);
  // Drive one bundle of forest deltas + host changes through the core graph,
  // the spanner, and the H emulation; appends the H ops.
  void push_down(const std::vector<LssfDelta>& deltas, const HostDelta& hd,
                 std::vector<Update>* u_h, SparsifierMetrics* m);
  void emulate_to_h(const UpdateBatch& ht, const std::vector<EdgeId>& gids,
                    std::vector<Update>* u_h);
  std::vector<EdgeId> reduce_degree_impl(Vertex node, int level, int64_t z,
                                         std::vector<Update>* u_h, SparsifierMetrics* m);
  void root_new_terminals(const PivotDelta& pd, std::vector<LssfDelta>* deltas);
  std::map<Vertex, int64_t> level_degrees() const;
  void build_h_initial();
  void refresh_hier(RegisteredHier& r);

  DynGraph& g_;
  int64_t k_, kk_, delta_, gamma_deg_;
  PivotState ps_;
  std::vector<StretchForest> forests_;
  CoreGraphView view_;
  SpannerState spanner_;

  DynGraph h_{1};
  DynGraph h0_{1};
  std::map<Vertex, Vertex> gnode_host_;      // G-tilde node -> host vertex
  std::map<Vertex, int64_t> copies_cnt_;     // host vertex -> live copies
  std::map<Vertex, Vertex> hvert_of_host_, host_of_hvert_;
  std::map<EdgeId, EdgeId> hedge_of_spanner_;
  std::map<EdgeId, HEdgeInfo> hinfo_;        // H edge -> provenance
  std::set<EdgeId> link_members_;            // spanner edges copying zero-links

  std::vector<UpdateBatch> journal_;
  std::map<size_t, RegisteredHier> hier_;
  size_t next_hier_ = 0;
  SparsifierMetrics last_;
  int64_t q_ = 0, init_iters_ = 0, deg_max_obs_ = 0, u_h_max_ = 0, ht_max_ = 0;
};

}  // namespace vsp
