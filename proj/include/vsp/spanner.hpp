#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "vsp/dyngraph.hpp"

namespace vsp {

// Deterministic greedy spanner over a dynamic host graph. Edges are scanned
// in (length bucket, id) order; an edge joins the spanner unless the current
// spanner already connects its endpoints within t times its length, in which
// case that witness path is kept as a certificate. Certificates reference
// host edge ids of spanner members; when a member dies, every rejection it
// certified is re-tested in canonical order. Host insertions always enter
// the spanner, zero-length edges are kept unconditionally, and self-loops
// are rejected with an empty certificate. After `rebuild_budget` spanner
// deletions the whole construction is recomputed from scratch.
class SpannerState {
 public:
  SpannerState(const DynGraph& host, int64_t t_cfg = 3, int64_t rebuild_budget = 32);

  // Forward one host batch (already applied to the host, ids filled as
  // logged) and repair coverage; returns every op applied to the spanner.
  UpdateBatch apply_update(const UpdateBatch& host_batch);

  const DynGraph& spanner() const { return h_; }
  int64_t stretch_target() const { return t_; }
  bool in_spanner(EdgeId host_e) const { return h2s_.count(host_e) != 0; }
  EdgeId spanner_edge(EdgeId host_e) const;
  EdgeId host_edge(EdgeId spanner_e) const;
  // Certificate path (host edge ids, all spanner members) for a rejected
  // live host edge; throws UnknownEdge for members and unknown ids.
  const std::vector<EdgeId>& certificate(EdgeId host_e) const;

  int64_t rebuilds() const { return rebuilds_; }
  int64_t deletions_since_rebuild() const { return dels_; }
  int64_t last_output_ops() const { return last_ops_; }
  int64_t max_output_ops() const { return max_ops_; }
  // Host edge id behind each op of the last returned batch, aligned by
  // index (kNoEdge for vertex ops). Valid even for edges that died within
  // the batch, unlike host_edge().
  const std::vector<EdgeId>& last_host_ids() const { return last_gids_; }

  void self_check() const;

 private:
  static int64_t bucket_of(Length l);
  // Canonical scan order: zero-length first, then by (bucket, id).
  static bool canon_less(Length la, EdgeId ea, Length lb, EdgeId eb);
  // Try to certify (u,v) within budget t*l in graph `g` (a spanner being
  // built or maintained); `to_host` translates its edge ids to host ids.
  bool cert_search(const DynGraph& g, const std::map<EdgeId, EdgeId>& to_host, Vertex u,
                   Vertex v, Length l, std::vector<EdgeId>* out) const;
  void register_cert(EdgeId host_e, std::vector<EdgeId> path);
  void drop_cert(EdgeId host_e);
  void accept_now(EdgeId host_e, std::vector<Update>* ops_out);
  void retest(std::set<EdgeId> affected, std::vector<Update>* ops_out);
  void full_rebuild(std::vector<Update>* ops_out);

  const DynGraph& host_;
  DynGraph h_{0};
  std::map<EdgeId, EdgeId> h2s_, s2h_;
  std::map<EdgeId, std::vector<EdgeId>> certs_;
  std::map<EdgeId, std::set<EdgeId>> cert_uses_;  // member host edge -> certified rejects
  std::vector<EdgeId> last_gids_;
  int64_t t_, budget_;
  int64_t dels_ = 0, rebuilds_ = 0, last_ops_ = 0, max_ops_ = 0;
};

}  // namespace vsp
