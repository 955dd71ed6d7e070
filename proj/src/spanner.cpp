#include "vsp/spanner.hpp"

#include <algorithm>
#include <cassert>

#include "vsp/spt.hpp"

namespace vsp {

int64_t SpannerState::bucket_of(Length l) {
  assert(l >= 1);
  int64_t b = 0;
  while (((Length)1 << (b + 1)) <= l) ++b;
  return b;
}

bool SpannerState::canon_less(Length la, EdgeId ea, Length lb, EdgeId eb) {
  int64_t ba = la == 0 ? -1 : bucket_of(la);
  int64_t bb = lb == 0 ? -1 : bucket_of(lb);
  if (ba != bb) return ba < bb;
  return ea < eb;
}

bool SpannerState::cert_search(const DynGraph& g, const std::map<EdgeId, EdgeId>& to_host,
                               Vertex u, Vertex v, Length l, std::vector<EdgeId>* out) const {
  Length budget = t_ * l;
  SPTree t = tiebreak_sssp(g, {.sources = {u}, .max_dist = budget});
  if (!t.reached(v) || t.dist[v] > budget) return false;
  PathHandle p = t.path_to(g, v);
  out->clear();
  for (EdgeId se : p.edges) out->push_back(to_host.at(se));
  return true;
}

void SpannerState::register_cert(EdgeId host_e, std::vector<EdgeId> path) {
  for (EdgeId m : path) cert_uses_[m].insert(host_e);
  certs_[host_e] = std::move(path);
}

void SpannerState::drop_cert(EdgeId host_e) {
  auto it = certs_.find(host_e);
  if (it == certs_.end()) return;
  for (EdgeId m : it->second) {
    auto ut = cert_uses_.find(m);
    if (ut == cert_uses_.end()) continue;
    ut->second.erase(host_e);
    if (ut->second.empty()) cert_uses_.erase(ut);
  }
  certs_.erase(it);
}

SpannerState::SpannerState(const DynGraph& host, int64_t t_cfg, int64_t rebuild_budget)
    : host_(host), t_(t_cfg), budget_(rebuild_budget) {
  assert(t_ >= 1 && budget_ >= 1);
  assert((int64_t)host_.num_vertices() == (int64_t)host_.vertex_bound() &&
         "spanner initialization expects a freshly built host");
  for (Vertex v = 0; v < host_.vertex_bound(); ++v) h_.add_vertex();
  std::vector<EdgeId> order = host_.live_edges();
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return canon_less(host_.edge(a).len, a, host_.edge(b).len, b);
  });
  for (EdgeId e : order) {
    const EdgeRec& er = host_.edge(e);
    if (er.u == er.v) {
      register_cert(e, {});
      continue;
    }
    std::vector<EdgeId> cert;
    if (er.len > 0 && cert_search(h_, s2h_, er.u, er.v, er.len, &cert)) {
      register_cert(e, std::move(cert));
    } else {
      EdgeId se = h_.add_edge(er.u, er.v, er.len);
      h2s_[e] = se;
      s2h_[se] = e;
    }
  }
}

EdgeId SpannerState::spanner_edge(EdgeId host_e) const {
  auto it = h2s_.find(host_e);
  return it == h2s_.end() ? kNoEdge : it->second;
}

EdgeId SpannerState::host_edge(EdgeId spanner_e) const {
  auto it = s2h_.find(spanner_e);
  if (it == s2h_.end()) throw UnknownEdge(spanner_e);
  return it->second;
}

const std::vector<EdgeId>& SpannerState::certificate(EdgeId host_e) const {
  auto it = certs_.find(host_e);
  if (it == certs_.end()) throw UnknownEdge(host_e);
  return it->second;
}

void SpannerState::accept_now(EdgeId host_e, std::vector<Update>* ops_out) {
  const EdgeRec& er = host_.edge(host_e);
  UpdateBatch b;
  b.ops.push_back(Update::edge_insert(er.u, er.v, er.len));
  auto ap = h_.apply_batch(b);
  h2s_[host_e] = ap.inserted_edges[0];
  s2h_[ap.inserted_edges[0]] = host_e;
  ops_out->push_back(h_.log().back().ops[0]);
  last_gids_.push_back(host_e);
}

void SpannerState::retest(std::set<EdgeId> affected, std::vector<Update>* ops_out) {
  std::vector<EdgeId> order(affected.begin(), affected.end());
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return canon_less(host_.edge(a).len, a, host_.edge(b).len, b);
  });
  for (EdgeId he : order) {
    if (!host_.has_edge(he) || !certs_.count(he)) continue;  // died or re-homed
    drop_cert(he);
    const EdgeRec& er = host_.edge(he);
    std::vector<EdgeId> cert;
    if (cert_search(h_, s2h_, er.u, er.v, er.len, &cert))
      register_cert(he, std::move(cert));
    else
      accept_now(he, ops_out);
  }
}

void SpannerState::full_rebuild(std::vector<Update>* ops_out) {
  ++rebuilds_;
  dels_ = 0;
  certs_.clear();
  cert_uses_.clear();
  DynGraph scratch{0};
  for (Vertex v = 0; v < host_.vertex_bound(); ++v) scratch.add_vertex();
  std::map<EdgeId, EdgeId> acc, sc2h;
  std::vector<std::pair<EdgeId, std::vector<EdgeId>>> new_certs;
  std::vector<EdgeId> order = host_.live_edges();
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return canon_less(host_.edge(a).len, a, host_.edge(b).len, b);
  });
  for (EdgeId e : order) {
    const EdgeRec& er = host_.edge(e);
    if (er.u == er.v) {
      new_certs.push_back({e, {}});
      continue;
    }
    std::vector<EdgeId> cert;
    if (er.len > 0 && cert_search(scratch, sc2h, er.u, er.v, er.len, &cert)) {
      new_certs.push_back({e, std::move(cert)});
    } else {
      EdgeId sid = scratch.add_edge(er.u, er.v, er.len);
      acc[e] = sid;
      sc2h[sid] = e;
    }
  }
  UpdateBatch b;
  std::vector<EdgeId> plan, removed;
  for (const auto& [he, se] : h2s_)
    if (!acc.count(he)) {
      b.ops.push_back(Update::edge_delete(se));
      removed.push_back(he);
    }
  for (const auto& [he, sid] : acc)
    if (!h2s_.count(he)) {
      const EdgeRec& er = host_.edge(he);
      b.ops.push_back(Update::edge_insert(er.u, er.v, er.len));
      plan.push_back(he);
    }
  if (!b.ops.empty()) {
    auto ap = h_.apply_batch(b);
    for (EdgeId he : removed) {
      s2h_.erase(h2s_.at(he));
      h2s_.erase(he);
    }
    for (size_t j = 0; j < plan.size(); ++j) {
      h2s_[plan[j]] = ap.inserted_edges[j];
      s2h_[ap.inserted_edges[j]] = plan[j];
    }
    const UpdateBatch& logged = h_.log().back();
    ops_out->insert(ops_out->end(), logged.ops.begin(), logged.ops.end());
    last_gids_.insert(last_gids_.end(), removed.begin(), removed.end());
    last_gids_.insert(last_gids_.end(), plan.begin(), plan.end());
  }
  for (auto& [e, cert] : new_certs) register_cert(e, std::move(cert));
}

UpdateBatch SpannerState::apply_update(const UpdateBatch& host_batch) {
  std::vector<Update> out_ops;
  last_gids_.clear();
  std::set<EdgeId> batch_deleted;
  for (const Update& op : host_batch.ops)
    if (op.kind == Update::EdgeDelete) batch_deleted.insert(op.e);
  UpdateBatch fwd;
  fwd.split = host_batch.split;
  std::vector<EdgeId> fwd_gids;
  std::vector<EdgeId> ins_plan;
  std::vector<EdgeId> dead_members;
  for (const Update& op : host_batch.ops) {
    switch (op.kind) {
      case Update::EdgeInsert:
        assert(op.e != kNoEdge && "host batches must carry logged ids");
        if (batch_deleted.count(op.e)) break;  // net no-op within the batch
        fwd.ops.push_back(Update::edge_insert(op.u, op.v, op.len));
        fwd_gids.push_back(op.e);
        ins_plan.push_back(op.e);
        break;
      case Update::EdgeDelete: {
        auto it = h2s_.find(op.e);
        if (it != h2s_.end()) {
          fwd.ops.push_back(Update::edge_delete(it->second));
          fwd_gids.push_back(op.e);
          dead_members.push_back(op.e);
          ++dels_;
        } else {
          drop_cert(op.e);
        }
        break;
      }
      case Update::VertexInsert:
        fwd.ops.push_back(Update::vertex_insert());
        fwd_gids.push_back(kNoEdge);
        break;
      case Update::VertexDelete:
        fwd.ops.push_back(Update::vertex_delete(op.w));
        fwd_gids.push_back(kNoEdge);
        break;
    }
  }
  if (!fwd.ops.empty()) {
    auto ap = h_.apply_batch(fwd);
    for (EdgeId he : dead_members) {
      s2h_.erase(h2s_.at(he));
      h2s_.erase(he);
    }
    assert(ap.inserted_edges.size() == ins_plan.size());
    for (size_t j = 0; j < ins_plan.size(); ++j) {
      h2s_[ins_plan[j]] = ap.inserted_edges[j];
      s2h_[ap.inserted_edges[j]] = ins_plan[j];
    }
    const UpdateBatch& logged = h_.log().back();
    out_ops.insert(out_ops.end(), logged.ops.begin(), logged.ops.end());
    last_gids_.insert(last_gids_.end(), fwd_gids.begin(), fwd_gids.end());
  }
  std::set<EdgeId> affected;
  for (EdgeId he : dead_members) {
    auto it = cert_uses_.find(he);
    if (it == cert_uses_.end()) continue;
    affected.insert(it->second.begin(), it->second.end());
    cert_uses_.erase(it);
  }
  retest(std::move(affected), &out_ops);
  if (dels_ >= budget_) full_rebuild(&out_ops);
  assert(last_gids_.size() == out_ops.size());
  last_ops_ = (int64_t)out_ops.size();
  max_ops_ = std::max(max_ops_, last_ops_);
  UpdateBatch ret;
  ret.split = host_batch.split;
  ret.ops = std::move(out_ops);
  return ret;
}

void SpannerState::self_check() const {
  assert(h_.vertex_bound() == host_.vertex_bound() && "vertex ids stay in lockstep");
  for (Vertex v = 0; v < host_.vertex_bound(); ++v)
    assert(h_.has_vertex(v) == host_.has_vertex(v));
  assert(h2s_.size() == s2h_.size());
  assert((int64_t)h2s_.size() == h_.num_edges());
  for (const auto& [he, se] : h2s_) {
    assert(s2h_.at(se) == he);
    assert(host_.has_edge(he) && "no dead host edge stays in the spanner");
    const EdgeRec& her = host_.edge(he);
    const EdgeRec& ser = h_.edge(se);
    assert(ser.live && ser.len == her.len);
    assert((ser.u == her.u && ser.v == her.v) || (ser.u == her.v && ser.v == her.u));
  }
  for (EdgeId e : host_.live_edges()) {
    if (h2s_.count(e)) {
      assert(!certs_.count(e));
      continue;
    }
    auto it = certs_.find(e);
    assert(it != certs_.end() && "every live host edge is in the spanner or certified");
    const EdgeRec& er = host_.edge(e);
    Length total = 0;
    for (EdgeId m : it->second) {
      assert(h2s_.count(m) && "certificates reference spanner members");
      total += host_.edge(m).len;
    }
    assert(total <= t_ * er.len && "certificates stay within the stretch budget");
    PathHandle p = host_.make_path(er.u, it->second);
    assert(p.dst == er.v && p.len == total);
  }
  for (const auto& [m, uses] : cert_uses_) {
    assert(h2s_.count(m) && !uses.empty());
    for (EdgeId e : uses) {
      const auto& path = certs_.at(e);
      assert(std::find(path.begin(), path.end(), m) != path.end());
    }
  }
  for (const auto& [e, path] : certs_)
    for (EdgeId m : path) assert(cert_uses_.at(m).count(e));
}

}  // namespace vsp
