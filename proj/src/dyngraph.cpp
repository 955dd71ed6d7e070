#include "vsp/dyngraph.hpp"

#include <algorithm>
#include <cassert>

#include "json.hpp"

namespace vsp {

int tiebreak_key_compare(const PathHandle& p1, const PathHandle& p2) {
  if (p1.len != p2.len) return p1.len < p2.len ? -1 : 1;
  if (p1.hops() != p2.hops()) return p1.hops() < p2.hops() ? -1 : 1;
  // Direction-canonical key: sorted edge-id multisets compare identically for
  // a path and its reversal, so both traversal directions agree on the winner.
  std::vector<EdgeId> a = p1.edges, b = p2.edges;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) return a < b ? -1 : 1;
  if (p1.edges != p2.edges) return p1.edges < p2.edges ? -1 : 1;
  return 0;
}

int tiebreak_compare(const PathHandle& p1, const PathHandle& p2) {
  if (p1.src != p2.src || p1.dst != p2.dst) throw EndpointMismatch();
  return tiebreak_key_compare(p1, p2);
}

PathHandle path_concat(const PathHandle& a, const PathHandle& b) {
  assert(a.dst == b.src && "concat endpoints disagree");
  PathHandle r{a.src, b.dst, a.len + b.len, a.edges};
  r.edges.insert(r.edges.end(), b.edges.begin(), b.edges.end());
  return r;
}

Vertex DynGraph::add_vertex() {
  assert(time_ == 0 && "construction only at time 0");
  return insert_vertex_raw();
}

EdgeId DynGraph::add_edge(Vertex u, Vertex v, Length l) {
  assert(time_ == 0 && "construction only at time 0");
  if (!has_vertex(u)) throw UnknownVertex(u);
  if (!has_vertex(v)) throw UnknownVertex(v);
  if (l < min_len_ || (max_len_ > 0 && l > max_len_)) throw LengthOutOfRange(l);
  if (degree_cap_ > 0 && (degree(u) >= degree_cap_ || degree(v) >= degree_cap_))
    throw DegreeCapExceeded(degree(u) >= degree_cap_ ? u : v);
  return insert_edge_raw(u, v, l);
}

const std::vector<EdgeId>& DynGraph::incident(Vertex v) const {
  if (!has_vertex(v)) throw UnknownVertex(v);
  return incident_[v];
}

std::vector<Vertex> DynGraph::vertices() const {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < (Vertex)vertex_live_.size(); ++v)
    if (vertex_live_[v]) out.push_back(v);
  return out;
}

std::vector<EdgeId> DynGraph::live_edges() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < (EdgeId)edges_.size(); ++e)
    if (edges_[e].live) out.push_back(e);
  return out;
}

void DynGraph::validate_batch(const UpdateBatch& batch) const {
  // Dry-run over simulated liveness/degree state so failures abort atomically.
  std::map<EdgeId, int> edge_state;  // -1 deleted, +1 inserted this batch
  std::map<Vertex, int> deg_delta;
  std::map<Vertex, int> vtx_state;            // +1 created, -1 deleted this batch
  std::map<Vertex, char> created_by;          // 'e' = edge insert, 'v' = VertexInsert
  Vertex next_v = (Vertex)vertex_live_.size();
  auto live_now = [&](Vertex v) {
    auto it = vtx_state.find(v);
    if (it != vtx_state.end()) return it->second > 0;
    return has_vertex(v);
  };
  auto deg_now = [&](Vertex v) {
    int d = (v < (Vertex)vertex_live_.size() && vertex_live_[v]) ? (int)incident_[v].size() : 0;
    auto it = deg_delta.find(v);
    return d + (it == deg_delta.end() ? 0 : it->second);
  };
  for (const Update& op : batch.ops) {
    switch (op.kind) {
      case Update::EdgeInsert: {
        if (op.len < min_len_ || (max_len_ > 0 && op.len > max_len_)) throw LengthOutOfRange(op.len);
        if (op.u < 0 || op.v < 0) throw MalformedBatch("edge insert with negative endpoint");
        for (Vertex x : {op.u, op.v}) {
          if (live_now(x)) continue;
          // Insertions may target new vertices; they come into existence here.
          if (x < (Vertex)vertex_live_.size() && !vertex_live_[x] && !vtx_state.count(x))
            throw MalformedBatch("edge insert revives dead vertex " + std::to_string(x));
          if (vtx_state.count(x) && vtx_state[x] < 0)
            throw MalformedBatch("edge insert targets vertex deleted in this batch");
          vtx_state[x] = 1;
          created_by.emplace(x, 'e');
          if (x >= next_v) next_v = x + 1;
        }
        if (degree_cap_ > 0) {
          if (op.u == op.v) {
            if (deg_now(op.u) + 2 > degree_cap_) throw DegreeCapExceeded(op.u);
          } else {
            if (deg_now(op.u) + 1 > degree_cap_) throw DegreeCapExceeded(op.u);
            if (deg_now(op.v) + 1 > degree_cap_) throw DegreeCapExceeded(op.v);
          }
        }
        deg_delta[op.u] += 1;
        deg_delta[op.v] += 1;
        break;
      }
      case Update::EdgeDelete: {
        bool live = has_edge(op.e);
        auto it = edge_state.find(op.e);
        if (it != edge_state.end()) live = it->second > 0;
        if (!live) throw UnknownEdge(op.e);
        edge_state[op.e] = -1;
        deg_delta[edges_[op.e].u] -= 1;
        deg_delta[edges_[op.e].v] -= 1;
        break;
      }
      case Update::VertexInsert: {
        vtx_state[next_v] = 1;
        created_by.emplace(next_v, 'v');
        ++next_v;
        break;
      }
      case Update::VertexDelete: {
        if (!live_now(op.w)) throw UnknownVertex(op.w);
        if (deg_now(op.w) != 0) throw MalformedBatch("vertex delete of non-isolated vertex");
        vtx_state[op.w] = -1;
        break;
      }
    }
  }
  if (batch.split) {
    // Each brand-new vertex introduced by edge inserts must have a split
    // origin: a vertex that lost an edge to one of the new vertex's inserted
    // neighbors, and the post-batch degrees must satisfy deg(new) <= deg(origin).
    std::map<Vertex, std::vector<Vertex>> new_nbrs;  // new vertex -> inserted neighbors
    for (const Update& op : batch.ops) {
      if (op.kind != Update::EdgeInsert) continue;
      for (Vertex x : {op.u, op.v}) {
        auto it = created_by.find(x);
        if (it != created_by.end() && it->second == 'e')
          new_nbrs[x].push_back(op.u == x ? op.v : op.u);
      }
    }
    for (auto& [w, nbrs] : new_nbrs) {
      Vertex origin = kNoVertex;
      for (const Update& op : batch.ops) {
        if (op.kind != Update::EdgeDelete) continue;
        const EdgeRec& er = edges_[op.e];
        for (Vertex x : nbrs) {
          if (er.u == x || er.v == x) {
            Vertex cand = er.u == x ? er.v : er.u;
            if (cand != w && (origin == kNoVertex || deg_now(cand) > deg_now(origin))) origin = cand;
          }
        }
      }
      if (origin == kNoVertex) throw MalformedBatch("split vertex without origin");
      if (deg_now(w) > deg_now(origin))
        throw MalformedBatch("split violates deg(v_new) <= deg(v)");
    }
  }
}

DynGraph::Applied DynGraph::apply_batch(const UpdateBatch& batch) {
  validate_batch(batch);
  Applied ap;
  UpdateBatch logged = batch;
  for (Update& op : logged.ops) {
    switch (op.kind) {
      case Update::EdgeInsert: {
        ensure_vertex(op.u);
        ensure_vertex(op.v);
        op.e = insert_edge_raw(op.u, op.v, op.len);
        ap.inserted_edges.push_back(op.e);
        break;
      }
      case Update::EdgeDelete:
        delete_edge_raw(op.e);
        break;
      case Update::VertexInsert:
        op.w = insert_vertex_raw();
        ap.inserted_vertices.push_back(op.w);
        break;
      case Update::VertexDelete:
        delete_vertex_raw(op.w);
        break;
    }
  }
  ++time_;
  log_.push_back(logged);
  for (auto& fn : listeners_) fn(logged, ap);
  return ap;
}

size_t DynGraph::add_listener(Listener fn) {
  listeners_.push_back(std::move(fn));
  return listeners_.size() - 1;
}

EdgeId DynGraph::insert_edge_raw(Vertex u, Vertex v, Length l) {
  EdgeId e = (EdgeId)edges_.size();
  edges_.push_back({u, v, l, true});
  incident_[u].push_back(e);
  if (v != u) incident_[v].push_back(e);
  ++live_edge_count_;
  return e;
}

void DynGraph::delete_edge_raw(EdgeId e) {
  EdgeRec& er = edges_[e];
  er.live = false;
  auto drop = [&](Vertex x) {
    auto& inc = incident_[x];
    inc.erase(std::remove(inc.begin(), inc.end(), e), inc.end());
  };
  drop(er.u);
  if (er.v != er.u) drop(er.v);
  --live_edge_count_;
}

Vertex DynGraph::insert_vertex_raw() {
  Vertex v = (Vertex)vertex_live_.size();
  vertex_live_.push_back(1);
  incident_.emplace_back();
  ++live_vertex_count_;
  return v;
}

void DynGraph::delete_vertex_raw(Vertex v) {
  vertex_live_[v] = 0;
  --live_vertex_count_;
}

void DynGraph::ensure_vertex(Vertex v) {
  while (v >= (Vertex)vertex_live_.size()) {
    vertex_live_.push_back(0);
    incident_.emplace_back();
  }
  if (!vertex_live_[v]) {
    vertex_live_[v] = 1;
    ++live_vertex_count_;
  }
}

PathHandle DynGraph::make_path(Vertex src, const std::vector<EdgeId>& eids) const {
  PathHandle p;
  p.src = p.dst = src;
  for (EdgeId e : eids) {
    const EdgeRec& er = edge(e);
    assert((er.u == p.dst || er.v == p.dst) && "path edges must chain");
    p.dst = er.other(p.dst);
    p.len += er.len;
    p.edges.push_back(e);
  }
  return p;
}

std::string batch_to_json(int64_t t, const UpdateBatch& b) {
  nlohmann::json j;
  j["t"] = t;
  nlohmann::json ops = nlohmann::json::array();
  for (const Update& op : b.ops) {
    nlohmann::json o;
    switch (op.kind) {
      case Update::EdgeInsert:
        o["op"] = "ei";
        o["u"] = op.u;
        o["v"] = op.v;
        o["l"] = op.len;
        break;
      case Update::EdgeDelete:
        o["op"] = "ed";
        o["e"] = op.e;
        break;
      case Update::VertexInsert:
        o["op"] = "vi";
        break;
      case Update::VertexDelete:
        o["op"] = "vd";
        o["v"] = op.w;
        break;
    }
    ops.push_back(o);
  }
  j["ops"] = ops;
  j["split"] = b.split;
  return j.dump();
}

UpdateBatch batch_from_json(const std::string& line, int64_t* t_out) {
  nlohmann::json j = nlohmann::json::parse(line);
  if (t_out) *t_out = j.value("t", 0);
  UpdateBatch b;
  b.split = j.value("split", false);
  for (const auto& o : j.at("ops")) {
    std::string op = o.at("op");
    if (op == "ei")
      b.ops.push_back(Update::edge_insert(o.at("u"), o.at("v"), o.at("l")));
    else if (op == "ed")
      b.ops.push_back(Update::edge_delete(o.at("e")));
    else if (op == "vi")
      b.ops.push_back(Update::vertex_insert());
    else if (op == "vd")
      b.ops.push_back(Update::vertex_delete(o.at("v")));
    else
      throw MalformedBatch("unknown op " + op);
  }
  return b;
}

}  // namespace vsp
