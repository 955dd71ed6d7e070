#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsp {

using Vertex = int32_t;
using EdgeId = int64_t;
using Length = int64_t;

constexpr Vertex kNoVertex = -1;
constexpr EdgeId kNoEdge = -1;

// Errors named after the batch-application failure modes. Each aborts the
// whole batch atomically.
struct UnknownEdge : std::runtime_error {
  explicit UnknownEdge(EdgeId e) : std::runtime_error("unknown edge " + std::to_string(e)) {}
};
struct UnknownVertex : std::runtime_error {
  explicit UnknownVertex(Vertex v) : std::runtime_error("unknown vertex " + std::to_string(v)) {}
};
struct DegreeCapExceeded : std::runtime_error {
  explicit DegreeCapExceeded(Vertex v) : std::runtime_error("degree cap exceeded at vertex " + std::to_string(v)) {}
};
struct LengthOutOfRange : std::runtime_error {
  explicit LengthOutOfRange(Length l) : std::runtime_error("length out of range: " + std::to_string(l)) {}
};
struct MalformedBatch : std::runtime_error {
  explicit MalformedBatch(const std::string& why) : std::runtime_error("malformed batch: " + why) {}
};
struct EndpointMismatch : std::runtime_error {
  EndpointMismatch() : std::runtime_error("paths do not share endpoints") {}
};

struct EdgeRec {
  Vertex u = kNoVertex;
  Vertex v = kNoVertex;
  Length len = 0;
  bool live = false;
  Vertex other(Vertex x) const { return x == u ? v : u; }
};

struct Update {
  enum Kind { EdgeInsert, EdgeDelete, VertexInsert, VertexDelete } kind;
  Vertex u = kNoVertex, v = kNoVertex;  // EdgeInsert endpoints
  Length len = 0;                       // EdgeInsert length
  EdgeId e = kNoEdge;                   // EdgeDelete target; filled in for inserts on apply
  Vertex w = kNoVertex;                 // VertexDelete target; filled in for VertexInsert on apply

  static Update edge_insert(Vertex u, Vertex v, Length l) { return {EdgeInsert, u, v, l, kNoEdge, kNoVertex}; }
  static Update edge_delete(EdgeId e) { return {EdgeDelete, kNoVertex, kNoVertex, 0, e, kNoVertex}; }
  static Update vertex_insert() { return {VertexInsert, kNoVertex, kNoVertex, 0, kNoEdge, kNoVertex}; }
  static Update vertex_delete(Vertex v) { return {VertexDelete, kNoVertex, kNoVertex, 0, kNoEdge, v}; }
};

// A batch of updates applied atomically. When `split` is set, the trailing
// delete+insert runs encode vertex splits and must satisfy
// deg(v_new) <= deg(origin) after the batch.
struct UpdateBatch {
  std::vector<Update> ops;
  bool split = false;
};

struct PathHandle {
  Vertex src = kNoVertex, dst = kNoVertex;
  Length len = 0;
  std::vector<EdgeId> edges;

  int64_t hops() const { return static_cast<int64_t>(edges.size()); }
  bool empty() const { return edges.empty(); }
  PathHandle reversed() const {
    PathHandle r{dst, src, len, {edges.rbegin(), edges.rend()}};
    return r;
  }
};

// Total order realizing unique shortest paths: lexicographic on
// (length, hop count, direction-canonical edge-id order, raw sequence).
// Returns <0, 0, >0. Throws EndpointMismatch unless both paths run between
// the same ordered endpoint pair.
int tiebreak_compare(const PathHandle& p1, const PathHandle& p2);
// Same canonical order without the shared-endpoint requirement; used to pick
// between candidate paths to different targets (e.g. nearest-terminal ties).
int tiebreak_key_compare(const PathHandle& p1, const PathHandle& p2);

// Concatenate a ++ b where a.dst == b.src.
PathHandle path_concat(const PathHandle& a, const PathHandle& b);

class DynGraph {
 public:
  struct Applied {
    std::vector<EdgeId> inserted_edges;
    std::vector<Vertex> inserted_vertices;  // from VertexInsert ops
  };
  using Listener = std::function<void(const UpdateBatch&, const Applied&)>;

  explicit DynGraph(Length min_len = 1, Length max_len = 0, int degree_cap = 0)
      : min_len_(min_len), max_len_(max_len), degree_cap_(degree_cap) {}

  // Pre-time-0 construction. Not logged; invalid once apply_batch ran.
  Vertex add_vertex();
  EdgeId add_edge(Vertex u, Vertex v, Length l);

  Applied apply_batch(const UpdateBatch& batch);
  size_t add_listener(Listener fn);

  bool has_vertex(Vertex v) const { return v >= 0 && v < (Vertex)vertex_live_.size() && vertex_live_[v]; }
  bool has_edge(EdgeId e) const { return e >= 0 && e < (EdgeId)edges_.size() && edges_[e].live; }
  const EdgeRec& edge(EdgeId e) const {
    if (!has_edge(e)) throw UnknownEdge(e);
    return edges_[e];
  }
  // Incident live edges, ascending edge id.
  const std::vector<EdgeId>& incident(Vertex v) const;
  int degree(Vertex v) const { return has_vertex(v) ? (int)incident_[v].size() : 0; }

  int64_t time() const { return time_; }
  size_t num_vertices() const { return live_vertex_count_; }
  size_t num_edges() const { return live_edge_count_; }
  Vertex vertex_bound() const { return (Vertex)vertex_live_.size(); }
  EdgeId edge_bound() const { return (EdgeId)edges_.size(); }
  std::vector<Vertex> vertices() const;  // ascending
  std::vector<EdgeId> live_edges() const;    // ascending

  Length min_len() const { return min_len_; }
  Length max_len() const { return max_len_; }
  int degree_cap() const { return degree_cap_; }

  const std::vector<UpdateBatch>& log() const { return log_; }
  // Total length of a path given by edge ids; validates adjacency from src.
  PathHandle make_path(Vertex src, const std::vector<EdgeId>& edges) const;

 private:
  void validate_batch(const UpdateBatch& batch) const;
  EdgeId insert_edge_raw(Vertex u, Vertex v, Length l);
  void delete_edge_raw(EdgeId e);
  Vertex insert_vertex_raw();
  void delete_vertex_raw(Vertex v);
  void ensure_vertex(Vertex v);

  Length min_len_;
  Length max_len_;  // 0 = unbounded
  int degree_cap_;  // 0 = unbounded
  int64_t time_ = 0;
  std::vector<EdgeRec> edges_;
  std::vector<char> vertex_live_;
  std::vector<std::vector<EdgeId>> incident_;
  size_t live_vertex_count_ = 0;
  size_t live_edge_count_ = 0;
  std::vector<UpdateBatch> log_;
  std::vector<Listener> listeners_;
};

// JSON-lines trace I/O, one record per batch:
// {"t":int,"ops":[{"op":"ei","u":id,"v":id,"l":int}|{"op":"ed","e":id}|{"op":"vi"}|{"op":"vd","v":id}],"split":bool}
std::string batch_to_json(int64_t t, const UpdateBatch& b);
UpdateBatch batch_from_json(const std::string& line, int64_t* t_out = nullptr);

}  // namespace vsp
