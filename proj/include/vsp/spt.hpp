#pragma once

#include <functional>
#include <vector>

#include "vsp/dyngraph.hpp"

namespace vsp {

// Options for the deterministic tiebreak Dijkstra. All interior comparisons
// use the canonical path order of tiebreak_compare, so the result is the
// unique minimal shortest-path tree.
struct SPTOptions {
  std::vector<Vertex> sources;
  int64_t max_settled = -1;                    // stop after settling this many (-1 = all)
  Length max_dist = -1;                        // do not settle vertices farther than this
  const std::vector<char>* stop_at = nullptr;  // settle the first flagged vertex, then stop
  const std::vector<char>* allowed = nullptr;  // restrict search to flagged vertices
  std::function<bool(EdgeId)> edge_filter;     // edges failing this are ignored
  // Settle but do not relax out of v when this returns false (pruned search).
  std::function<bool(Vertex v, Length d)> expand_if;
};

struct SPTree {
  std::vector<char> settled;
  std::vector<Length> dist;
  std::vector<int64_t> hops;
  std::vector<EdgeId> parent_edge;
  std::vector<Vertex> parent_vertex;
  std::vector<Vertex> source_of;
  std::vector<Vertex> settle_order;
  Vertex first_stop = kNoVertex;

  bool reached(Vertex v) const { return v >= 0 && v < (Vertex)settled.size() && settled[v]; }
  // Path from source_of[v] to v.
  PathHandle path_to(const DynGraph& g, Vertex v) const;
};

SPTree tiebreak_sssp(const DynGraph& g, const SPTOptions& opt);

// Approximate eccentricity center of the component holding `seed`: the
// midpoint of a double-sweep farthest-pair path.
Vertex double_sweep_center(const DynGraph& g, Vertex seed);

}  // namespace vsp
