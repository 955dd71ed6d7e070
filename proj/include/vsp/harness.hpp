#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsp/dyngraph.hpp"

namespace vsp {

// ---------------------------------------------------------------------------
// Brute-force oracles. Independent implementations on purpose: they share
// only DynGraph accessors and tiebreak_compare with the engine.
// ---------------------------------------------------------------------------

struct OracleSSSP {
  Vertex source = kNoVertex;
  // One minimal path per reached vertex; unreached entries are nullopt.
  std::vector<std::optional<PathHandle>> best;
  bool reached(Vertex v) const { return v >= 0 && v < (Vertex)best.size() && best[v].has_value(); }
  Length dist(Vertex v) const { return best[v]->len; }
};

OracleSSSP oracle_sssp(const DynGraph& g, Vertex s);
std::optional<PathHandle> oracle_path(const DynGraph& g, Vertex u, Vertex v);
std::optional<Length> oracle_dist(const DynGraph& g, Vertex u, Vertex v);
// Exact diameter over live vertices (max finite pairwise distance).
Length oracle_diameter(const DynGraph& g);
// Exact diameter restricted to a vertex subset.
Length oracle_diameter_of(const DynGraph& g, const std::vector<Vertex>& xs);

// Nearest terminal under the canonical order plus the open ball strictly
// inside it, computed from scratch.
struct OracleBall {
  Vertex pivot = kNoVertex;
  Length pivot_dist = 0;
  std::vector<Vertex> ball;  // open ball members incl. v itself (if not terminal)
};
OracleBall oracle_ball(const DynGraph& g, Vertex v, const std::vector<char>& is_terminal);

// Exact undirected max flow (augmenting paths on the bidirected graph).
int64_t oracle_max_flow(int n, const std::vector<std::tuple<int, int, int64_t>>& edges, int s, int t);

// ---------------------------------------------------------------------------
// Instance generators. Deterministic in the seed.
// ---------------------------------------------------------------------------

struct Instance {
  DynGraph g;
  Length scale = 1;  // user lengths were multiplied by this on ingestion
};

DynGraph gen_path(int n, Length len = 1);
DynGraph gen_cycle(int n, Length len = 1);
DynGraph gen_star(int leaves, Length len = 1);
// Two cliques of size `side` joined by a single bridge of length bridge_len.
DynGraph gen_dumbbell(int side, Length bridge_len);
// Connected random graph with max degree <= deg_cap, about extra_edges edges
// beyond the spanning tree, lengths uniform in [1, max_len].
DynGraph gen_random_connected(int n, int deg_cap, int extra_edges, Length max_len, uint64_t seed);
// Same but lengths are pre-scaled by the initial edge count.
Instance gen_random_connected_scaled(int n, int deg_cap, int extra_edges, Length max_len, uint64_t seed);

// Random update batches against a live graph. Profiles: "deletions-only",
// "fully-dynamic", "terminal-churn" (graph ops are benign; terminal churn is
// the replayer's rule). keep_connected restricts deletions to non-bridges.
UpdateBatch gen_update(DynGraph& g, const std::string& profile, uint64_t seed, int64_t step,
                       bool keep_connected, Length scale);

// True if removing e disconnects the component containing its endpoints.
bool is_bridge(const DynGraph& g, EdgeId e);

}  // namespace vsp
