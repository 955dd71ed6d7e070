#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "vsp/dyngraph.hpp"
#include "vsp/lssf.hpp"
#include "vsp/pivots.hpp"

namespace vsp {

struct NonTermination : std::runtime_error {
  NonTermination() : std::runtime_error("embedding loop exceeded its round bound") {}
};

// An indexed collection of paths with the exact per-edge membership counts.
struct PathCollection {
  std::vector<PathHandle> paths;
  std::map<EdgeId, int64_t> econg;

  int64_t total_len() const;
  void recount();
};

std::map<EdgeId, int64_t> count_econg(const std::vector<PathHandle>& paths);

// One path per (u, ball member v of u, incident edge (v,x)): the stored
// ball path u..v extended by that edge. Kept as a multiset, one entry per
// defining triple.
PathCollection build_base_paths(const PivotState& ps);

// Projection onto potential pivots: for each base u..x path P and every
// u-hat in ball(u)+pivot(u), x-hat in ball(x)+pivot(x), the path
// (u-hat..u) + P + (x..x-hat), deduplicated by direction-normalized edge
// sequence and emitted in that key order.
PathCollection project_paths(const PivotState& ps, const PathCollection& base);

// Iterative embedding: round i builds a forest under weights
// w_i(e) = econg(remaining paths, e) * l(e) and discards every path whose
// overestimate ratio is at most twice that round's measured gamma. Keeps
// going until no path remains; an empty input still builds one forest so
// callers always have roots to hang structure on.
struct EmbedResult {
  std::vector<StretchForest> forests;
  // For each input path: the first round whose forest covers it (-1 never).
  std::vector<int> covered_round;
  int64_t lambda() const { return (int64_t)forests.size(); }
};

EmbedResult embed_iteratively(const DynGraph& g, const PathCollection& proj, int64_t k,
                              const std::vector<Vertex>& seed_roots);

}  // namespace vsp
