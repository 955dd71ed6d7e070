#include "vsp/paths.hpp"

#include <algorithm>
#include <cassert>

namespace vsp {

int64_t PathCollection::total_len() const {
  int64_t s = 0;
  for (const PathHandle& p : paths) s += p.len;
  return s;
}

std::map<EdgeId, int64_t> count_econg(const std::vector<PathHandle>& paths) {
  std::map<EdgeId, int64_t> c;
  for (const PathHandle& p : paths)
    for (EdgeId e : p.edges) ++c[e];
  return c;
}

void PathCollection::recount() { econg = count_econg(paths); }

PathCollection build_base_paths(const PivotState& ps) {
  const DynGraph& g = ps.graph();
  PathCollection out;
  for (Vertex u : g.vertices()) {
    std::vector<Vertex> ball = ps.ball(u);
    std::sort(ball.begin(), ball.end());
    for (Vertex v : ball) {
      const PathHandle& stem = ps.paths(u).at(v);
      for (EdgeId e : g.incident(v)) {
        PathHandle p = stem;
        p.edges.push_back(e);
        p.len += g.edge(e).len;
        p.dst = g.edge(e).other(v);
        out.paths.push_back(std::move(p));
      }
    }
  }
  out.recount();
  return out;
}

namespace {

// Ball members plus the pivot, ascending; exactly the stored path targets.
std::vector<Vertex> hat_candidates(const PivotState& ps, Vertex v) {
  std::vector<Vertex> hats;
  for (const auto& [w, path] : ps.paths(v)) hats.push_back(w);
  return hats;
}

std::vector<EdgeId> normalized_key(const std::vector<EdgeId>& seq) {
  std::vector<EdgeId> rev(seq.rbegin(), seq.rend());
  return std::min(seq, rev);
}

}  // namespace

PathCollection project_paths(const PivotState& ps, const PathCollection& base) {
  const DynGraph& g = ps.graph();
  std::map<std::vector<EdgeId>, PathHandle> dedup;
  for (const PathHandle& p : base.paths) {
    for (Vertex uh : hat_candidates(ps, p.src)) {
      PathHandle prefix = ps.paths(p.src).at(uh).reversed();
      for (Vertex xh : hat_candidates(ps, p.dst)) {
        const PathHandle& suffix = ps.paths(p.dst).at(xh);
        std::vector<EdgeId> seq = prefix.edges;
        seq.insert(seq.end(), p.edges.begin(), p.edges.end());
        seq.insert(seq.end(), suffix.edges.begin(), suffix.edges.end());
        std::vector<EdgeId> key = normalized_key(seq);
        if (dedup.count(key)) continue;
        dedup.emplace(std::move(key), g.make_path(uh, seq));
      }
    }
  }
  PathCollection out;
  for (auto& [key, p] : dedup) out.paths.push_back(std::move(p));
  out.recount();
  return out;
}

EmbedResult embed_iteratively(const DynGraph& g, const PathCollection& proj, int64_t k,
                              const std::vector<Vertex>& seed_roots) {
  EmbedResult res;
  res.covered_round.assign(proj.paths.size(), -1);

  std::vector<size_t> alive(proj.paths.size());
  for (size_t j = 0; j < proj.paths.size(); ++j) alive[j] = j;

  int64_t total0 = proj.total_len();
  int64_t round_bound = 0;  // ceil(log2(sum of lengths)) + 1 rounds at most
  while (((int64_t)1 << round_bound) < total0) ++round_bound;
  ++round_bound;

  int64_t prev_len = total0;
  while (!alive.empty()) {
    if ((int64_t)res.forests.size() >= round_bound) throw NonTermination();
    std::vector<PathHandle> live_paths;
    for (size_t j : alive) live_paths.push_back(proj.paths[j]);
    std::map<EdgeId, int64_t> w;
    for (const auto& [e, c] : count_econg(live_paths)) w[e] = c * g.edge(e).len;
    res.forests.emplace_back(g, w, k, seed_roots);
    StretchForest& sf = res.forests.back();
    auto [gnum, gden] = sf.gamma_meas();
    int round = (int)res.forests.size() - 1;

    std::vector<size_t> next;
    int64_t next_len = 0;
    for (size_t j : alive) {
      const PathHandle& p = proj.paths[j];
      __int128 weighted = 0;
      for (EdgeId e : p.edges) weighted += (__int128)sf.str_over(e) * g.edge(e).len;
      // Covered when str-over(P) <= 2 * gamma, compared exactly.
      if (weighted * gden <= (__int128)2 * gnum * p.len) {
        res.covered_round[j] = round;
      } else {
        next.push_back(j);
        next_len += p.len;
      }
    }
    assert(2 * next_len <= prev_len && "surviving mass must at least halve");
    alive = std::move(next);
    prev_len = next_len;
  }

  if (res.forests.empty()) res.forests.emplace_back(g, std::map<EdgeId, int64_t>{}, k, seed_roots);
  return res;
}

}  // namespace vsp
