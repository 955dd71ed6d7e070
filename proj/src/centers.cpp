#include "vsp/centers.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

#include "vsp/spt.hpp"

namespace vsp {

std::vector<Vertex> hitting_set(const HittingSetInstance& inst) {
  for (const auto& b : inst.family)
    if (b.empty()) throw EmptyFamilyMember();
  if (inst.family.empty()) return {};

  // deg[a] = number of not-yet-hit members containing a.
  std::map<Vertex, std::vector<size_t>> member_of;
  std::map<Vertex, int64_t> deg;
  for (Vertex a : inst.universe) deg[a] = 0;
  for (size_t i = 0; i < inst.family.size(); ++i) {
    for (Vertex a : inst.family[i]) {
      assert(deg.count(a) && "family member element outside universe");
      member_of[a].push_back(i);
      ++deg[a];
    }
  }
  std::vector<char> hit(inst.family.size(), 0);
  size_t unhit = inst.family.size();
  std::vector<Vertex> h;
  while (unhit > 0) {
    Vertex best = kNoVertex;
    int64_t best_deg = 0;
    for (const auto& [a, d] : deg) {
      if (d > best_deg) {
        best = a;
        best_deg = d;
      }
    }
    assert(best != kNoVertex && "unhit member with no live elements");
    h.push_back(best);
    for (size_t i : member_of[best]) {
      if (hit[i]) continue;
      hit[i] = 1;
      --unhit;
      for (Vertex a : inst.family[i])
        if (deg.count(a)) --deg[a];
    }
    deg.erase(best);
  }
  std::sort(h.begin(), h.end());
  return h;
}

namespace {

// Open balls w.r.t. the current pivot set; cluster size = inverse membership count.
std::map<Vertex, int64_t> cluster_sizes(const DynGraph& g, const std::vector<Vertex>& verts,
                                        const std::set<Vertex>& w) {
  std::map<Vertex, int64_t> cnt;
  for (Vertex v : verts) cnt[v] = 0;
  std::vector<char> is_pivot(g.vertex_bound(), 0);
  for (Vertex a : w) is_pivot[a] = 1;
  for (Vertex u : verts) {
    SPTree t = tiebreak_sssp(g, {.sources = {u}, .stop_at = &is_pivot});
    Length d_piv = t.first_stop == kNoVertex ? -1 : t.dist[t.first_stop];
    for (Vertex v : t.settle_order) {
      if (d_piv >= 0 && t.dist[v] >= d_piv) continue;  // open ball is numeric-strict
      ++cnt[v];
    }
  }
  return cnt;
}

}  // namespace

std::vector<Vertex> center(const DynGraph& g, int64_t k, CenterStats* stats) {
  assert(k >= 1 && "center: k >= 1");
  std::vector<Vertex> vs = g.vertices();
  int64_t n = (int64_t)vs.size();
  if (stats) *stats = CenterStats{};
  if (n == 0) return {};
  if (n == 1 || k >= n) return vs;
  const int64_t b = k;

  // Balls of exactly b vertices (or the whole component), in settle order.
  std::map<Vertex, std::vector<Vertex>> ball;
  int64_t min_ball = b;
  for (Vertex u : vs) {
    SPTree t = tiebreak_sssp(g, {.sources = {u}, .max_settled = b});
    ball[u] = t.settle_order;
    min_ball = std::min<int64_t>(min_ball, (int64_t)ball[u].size());
  }

  HittingSetInstance hs0;
  hs0.universe = vs;
  hs0.d = std::max<int64_t>(1, min_ball);
  for (Vertex u : vs) hs0.family.push_back(ball[u]);
  std::vector<Vertex> w0 = hitting_set(hs0);
  std::set<Vertex> w(w0.begin(), w0.end());
  if (stats) stats->max_family_ball = b;

  auto cs = cluster_sizes(g, vs, w);
  std::vector<Vertex> vi;
  for (Vertex v : vs)
    if (cs[v] > 2 * b) vi.push_back(v);

  while ((int64_t)vi.size() * b > n) {
    if (stats) {
      ++stats->rounds;
      stats->level_sizes.push_back(vi.size());
    }
    int64_t ki = std::max<int64_t>(1, (int64_t)vi.size() * b / n);
    std::set<Vertex> in_vi(vi.begin(), vi.end());
    HittingSetInstance hsi;
    hsi.universe = vi;
    hsi.d = ki;
    for (Vertex u : vs) {
      std::vector<Vertex> bi;
      for (Vertex v : ball[u]) {
        if (!in_vi.count(v)) continue;
        bi.push_back(v);
        if ((int64_t)bi.size() == ki) break;
      }
      if ((int64_t)bi.size() == ki) hsi.family.push_back(std::move(bi));
    }
    for (Vertex a : hitting_set(hsi)) w.insert(a);
    auto cs_i = cluster_sizes(g, vs, w);
    std::vector<Vertex> next;
    for (Vertex v : vi)
      if (cs_i[v] > 2 * b) next.push_back(v);
    assert(next.size() * 2 <= vi.size() && "halving round must discard at least half");
    vi = std::move(next);
  }
  for (Vertex v : vi) w.insert(v);
  return std::vector<Vertex>(w.begin(), w.end());
}

}  // namespace vsp
