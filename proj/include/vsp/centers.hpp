#pragma once

#include <stdexcept>
#include <vector>

#include "vsp/dyngraph.hpp"

namespace vsp {

struct EmptyFamilyMember : std::runtime_error {
  EmptyFamilyMember() : std::runtime_error("hitting_set: family member is empty") {}
};

struct HittingSetInstance {
  std::vector<Vertex> universe;
  std::vector<std::vector<Vertex>> family;  // each member of size >= d
  int64_t d = 1;
};

// Greedy max-coverage hitting set: |H| <= (|A|/d) ln|family| + 1.
std::vector<Vertex> hitting_set(const HittingSetInstance& inst);

struct CenterStats {
  int rounds = 0;                 // halving rounds executed
  int64_t max_family_ball = 0;    // largest ball handed to hitting_set
  std::vector<size_t> level_sizes;  // |V_i| per round
};

// Small center set A: every ball |B_G(v,A)| <= k and cluster |C_G(v,A)| <= 2k.
std::vector<Vertex> center(const DynGraph& g, int64_t k, CenterStats* stats = nullptr);

}  // namespace vsp
