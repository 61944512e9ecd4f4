#pragma once

#include <cstdint>
#include <vector>

#include "synthnet/rng.hpp"

namespace sn {

// Hypergraph in CSR form: vertex -> incident nets and net -> member vertices.
// Single-vertex nets carry no cut information and may be omitted.
struct HyperGraph {
  uint32_t n_vertices = 0;
  std::vector<uint32_t> vnet_off{0};  // size n_vertices + 1
  std::vector<uint32_t> vnet;
  std::vector<uint32_t> nv_off{0};  // size n_nets + 1
  std::vector<uint32_t> nv;

  uint32_t n_nets() const { return static_cast<uint32_t>(nv_off.size() - 1); }
};

struct BisectResult {
  std::vector<uint8_t> side;  // 0/1 per vertex
  uint64_t cut = 0;           // nets with members on both sides
};

// Multilevel Fiduccia-Mattheyses bisection with gain buckets and a 45-55%
// balance window. Large graphs are coarsened by heavy-edge matching; the
// coarsest graph is bisected from `n_starts` seeded random partitions and
// the best result is projected back with FM refinement at every level.
// Deterministic for a fixed seed.
BisectResult fm_bisect(const HyperGraph& hg, uint64_t seed, int n_starts = 4);

}  // namespace sn
