#pragma once

#include <cstdint>
#include <vector>

#include "synthnet/netlist.hpp"

namespace sn {

// A unit entering the bottom-up merge: either one instance (size 1, terminals
// = its signal pin count) or a nested module (size = its interior instance
// count, terminals = its port count).
struct ClusterLeaf {
  uint64_t size = 1;
  uint32_t terminals = 0;
};

struct ClusterConfig {
  double t_avg = 2.5;
  double p = 0.5;
  double sigma_p = 0.25;
  double alpha = 1.0;
  uint64_t seed = 1;
  bool record_audit = false;
};

struct ClusterNode {
  uint32_t left = kNone;   // children (kNone for leaves)
  uint32_t right = kNone;
  uint64_t size = 1;       // leaves in the subtree, weighted by leaf size
  uint32_t terminals = 0;  // terminal estimate used while clustering
  int32_t level = -1;      // set by levelize(); root = 0
};

// Terminal caps in effect when an internal node was formed; children obeyed
// cap_for_left >= terminals(left) and cap_for_right >= terminals(right).
struct MergeAudit {
  uint32_t node = kNone;
  double cap_for_left = 0.0;
  double cap_for_right = 0.0;
};

struct ClusterTree {
  std::vector<ClusterNode> nodes;  // [0, n_leaves) = leaves, then internals
  uint32_t n_leaves = 0;
  uint32_t root = kNone;
  int32_t n_levels = 0;       // set by levelize()
  uint64_t deferrals = 0;     // pair rejections due to the terminal cap
  uint64_t relaxations = 0;   // cap doublings after merge-free full rotations
  std::vector<MergeAudit> audit;

  bool is_leaf(uint32_t v) const { return nodes[v].left == kNone; }
};

// Largest terminal count a block of `size` instances may expose to a merge
// partner: the Rent estimate plus `alpha` spread terms.
double max_terminals(double size, double t_avg, double p, double sigma_p, double alpha);

// Pairs the two smallest blocks repeatedly until one remains, deferring pairs
// whose terminal counts exceed the partner's cap. A full rotation of the
// queue without a merge doubles the cap slack so clustering always finishes.
ClusterTree cluster(const std::vector<ClusterLeaf>& leaves, const ClusterConfig& cfg);

// Assigns levels: root 0, each internal node its distance from the root, and
// every leaf the bottom level (tree height), so a leaf's block is available
// at any merge level above it.
void levelize(ClusterTree& tree);

// Internal nodes in generation order: deepest level first, ascending node id
// within a level, the root last.
std::vector<uint32_t> internal_schedule(const ClusterTree& tree);

}  // namespace sn
