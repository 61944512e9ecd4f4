#pragma once

#include <cstdint>
#include <vector>

#include "synthnet/netlist.hpp"

namespace sn {

// Longest/shortest combinational path statistics of a flat netlist. A path
// runs between boundaries (sequential instances, macros, primary inputs and
// outputs) and its depth is the number of combinational instances on it.
// Clock nets are ignored. md_* cover only paths that start or end at a
// macro; they are -1 when no such path exists.
struct DepthReport {
  int d_min = 0;
  int d_max = 0;
  int md_min = -1;
  int md_max = -1;
  bool has_loop = false;
  // histogram[k] = number of path-ending endpoints (sequential data pins,
  // macro inputs, primary outputs) whose longest incoming path has depth k.
  std::vector<uint64_t> histogram;
};

// `parallel` selects the level-parallel traversal; both variants produce
// identical reports.
DepthReport analyze_depth(const Netlist& nl, bool parallel = true);

}  // namespace sn
