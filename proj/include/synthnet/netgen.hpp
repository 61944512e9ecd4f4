#pragma once

#include <cstdint>

#include "synthnet/cell_library.hpp"
#include "synthnet/netlist.hpp"
#include "synthnet/rng.hpp"
#include "synthnet/spec.hpp"

namespace sn {

// Terminal budget of a block: total terminals and the input/output split.
struct IoSample {
  uint32_t t = 0;
  uint32_t i = 0;
  uint32_t o = 0;
};

// Draws T ~ N(t_avg * size^p, size^sigma_p) rounded half-to-even and clamped
// to >= 2 (sigma_p == 0 collapses the spread entirely), then splits off
// o = round_even(T * G) with G ~ N(g_avg, sigma_g) clamped so both shares
// stay >= 1. i is derived as T - o, never rounded separately.
IoSample sample_io(uint64_t size, double t_avg, double p, double sigma_p, double g_avg,
                   double sigma_g, Rng& rng);

// How a merge resolves its terminal surplus: `internal` connected nets are
// hidden inside the block, `external` additional connections are made beyond
// them. d_out/d_in are the output/input surpluses (children minus sampled
// target); negative surpluses are floored at zero and counted in `clamps`.
struct NetPlan {
  uint64_t internal = 0;
  uint64_t external = 0;
  uint32_t clamps = 0;
  uint64_t connections() const { return internal + external; }
};

NetPlan plan_net_counts(int64_t d_out, int64_t d_in);

// Flip-flops a merged block of `size` own instances (ff_count of them already
// sequential) may still absorb to honor the sequential ratio.
uint64_t plan_ff_budget(double s_ratio, uint64_t size, uint64_t ff_count);

struct GenReport {
  uint64_t n_comb = 0, n_seq = 0, n_macro = 0;
  uint64_t cluster_deferrals = 0, cluster_relaxations = 0;
  uint64_t connections_target = 0, connections_made = 0;
  uint64_t hidden_target = 0, hidden_made = 0;
  uint64_t plan_clamps = 0;
  uint64_t rescue_ffs = 0, root_rescue_ffs = 0, extra_ffs = 0;
  uint64_t leftover_ffs = 0, chain_ffs = 0;
  uint64_t depth_rejections = 0, macro_rejections = 0, cycle_rejections = 0;
  uint64_t dmin_misses = 0, skipped_outputs = 0;
  uint64_t ports_in_added = 0, ports_in_removed = 0;
  uint64_t ports_out_added = 0, ports_out_removed = 0;
  uint64_t ports_in_shortfall = 0, ports_out_shortfall = 0;
};

struct GenResult {
  Netlist netlist;
  GenReport report;
};

// Builds a netlist matching `spec`. Deterministic in spec.seed: nested
// modules derive their streams from the seed and their hierarchical path, so
// their interiors are independent of generation order.
GenResult generate_netlist(const SpecParams& spec, const CellLibrary& lib);

}  // namespace sn
