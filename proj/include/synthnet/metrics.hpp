#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "synthnet/depth.hpp"
#include "synthnet/netlist.hpp"

namespace sn {

// Per-block terminal counts under three crossing conventions:
//   type1  every driver->sink pair that crosses the block boundary
//   type2  every crossing net, counted once
//   type3  every distinct pair of blocks joined by a driver->sink edge of
//          the net, counted once per net
// For any block, type2 <= type3 <= type1. Top-level ports act as an
// implicit external block; clock nets are ignored.
struct BlockPins {
  std::vector<uint64_t> type1, type2, type3;

  const std::vector<uint64_t>& by_type(int t) const {
    return t == 1 ? type1 : t == 3 ? type3 : type2;
  }
};

// block_of maps every instance to a block in [0, n_blocks).
BlockPins count_block_pins(const Netlist& nl, const std::vector<uint32_t>& block_of,
                           uint32_t n_blocks);

struct RentOptions {
  int pin_type = 2;
  bool geom_mean = false;  // geometric instead of arithmetic level means
  double r_ratio = 0.5;    // fit window: block sizes up to r_ratio * n_inst
  uint64_t seed = 1;
  bool parallel = true;
};

struct RentLevel {
  double size = 0;  // mean block size at this level
  double pins = 0;  // mean block pins at this level
  uint64_t blocks = 0;
};

struct RentEstimate {
  double p = 0.0;
  double k = 0.0;  // pins ~= k * size^p
  std::vector<RentLevel> levels;
};

// Recursive min-cut bisection; level means feed a log-log least squares fit.
RentEstimate rent_by_partitioning(const Netlist& nl, const RentOptions& opt);

// Seeded region growth to power-of-two sizes, absorbing at each step the
// outside instance with the most nets touching the region.
RentEstimate rent_by_traversal(const Netlist& nl, const RentOptions& opt);

struct ExtractedParams {
  uint64_t n_inst = 0, n_net = 0, n_pi = 0, n_po = 0, n_clock_ports = 0;
  uint64_t n_comb = 0, n_seq = 0, n_macro = 0;
  double s_ratio = 0.0, t_avg = 0.0, g_avg = 0.0;
  double p_partition = 0.0, p_traversal = 0.0;
  DepthReport depth;
  std::map<std::string, uint64_t> cell_counts;
};

// Full inverse analysis of a flat or hierarchical netlist.
ExtractedParams extract_params(const Netlist& nl, const RentOptions& opt);

struct ErrorStats {
  double mape = 0.0;   // zero-target entries are skipped
  double mae = 0.0;
  double medae = 0.0;
};

ErrorStats error_metrics(const std::vector<double>& target, const std::vector<double>& actual);

double cosine_similarity(const std::map<std::string, double>& a,
                         const std::map<std::string, double>& b);

std::map<std::string, double> to_weight_map(const std::map<std::string, uint64_t>& counts);

}  // namespace sn
