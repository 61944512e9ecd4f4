#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "synthnet/metrics.hpp"

namespace sn {

BlockPins count_block_pins(const Netlist& nl, const std::vector<uint32_t>& block_of,
                           uint32_t n_blocks) {
  if (block_of.size() != nl.n_instances())
    throw std::invalid_argument("count_block_pins: block assignment size mismatch");
  BlockPins bp;
  bp.type1.assign(n_blocks, 0);
  bp.type2.assign(n_blocks, 0);
  bp.type3.assign(n_blocks, 0);
  const uint32_t ext = n_blocks;  // implicit block for top-level ports

  std::vector<uint32_t> touched;
  std::vector<uint64_t> pairs;
  for (uint32_t net = 0; net < nl.n_nets(); ++net) {
    const Net& nn = nl.net(net);
    if (nn.drivers.empty() && nn.sinks.empty()) continue;
    if (nl.net_is_clock(net)) continue;
    auto blk = [&](const Endpoint& e) { return e.is_port() ? ext : block_of[e.inst]; };

    touched.clear();
    for (const Endpoint& d : nn.drivers) touched.push_back(blk(d));
    for (const Endpoint& s : nn.sinks) touched.push_back(blk(s));
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    if (touched.size() < 2) continue;  // entirely inside one block

    for (uint32_t b : touched)
      if (b != ext) ++bp.type2[b];

    pairs.clear();
    for (const Endpoint& d : nn.drivers) {
      uint32_t bd = blk(d);
      for (const Endpoint& s : nn.sinks) {
        uint32_t bs = blk(s);
        if (bd == bs) continue;
        if (bd != ext) ++bp.type1[bd];
        if (bs != ext) ++bp.type1[bs];
        pairs.push_back(static_cast<uint64_t>(std::min(bd, bs)) << 32 | std::max(bd, bs));
      }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (uint64_t key : pairs) {
      uint32_t x = static_cast<uint32_t>(key >> 32);
      uint32_t y = static_cast<uint32_t>(key);
      if (x != ext) ++bp.type3[x];
      if (y != ext) ++bp.type3[y];
    }
  }
  return bp;
}

ErrorStats error_metrics(const std::vector<double>& target, const std::vector<double>& actual) {
  if (target.size() != actual.size() || target.empty())
    throw std::invalid_argument("error_metrics: mismatched or empty inputs");
  ErrorStats st;
  std::vector<double> abs_err(target.size());
  double mape_sum = 0;
  size_t mape_n = 0;
  for (size_t i = 0; i < target.size(); ++i) {
    abs_err[i] = std::abs(actual[i] - target[i]);
    st.mae += abs_err[i];
    if (target[i] != 0) {
      mape_sum += abs_err[i] / std::abs(target[i]);
      ++mape_n;
    }
  }
  st.mae /= static_cast<double>(abs_err.size());
  st.mape = mape_n ? mape_sum / static_cast<double>(mape_n) : 0.0;
  std::sort(abs_err.begin(), abs_err.end());
  size_t mid = abs_err.size() / 2;
  st.medae = abs_err.size() % 2 ? abs_err[mid] : 0.5 * (abs_err[mid - 1] + abs_err[mid]);
  return st;
}

double cosine_similarity(const std::map<std::string, double>& a,
                         const std::map<std::string, double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto& [k, v] : a) {
    na += v * v;
    auto it = b.find(k);
    if (it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na <= 0 || nb <= 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::map<std::string, double> to_weight_map(const std::map<std::string, uint64_t>& counts) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : counts) out[k] = static_cast<double>(v);
  return out;
}

ExtractedParams extract_params(const Netlist& nl, const RentOptions& opt) {
  ExtractedParams ex;
  ex.n_inst = nl.n_instances();
  uint64_t pin_sum = 0;
  for (uint32_t v = 0; v < nl.n_instances(); ++v) {
    const CellMaster& m = nl.master_of(v);
    ++ex.cell_counts[m.name];
    pin_sum += m.signal_pins();
    if (m.is_sequential)
      ++ex.n_seq;
    else if (m.is_macro)
      ++ex.n_macro;
    else
      ++ex.n_comb;
  }
  for (uint32_t net = 0; net < nl.n_nets(); ++net) {
    const Net& nn = nl.net(net);
    if (!nn.drivers.empty() || !nn.sinks.empty()) ++ex.n_net;
  }
  for (uint32_t pid : nl.module(0).ports) {
    const Port& p = nl.port(pid);
    if (p.net != kNone && nl.net_is_clock(p.net)) {
      ++ex.n_clock_ports;
    } else if (p.dir == PinDir::kInput) {
      ++ex.n_pi;
    } else {
      ++ex.n_po;
    }
  }
  if (ex.n_inst) {
    ex.s_ratio = static_cast<double>(ex.n_seq) / static_cast<double>(ex.n_inst);
    ex.t_avg = static_cast<double>(pin_sum) / static_cast<double>(ex.n_inst);
  }
  uint64_t io = ex.n_pi + ex.n_po;
  ex.g_avg = io ? static_cast<double>(ex.n_po) / static_cast<double>(io) : 0.0;
  ex.depth = analyze_depth(nl, opt.parallel);
  ex.p_partition = rent_by_partitioning(nl, opt).p;
  ex.p_traversal = rent_by_traversal(nl, opt).p;
  return ex;
}

}  // namespace sn
