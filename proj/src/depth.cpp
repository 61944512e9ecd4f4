#include <algorithm>
#include <climits>
#include <cstdint>

#include "synthnet/depth.hpp"

namespace sn {
namespace {

constexpr int32_t kUnset = 0;  // L/S value of nodes never settled (in a loop)

struct CombDag {
  std::vector<uint32_t> node_of_inst;  // instance -> dense comb index
  std::vector<uint32_t> inst_of_node;
  std::vector<uint32_t> succ_off, succ_dat;
  std::vector<uint32_t> pred_off, pred_dat;
  std::vector<uint8_t> start_any;  // fed by a boundary or undriven
  std::vector<uint8_t> start_mac;  // fed directly by a macro
  std::vector<uint32_t> indeg;
  uint32_t n = 0;
};

bool is_comb(const Netlist& nl, uint32_t inst) {
  return !nl.is_sequential(inst) && !nl.is_macro(inst);
}

CombDag build_dag(const Netlist& nl) {
  CombDag g;
  const uint32_t ni = static_cast<uint32_t>(nl.n_instances());
  g.node_of_inst.assign(ni, kNone);
  for (uint32_t i = 0; i < ni; ++i) {
    if (is_comb(nl, i)) {
      g.node_of_inst[i] = g.n++;
      g.inst_of_node.push_back(i);
    }
  }
  g.start_any.assign(g.n, 0);
  g.start_mac.assign(g.n, 0);
  g.indeg.assign(g.n, 0);

  std::vector<uint32_t> out_cnt(g.n, 0);
  auto each_edge = [&](auto&& fn) {
    for (uint32_t nid = 0; nid < nl.n_nets(); ++nid) {
      if (nl.net_is_clock(nid)) continue;
      const Net& net = nl.net(nid);
      for (const Endpoint& s : net.sinks) {
        if (s.is_port()) continue;
        if (nl.pin_dir(s.inst, s.index) == PinDir::kClock) continue;
        uint32_t sv = g.node_of_inst[s.inst];
        if (sv == kNone) continue;
        if (net.drivers.empty()) {
          g.start_any[sv] = 1;
          continue;
        }
        const Endpoint& d = net.drivers.front();
        uint32_t dv = d.is_port() ? kNone : g.node_of_inst[d.inst];
        if (dv == kNone) {
          g.start_any[sv] = 1;
          if (!d.is_port() && nl.is_macro(d.inst)) g.start_mac[sv] = 1;
        } else {
          fn(dv, sv);
        }
      }
    }
  };
  each_edge([&](uint32_t dv, uint32_t sv) {
    ++out_cnt[dv];
    ++g.indeg[sv];
  });

  g.succ_off.assign(g.n + 1, 0);
  g.pred_off.assign(g.n + 1, 0);
  for (uint32_t v = 0; v < g.n; ++v) {
    g.succ_off[v + 1] = g.succ_off[v] + out_cnt[v];
    g.pred_off[v + 1] = g.pred_off[v] + g.indeg[v];
  }
  g.succ_dat.resize(g.succ_off[g.n]);
  g.pred_dat.resize(g.pred_off[g.n]);
  std::vector<uint32_t> sfill(g.succ_off.begin(), g.succ_off.end() - 1);
  std::vector<uint32_t> pfill(g.pred_off.begin(), g.pred_off.end() - 1);
  each_edge([&](uint32_t dv, uint32_t sv) {
    g.succ_dat[sfill[dv]++] = sv;
    g.pred_dat[pfill[sv]++] = dv;
  });
  return g;
}

}  // namespace

DepthReport analyze_depth(const Netlist& nl, bool parallel) {
  CombDag g = build_dag(nl);

  std::vector<int32_t> L(g.n, kUnset), S(g.n, kUnset);
  std::vector<int32_t> Lm(g.n, 0), Sm(g.n, 0);  // 0 = not macro-reachable

  auto settle = [&](uint32_t v) {
    int32_t lmax = 0, smin = INT32_MAX, lm = g.start_mac[v] ? 1 : 0,
            sm = g.start_mac[v] ? 1 : INT32_MAX;
    for (uint32_t e = g.pred_off[v]; e < g.pred_off[v + 1]; ++e) {
      uint32_t u = g.pred_dat[e];
      lmax = std::max(lmax, L[u]);
      smin = std::min(smin, S[u]);
      if (Lm[u] > 0) {
        lm = std::max(lm, Lm[u] + 1);
        sm = std::min(sm, Sm[u] + 1);
      }
    }
    L[v] = lmax + 1;
    int32_t s = INT32_MAX;
    if (g.start_any[v] || g.pred_off[v] == g.pred_off[v + 1]) s = 1;
    if (smin != INT32_MAX) s = std::min(s, smin + 1);
    S[v] = s;
    Lm[v] = lm;
    Sm[v] = sm == INT32_MAX ? 0 : sm;
  };

  std::vector<uint32_t> frontier, next;
  for (uint32_t v = 0; v < g.n; ++v)
    if (g.indeg[v] == 0) frontier.push_back(v);
  uint64_t processed = 0;

  while (!frontier.empty()) {
    processed += frontier.size();
    next.clear();
    if (parallel && frontier.size() >= 512) {
#pragma omp parallel
      {
        std::vector<uint32_t> local;
#pragma omp for schedule(static) nowait
        for (int64_t i = 0; i < static_cast<int64_t>(frontier.size()); ++i) {
          uint32_t v = frontier[static_cast<size_t>(i)];
          settle(v);
          for (uint32_t e = g.succ_off[v]; e < g.succ_off[v + 1]; ++e) {
            uint32_t w = g.succ_dat[e];
            uint32_t left;
#pragma omp atomic capture
            left = --g.indeg[w];
            if (left == 0) local.push_back(w);
          }
        }
#pragma omp critical
        next.insert(next.end(), local.begin(), local.end());
      }
    } else {
      for (uint32_t v : frontier) {
        settle(v);
        for (uint32_t e = g.succ_off[v]; e < g.succ_off[v + 1]; ++e) {
          uint32_t w = g.succ_dat[e];
          if (--g.indeg[w] == 0) next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }

  DepthReport rep;
  rep.has_loop = processed < g.n;

  // Maximal paths end at sequential data pins, macro inputs and primary
  // outputs. Scan those endpoints twice: once to size the histogram, once to
  // fill it and fold in the min/max statistics.
  int dmin = INT32_MAX, dmax = 0, mdmin = INT32_MAX, mdmax = -1;
  bool any_path = false;

  auto each_terminal = [&](auto&& fn) {
    for (uint32_t nid = 0; nid < nl.n_nets(); ++nid) {
      if (nl.net_is_clock(nid)) continue;
      const Net& net = nl.net(nid);
      if (net.drivers.empty()) continue;
      const Endpoint& d = net.drivers.front();
      uint32_t dv = d.is_port() ? kNone : g.node_of_inst[d.inst];
      bool drv_macro = !d.is_port() && nl.is_macro(d.inst);
      if (dv != kNone && L[dv] == kUnset) continue;  // driver stuck in a loop
      for (const Endpoint& s : net.sinks) {
        bool terminal, sink_macro = false;
        if (s.is_port()) {
          terminal = nl.port(s.index).dir == PinDir::kOutput;
        } else {
          if (nl.pin_dir(s.inst, s.index) == PinDir::kClock) continue;
          sink_macro = nl.is_macro(s.inst);
          terminal = sink_macro || nl.is_sequential(s.inst);
        }
        if (terminal) fn(dv, drv_macro, sink_macro);
      }
    }
  };

  each_terminal([&](uint32_t dv, bool drv_macro, bool sink_macro) {
    any_path = true;
    int longest = dv == kNone ? 0 : L[dv];
    int shortest = dv == kNone ? 0 : S[dv];
    dmax = std::max(dmax, longest);
    dmin = std::min(dmin, shortest);
    if (sink_macro || (dv == kNone && drv_macro)) {
      mdmax = std::max(mdmax, longest);
      mdmin = std::min(mdmin, shortest);
    }
    if (dv != kNone && Lm[dv] > 0) {
      mdmax = std::max(mdmax, Lm[dv]);
      mdmin = std::min(mdmin, Sm[dv]);
    }
  });

  rep.d_max = dmax;
  rep.d_min = any_path ? dmin : 0;
  rep.md_max = mdmax;
  rep.md_min = mdmax >= 0 ? mdmin : -1;

  rep.histogram.assign(static_cast<size_t>(dmax) + 1, 0);
  each_terminal([&](uint32_t dv, bool, bool) {
    ++rep.histogram[dv == kNone ? 0 : static_cast<size_t>(L[dv])];
  });
  return rep;
}

}  // namespace sn
