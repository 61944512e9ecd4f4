#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

#include "synthnet/fm_bisect.hpp"
#include "synthnet/metrics.hpp"

namespace sn {

namespace {

double mean_of(const std::vector<double>& xs, bool geom) {
  if (xs.empty()) return 0.0;
  if (!geom) return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double s = 0;
  size_t n = 0;
  for (double x : xs)
    if (x > 0) {
      s += std::log(x);
      ++n;
    }
  return n ? std::exp(s / static_cast<double>(n)) : 0.0;
}

// Least squares fit of log(pins) against log(size) over the window
// size <= max_size.
void fit_loglog(const std::vector<RentLevel>& levels, double max_size, double& p, double& k) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t n = 0;
  for (const RentLevel& lvl : levels) {
    if (lvl.size <= 0 || lvl.pins <= 0 || lvl.size > max_size) continue;
    double x = std::log(lvl.size), y = std::log(lvl.pins);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) {
    p = 0;
    k = 0;
    return;
  }
  double dn = static_cast<double>(n);
  double denom = dn * sxx - sx * sx;
  p = denom == 0 ? 0 : (dn * sxy - sx * sy) / denom;
  k = std::exp((sy - p * sx) / dn);
}

struct Range {
  uint32_t begin, end;
  uint32_t size() const { return end - begin; }
};

// Restricts the netlist to one block and bisects it; `order` is permuted so
// the block range splits into [begin, begin+n0) and [begin+n0, end).
uint32_t split_block(const Netlist& nl, std::vector<uint32_t>& order,
                     std::vector<uint32_t>& local_id, const std::vector<uint32_t>& block_of,
                     uint32_t block, Range r, uint64_t seed) {
  uint32_t m = r.size();
  for (uint32_t i = r.begin; i < r.end; ++i) local_id[order[i]] = i - r.begin;

  std::vector<uint32_t> nets;
  for (uint32_t i = r.begin; i < r.end; ++i) {
    uint32_t v = order[i];
    const CellMaster& cm = nl.master_of(v);
    for (uint32_t pin = 0; pin < cm.pins.size(); ++pin) {
      uint32_t net = nl.pin_net(v, pin);
      if (net != kNone && !nl.net_is_clock(net)) nets.push_back(net);
    }
  }
  std::sort(nets.begin(), nets.end());
  nets.erase(std::unique(nets.begin(), nets.end()), nets.end());

  HyperGraph hg;
  hg.n_vertices = m;
  std::vector<uint32_t> members;
  for (uint32_t net : nets) {
    members.clear();
    const Net& nn = nl.net(net);
    auto consider = [&](const Endpoint& e) {
      if (!e.is_port() && block_of[e.inst] == block) members.push_back(local_id[e.inst]);
    };
    for (const Endpoint& d : nn.drivers) consider(d);
    for (const Endpoint& s : nn.sinks) consider(s);
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.size() < 2) continue;
    hg.nv.insert(hg.nv.end(), members.begin(), members.end());
    hg.nv_off.push_back(static_cast<uint32_t>(hg.nv.size()));
  }
  // transpose into vertex -> net lists
  std::vector<uint32_t> deg(m + 1, 0);
  for (uint32_t u : hg.nv) ++deg[u + 1];
  for (uint32_t u = 0; u < m; ++u) deg[u + 1] += deg[u];
  hg.vnet_off.assign(deg.begin(), deg.end());
  hg.vnet.resize(hg.nv.size());
  std::vector<uint32_t> cur(hg.vnet_off.begin(), hg.vnet_off.end() - 1);
  for (uint32_t e = 0; e < hg.n_nets(); ++e)
    for (uint32_t i = hg.nv_off[e]; i < hg.nv_off[e + 1]; ++i) hg.vnet[cur[hg.nv[i]]++] = e;

  BisectResult bs = fm_bisect(hg, seed);
  std::stable_partition(order.begin() + r.begin, order.begin() + r.end,
                        [&](uint32_t v) { return bs.side[local_id[v]] == 0; });
  uint32_t n0 = 0;
  for (uint8_t s : bs.side) n0 += s == 0;
  return n0;
}

// Weighted cluster-graph view of a netlist for traversal sampling. Nets that
// can never separate anything (clock, or private to one portless node) are
// dropped; the rest keep their identity across coarsening, so the pin count
// of a set of nodes on any view equals the type-2 pin count of the folded
// instances on the netlist.
struct TravGraph {
  uint32_t n = 0;
  std::vector<uint32_t> weight;             // instances folded into each node
  std::vector<uint32_t> vnet_off{0}, vnet;  // node -> incident nets
  std::vector<uint32_t> nv_off{0}, nv;      // net -> member nodes (distinct)
  std::vector<uint8_t> has_port;            // net also touches a top-level port

  uint32_t n_nets() const { return static_cast<uint32_t>(nv_off.size() - 1); }
  uint32_t deg(uint32_t v) const { return vnet_off[v + 1] - vnet_off[v]; }
  uint32_t members(uint32_t e) const { return nv_off[e + 1] - nv_off[e]; }
};

void trav_transpose(TravGraph& g) {
  std::vector<uint32_t> deg(g.n + 1, 0);
  for (uint32_t u : g.nv) ++deg[u + 1];
  for (uint32_t u = 0; u < g.n; ++u) deg[u + 1] += deg[u];
  g.vnet_off.assign(deg.begin(), deg.end());
  g.vnet.resize(g.nv.size());
  std::vector<uint32_t> cur(g.vnet_off.begin(), g.vnet_off.end() - 1);
  for (uint32_t e = 0; e < g.n_nets(); ++e)
    for (uint32_t i = g.nv_off[e]; i < g.nv_off[e + 1]; ++i) g.vnet[cur[g.nv[i]]++] = e;
}

TravGraph trav_base_graph(const Netlist& nl) {
  TravGraph g;
  g.n = nl.n_instances();
  g.weight.assign(g.n, 1);
  std::vector<uint32_t> seen(g.n, UINT32_MAX);
  std::vector<uint32_t> members;
  for (uint32_t e = 0; e < nl.n_nets(); ++e) {
    if (nl.net_is_clock(e)) continue;
    const Net& nn = nl.net(e);
    members.clear();
    bool port = false;
    auto scan = [&](const Endpoint& ep) {
      if (ep.is_port()) {
        port = true;
      } else if (seen[ep.inst] != e) {
        seen[ep.inst] = e;
        members.push_back(ep.inst);
      }
    };
    for (const Endpoint& d : nn.drivers) scan(d);
    for (const Endpoint& s : nn.sinks) scan(s);
    if (members.empty() || (members.size() == 1 && !port)) continue;
    g.nv.insert(g.nv.end(), members.begin(), members.end());
    g.nv_off.push_back(static_cast<uint32_t>(g.nv.size()));
    g.has_port.push_back(port ? 1 : 0);
  }
  trav_transpose(g);
  return g;
}

// One coarsening step: heavy-edge matching (as in the bisector) followed by
// contraction. Single-member nets survive only if they reach a port.
// `map_out` records the coarse node each fine node folds into.
TravGraph trav_coarsen(const TravGraph& g, uint64_t seed, std::vector<uint32_t>& map_out) {
  const uint32_t n = g.n;
  std::vector<uint32_t> mate(n, n);
  Rng rng(seed);
  std::vector<uint32_t> perm(n);
  for (uint32_t v = 0; v < n; ++v) perm[v] = v;
  for (uint32_t v = n; v-- > 1;) std::swap(perm[v], perm[rng.below(v + 1)]);

  std::vector<double> score(n, 0.0);
  std::vector<uint32_t> touched;
  for (uint32_t pi = 0; pi < n; ++pi) {
    uint32_t v = perm[pi];
    if (mate[v] != n) continue;
    touched.clear();
    for (uint32_t i = g.vnet_off[v]; i < g.vnet_off[v + 1]; ++i) {
      uint32_t e = g.vnet[i];
      uint32_t sz = g.members(e);
      if (sz < 2 || sz > 64) continue;
      double wgt = 1.0 / static_cast<double>(sz - 1);
      for (uint32_t j = g.nv_off[e]; j < g.nv_off[e + 1]; ++j) {
        uint32_t u = g.nv[j];
        if (u == v || mate[u] != n) continue;
        if (score[u] == 0.0) touched.push_back(u);
        score[u] += wgt;
      }
    }
    uint32_t best = n;
    double best_score = 0.0;
    for (uint32_t u : touched) {
      if (score[u] > best_score || (score[u] == best_score && u < best)) {
        best = u;
        best_score = score[u];
      }
      score[u] = 0.0;
    }
    if (best != n) {
      mate[v] = best;
      mate[best] = v;
    } else {
      mate[v] = v;
    }
  }

  TravGraph c;
  map_out.assign(n, 0);
  std::vector<uint32_t>& map = map_out;
  uint32_t nc = 0;
  for (uint32_t v = 0; v < n; ++v) {
    if (mate[v] >= v)
      map[v] = nc++;
    else
      map[v] = map[mate[v]];
  }
  c.n = nc;
  c.weight.assign(nc, 0);
  for (uint32_t v = 0; v < n; ++v) c.weight[map[v]] += g.weight[v];

  std::vector<uint32_t> stamp(nc, UINT32_MAX);
  for (uint32_t e = 0; e < g.n_nets(); ++e) {
    size_t start = c.nv.size();
    for (uint32_t i = g.nv_off[e]; i < g.nv_off[e + 1]; ++i) {
      uint32_t cu = map[g.nv[i]];
      if (stamp[cu] != e) {
        stamp[cu] = e;
        c.nv.push_back(cu);
      }
    }
    size_t got = c.nv.size() - start;
    if (got >= 2 || (got == 1 && g.has_port[e])) {
      c.nv_off.push_back(static_cast<uint32_t>(c.nv.size()));
      c.has_port.push_back(g.has_port[e]);
    } else {
      c.nv.resize(start);
    }
  }
  trav_transpose(c);
  return c;
}

// Greedy region growth on one view: repeatedly absorb the node whose
// absorption changes the boundary pin count the least, newest candidates
// first among ties so the walk keeps consuming the cluster it is in. Jumps
// to a fresh random node when the frontier empties. After growth the ball
// is polished by boundary swaps while they lower the pin count. A walk is
// reusable: clear() restores the empty state without reallocating.
struct TravWalk {
  const TravGraph& g;
  Rng rng;
  std::vector<uint8_t> in_ball;
  std::vector<uint32_t> net_in;
  std::vector<int32_t> gain;  // pin-count drop if the node were absorbed
  std::priority_queue<std::tuple<int32_t, uint64_t, uint32_t>> heap;
  uint64_t pushes = 0;
  uint64_t count = 0;  // instances (node weights) inside the ball
  uint64_t pins = 0;   // nets touching both the ball and anything outside
  std::vector<uint32_t> ball;     // absorb history; compact_ball() dedupes
  std::vector<uint32_t> touched;  // nets that have ever reached the boundary
  std::vector<uint32_t> net_stamp, node_stamp;
  uint32_t epoch = 0;

  TravWalk(const TravGraph& gr, uint64_t seed)
      : g(gr),
        rng(seed),
        in_ball(gr.n, 0),
        net_in(gr.n_nets(), 0),
        gain(gr.n, 0),
        net_stamp(gr.n_nets(), 0),
        node_stamp(gr.n, 0) {
    for (uint32_t v = 0; v < g.n; ++v) gain[v] = -static_cast<int32_t>(g.deg(v));
  }

  void absorb(uint32_t v) {
    in_ball[v] = 1;
    count += g.weight[v];
    ball.push_back(v);
    for (uint32_t i = g.vnet_off[v]; i < g.vnet_off[v + 1]; ++i) {
      uint32_t e = g.vnet[i];
      uint32_t full = g.members(e);
      ++net_in[e];
      if (net_in[e] == 1) {
        // new boundary net: it no longer opens for the other members
        ++pins;
        touched.push_back(e);
        for (uint32_t j = g.nv_off[e]; j < g.nv_off[e + 1]; ++j) {
          uint32_t u = g.nv[j];
          if (in_ball[u]) continue;
          ++gain[u];
          heap.emplace(gain[u], ++pushes, u);
        }
      }
      if (net_in[e] + 1 == full && !g.has_port[e]) {
        // one member left outside: absorbing it would close the net
        for (uint32_t j = g.nv_off[e]; j < g.nv_off[e + 1]; ++j) {
          uint32_t u = g.nv[j];
          if (!in_ball[u]) {
            ++gain[u];
            heap.emplace(gain[u], ++pushes, u);
            break;
          }
        }
      } else if (net_in[e] == full && !g.has_port[e]) {
        --pins;
      }
    }
  }

  void expel(uint32_t v) {
    in_ball[v] = 0;
    count -= g.weight[v];
    for (uint32_t i = g.vnet_off[v]; i < g.vnet_off[v + 1]; ++i) {
      uint32_t e = g.vnet[i];
      if (net_in[e] == g.members(e) && !g.has_port[e]) ++pins;  // reopens
      --net_in[e];
      if (net_in[e] == 0) --pins;  // stopped touching the ball
    }
  }

  // Drop expelled and duplicate entries from the absorb history.
  const std::vector<uint32_t>& compact_ball() {
    ++epoch;
    size_t keep = 0;
    for (uint32_t v : ball) {
      if (!in_ball[v] || node_stamp[v] == epoch) continue;
      node_stamp[v] = epoch;
      ball[keep++] = v;
    }
    ball.resize(keep);
    return ball;
  }

  // Empty the ball and reset the incremental state touched by past growth,
  // without the O(graph) cost of reconstruction.
  void clear() {
    ++epoch;
    for (uint32_t e : touched) {
      if (net_stamp[e] == epoch) continue;
      net_stamp[e] = epoch;
      for (uint32_t j = g.nv_off[e]; j < g.nv_off[e + 1]; ++j) {
        uint32_t u = g.nv[j];
        gain[u] = -static_cast<int32_t>(g.deg(u));
      }
    }
    for (uint32_t v : ball) {
      if (in_ball[v]) expel(v);
    }
    ball.clear();
    touched.clear();
    heap = {};
  }

  // Pin-count change if u joined (outside) or left (inside) the ball.
  int32_t move_delta(uint32_t u) const {
    int32_t d = 0;
    for (uint32_t i = g.vnet_off[u]; i < g.vnet_off[u + 1]; ++i) {
      uint32_t e = g.vnet[i];
      uint32_t full = g.members(e);
      if (in_ball[u]) {
        if (net_in[e] == full && !g.has_port[e])
          ++d;
        else if (net_in[e] == 1)
          --d;
      } else {
        if (net_in[e] == 0)
          ++d;
        else if (net_in[e] + 1 == full && !g.has_port[e])
          --d;
      }
    }
    return d;
  }

  // Swap the most promising outside/inside boundary pair while the ball's
  // pin count strictly drops. Leaves gain[] and the heap stale, so growth
  // must not resume afterwards (each checkpoint starts from clear()).
  void polish() {
    compact_ball();
    const int cap = 32 + static_cast<int>(ball.size() / 4);
    for (int swaps = 0; swaps < cap; ++swaps) {
      ++epoch;
      uint32_t best_a = g.n, best_r = g.n;
      int32_t best_ad = 0, best_rd = 0;
      for (uint32_t e : touched) {
        if (net_stamp[e] == epoch) continue;
        net_stamp[e] = epoch;
        if (net_in[e] == 0) continue;                               // stale entry
        if (net_in[e] == g.members(e) && !g.has_port[e]) continue;  // internal now
        for (uint32_t j = g.nv_off[e]; j < g.nv_off[e + 1]; ++j) {
          uint32_t u = g.nv[j];
          if (node_stamp[u] == epoch) continue;
          node_stamp[u] = epoch;
          int32_t d = move_delta(u);
          if (in_ball[u]) {
            if (best_r == g.n || d < best_rd || (d == best_rd && u < best_r)) {
              best_r = u;
              best_rd = d;
            }
          } else if (best_a == g.n || d < best_ad || (d == best_ad && u < best_a)) {
            best_a = u;
            best_ad = d;
          }
        }
      }
      if (best_a == g.n || best_r == g.n || best_ad + best_rd >= 0) break;
      uint64_t before = pins;
      absorb(best_a);
      expel(best_r);
      if (pins >= before) {  // shared nets made the estimate optimistic
        expel(best_a);
        absorb(best_r);
        break;
      }
    }
  }

  void grow_to(uint64_t target) {
    while (count < target) {
      uint32_t v = g.n;
      while (!heap.empty()) {
        auto [sc, ord, u] = heap.top();
        (void)ord;
        heap.pop();
        if (!in_ball[u] && gain[u] == sc) {
          v = u;
          break;
        }
      }
      if (v == g.n) {  // fresh component (or the very first seed)
        uint32_t r = static_cast<uint32_t>(rng.below(g.n));
        while (in_ball[r]) r = r + 1 == g.n ? 0 : r + 1;
        v = r;
      }
      absorb(v);
    }
  }
};

}  // namespace

RentEstimate rent_by_partitioning(const Netlist& nl, const RentOptions& opt) {
  RentEstimate est;
  const uint32_t n = nl.n_instances();
  if (n == 0) return est;

  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<uint32_t> local_id(n, 0);
  std::vector<uint32_t> block_of(n, 0);
  std::vector<Range> blocks{{0, n}};

  for (int level = 0;; ++level) {
    for (uint32_t b = 0; b < blocks.size(); ++b)
      for (uint32_t i = blocks[b].begin; i < blocks[b].end; ++i) block_of[order[i]] = b;

    BlockPins bp = count_block_pins(nl, block_of, static_cast<uint32_t>(blocks.size()));
    const std::vector<uint64_t>& pins = bp.by_type(opt.pin_type);
    std::vector<double> sizes_d(blocks.size()), pins_d(blocks.size());
    for (uint32_t b = 0; b < blocks.size(); ++b) {
      sizes_d[b] = blocks[b].size();
      pins_d[b] = static_cast<double>(pins[b]);
    }
    est.levels.push_back(
        {mean_of(sizes_d, opt.geom_mean), mean_of(pins_d, opt.geom_mean), blocks.size()});

    bool any_split = false;
    for (const Range& r : blocks)
      if (r.size() >= 2) any_split = true;
    if (!any_split) break;

    // Child slot layout is fixed up front so the parallel loop is
    // deterministic regardless of scheduling.
    std::vector<uint32_t> child_off(blocks.size() + 1, 0);
    for (uint32_t b = 0; b < blocks.size(); ++b)
      child_off[b + 1] = child_off[b] + (blocks[b].size() >= 2 ? 2 : 1);
    std::vector<Range> next(child_off.back());
    uint64_t level_seed = hash_mix(opt.seed, static_cast<uint64_t>(level));

#pragma omp parallel for schedule(dynamic) if (opt.parallel)
    for (int64_t b = 0; b < static_cast<int64_t>(blocks.size()); ++b) {
      Range r = blocks[b];
      if (r.size() < 2) {
        next[child_off[b]] = r;
        continue;
      }
      uint32_t n0 = split_block(nl, order, local_id, block_of, static_cast<uint32_t>(b), r,
                                hash_mix(level_seed, static_cast<uint64_t>(b)));
      next[child_off[b]] = {r.begin, r.begin + n0};
      next[child_off[b] + 1] = {r.begin + n0, r.end};
    }
    blocks = std::move(next);
  }

  fit_loglog(est.levels, opt.r_ratio * static_cast<double>(n), est.p, est.k);
  return est;
}

RentEstimate rent_by_traversal(const Netlist& nl, const RentOptions& opt) {
  RentEstimate est;
  const uint32_t n = nl.n_instances();
  if (n == 0) return est;
  constexpr int kSamples = 32;

  // Cluster size grid: powers of two from 2 up to the Region-1 cutoff.
  const uint64_t grid_max =
      std::max<uint64_t>(2, static_cast<uint64_t>(opt.r_ratio * static_cast<double>(n)));
  std::vector<uint64_t> targets;
  for (uint64_t t = 2; t <= grid_max && t <= n; t *= 2) targets.push_back(t);
  if (targets.empty()) targets.push_back(std::min<uint64_t>(2, n));
  const size_t n_ck = targets.size();

  // Build the instance-level graph, then a chain of coarsened views. Large
  // clusters are grown on a view whose nodes are themselves small clusters:
  // contracted nets make cluster membership visible to the greedy gain, so
  // the walk follows the hierarchy instead of nibbling its whole boundary.
  // Surviving nets map one-to-one onto netlist nets, so a walk's pin count
  // is exact at every scale. child_off/child record, for every view, which
  // nodes of the next finer view each node folds together.
  constexpr uint32_t kBallNodes = 48;    // resolution: nodes per grown ball
  constexpr double kRefineNodes = 16384;  // resolution limit for refinement
  std::vector<TravGraph> views;
  views.push_back(trav_base_graph(nl));
  std::vector<std::vector<uint32_t>> child_off(1), child(1);
  while (views.back().n > kBallNodes) {
    std::vector<uint32_t> map;
    TravGraph next = trav_coarsen(views.back(), hash_mix(opt.seed, 0xB0B + views.size()), map);
    if (next.n + views.back().n / 20 > views.back().n) break;
    std::vector<uint32_t> off(next.n + 1, 0), kids(map.size());
    for (uint32_t m : map) ++off[m + 1];
    for (uint32_t i = 0; i < next.n; ++i) off[i + 1] += off[i];
    std::vector<uint32_t> cur(off.begin(), off.end() - 1);
    for (uint32_t v = 0; v < map.size(); ++v) kids[cur[map[v]]++] = v;
    child_off.push_back(std::move(off));
    child.push_back(std::move(kids));
    views.push_back(std::move(next));
  }

  // Pick, per target size, the coarsest view that still gives the ball at
  // least ~48 nodes of resolution.
  std::vector<size_t> view_of(n_ck, 0);
  for (size_t ck = 0; ck < n_ck; ++ck)
    for (size_t li = 0; li < views.size(); ++li) {
      double mean_w = static_cast<double>(n) / static_cast<double>(views[li].n);
      if (mean_w <= static_cast<double>(targets[ck]) / kBallNodes) view_of[ck] = li;
    }

  std::vector<std::vector<double>> pins_at(n_ck, std::vector<double>(kSamples, 0.0));
  std::vector<std::vector<double>> size_at(n_ck, std::vector<double>(kSamples, 0.0));

#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (int idx = 0; idx < kSamples; ++idx) {
    std::vector<std::unique_ptr<TravWalk>> walks(views.size());
    auto walk_at = [&](size_t li) -> TravWalk& {
      if (!walks[li])
        walks[li] = std::make_unique<TravWalk>(
            views[li],
            hash_mix(hash_mix(opt.seed, static_cast<uint64_t>(idx)), static_cast<uint64_t>(li)));
      else
        walks[li]->clear();
      return *walks[li];
    };
    for (size_t ck = 0; ck < n_ck; ++ck) {
      TravWalk& top = walk_at(view_of[ck]);
      top.grow_to(targets[ck]);
      top.polish();
      // Project the ball down the view chain, re-polishing its boundary at
      // each finer scale, until a ball would exceed the refinement budget.
      size_t lv = view_of[ck];
      while (lv > 0 && static_cast<double>(targets[ck]) * static_cast<double>(views[lv - 1].n) <=
                           kRefineNodes * static_cast<double>(n)) {
        const std::vector<uint32_t>& coarse = walks[lv]->compact_ball();
        TravWalk& fine = walk_at(lv - 1);
        for (uint32_t u : coarse)
          for (uint32_t i = child_off[lv][u]; i < child_off[lv][u + 1]; ++i)
            fine.absorb(child[lv][i]);
        fine.polish();
        --lv;
      }
      size_at[ck][idx] = static_cast<double>(walks[lv]->count);
      pins_at[ck][idx] = static_cast<double>(walks[lv]->pins);
    }
  }

  for (size_t ck = 0; ck < n_ck; ++ck)
    est.levels.push_back(
        {mean_of(size_at[ck], opt.geom_mean), mean_of(pins_at[ck], opt.geom_mean), kSamples});
  fit_loglog(est.levels, opt.r_ratio * static_cast<double>(n), est.p, est.k);
  return est;
}

}  // namespace sn
