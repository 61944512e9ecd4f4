#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "synthnet/cluster.hpp"
#include "synthnet/netgen.hpp"
#include "synthnet/pipo.hpp"

namespace sn {

IoSample sample_io(uint64_t size, double t_avg, double p, double sigma_p, double g_avg,
                   double sigma_g, Rng& rng) {
  double mu = t_avg * std::pow(static_cast<double>(size), p);
  double sigma = sigma_p == 0.0 ? 0.0 : std::pow(static_cast<double>(size), sigma_p);
  int64_t t = std::max<int64_t>(2, round_even(rng.normal(mu, sigma)));
  double g = std::clamp(rng.normal(g_avg, sigma_g), 0.0, 1.0);
  int64_t o = std::clamp<int64_t>(round_even(static_cast<double>(t) * g), 1, t - 1);
  return {static_cast<uint32_t>(t), static_cast<uint32_t>(t - o), static_cast<uint32_t>(o)};
}

NetPlan plan_net_counts(int64_t d_out, int64_t d_in) {
  NetPlan plan;
  if (d_out < 0) {
    d_out = 0;
    ++plan.clamps;
  }
  if (d_in < 0) {
    d_in = 0;
    ++plan.clamps;
  }
  int64_t internal = d_out > d_in ? (d_out + d_in) / 2 : d_out;
  int64_t external = d_in - internal;
  if (external < 0) {
    external = 0;
    ++plan.clamps;
  }
  plan.internal = static_cast<uint64_t>(internal);
  plan.external = static_cast<uint64_t>(external);
  return plan;
}

uint64_t plan_ff_budget(double s_ratio, uint64_t size, uint64_t ff_count) {
  double want = std::floor(s_ratio * static_cast<double>(size)) - static_cast<double>(ff_count);
  return want <= 0.0 ? 0 : static_cast<uint64_t>(want);
}

namespace {

constexpr uint32_t kPortFlag = 0x80000000u;

struct InStub {
  uint32_t key;   // global pin id, or child input port id | kPortFlag
  uint32_t inst;  // pin owner; kNone for port stubs
  bool is_port() const { return key & kPortFlag; }
  uint32_t port() const { return key & ~kPortFlag; }
};

struct Pool {
  std::vector<uint32_t> outs;  // nets whose drivers sit inside the block
  std::vector<InStub> ins;
  uint64_t size_total = 0;  // instances in the block, nested modules included
  uint64_t size_own = 0;    // instances owned by the module being generated
  uint64_t ff = 0;          // flip-flops placed inside the block
};

bool comb(const Netlist& nl, uint32_t inst) { return !nl.is_path_boundary(inst); }

struct Gen {
  Netlist& nl;
  const CellLibrary& lib;
  const SpecParams& root;
  GenReport& rep;

  // Per-instance longest-path bookkeeping. up/dn count combinational
  // instances (self included) between the instance and the nearest path
  // boundary; um/dm are the macro-anchored variants, -1 when no macro lies
  // on that side. Values are upper bounds: connections raise them
  // monotonically and flip-flop insertion leaves them conservatively stale.
  std::vector<int16_t> up{}, dn{}, um{}, dm{};
  std::vector<int16_t> net_max_dn{};  // deepest connected sink per net
  std::vector<uint32_t> mark{};       // cycle-probe stamps
  uint32_t epoch = 0;

  uint32_t new_instance(uint32_t master, uint32_t module) {
    uint32_t inst = nl.add_instance(master, module);
    int16_t base = nl.is_path_boundary(inst) ? 0 : 1;
    up.push_back(base);
    dn.push_back(base);
    um.push_back(nl.is_macro(inst) ? 0 : -1);
    dm.push_back(nl.is_macro(inst) ? 0 : -1);
    mark.push_back(0);
    return inst;
  }
};

struct ModState {
  uint32_t module = 0;
  const SpecParams* spec = nullptr;
  Rng rng{1};
  double t_avg_eff = 0.0;
  double s_eff = 0.0;
  std::vector<uint32_t> q_seq;  // pre-created sequential instances, FIFO
  size_t q_head = 0;
  std::vector<uint32_t> my_nets;  // nets created while generating this module

  uint32_t new_net(Gen& g) {
    uint32_t net = g.nl.add_net(module);
    g.net_max_dn.push_back(0);
    my_nets.push_back(net);
    return net;
  }
};

int up_of_net(const Gen& g, uint32_t net) {
  const Endpoint& d = g.nl.net(net).drivers.front();
  return d.is_port() ? 0 : g.up[d.inst];
}

int um_of_net(const Gen& g, uint32_t net) {
  const Endpoint& d = g.nl.net(net).drivers.front();
  return d.is_port() ? -1 : g.um[d.inst];
}

uint32_t net_driver_inst(const Gen& g, uint32_t net) {
  const Endpoint& d = g.nl.net(net).drivers.front();
  return d.is_port() ? kNone : d.inst;
}

// Max down-depth (and macro variant) over every pin the stub would connect.
void stub_depth(const Gen& g, const InStub& s, int& dn_out, int& dm_out) {
  if (!s.is_port()) {
    dn_out = g.dn[s.inst];
    dm_out = g.dm[s.inst];
    return;
  }
  dn_out = 0;
  dm_out = -1;
  std::vector<uint32_t> stack{s.port()};
  while (!stack.empty()) {
    const Port& p = g.nl.port(stack.back());
    stack.pop_back();
    for (uint32_t pin : p.pins) {
      uint32_t inst = g.nl.pin_inst(pin);
      dn_out = std::max<int>(dn_out, g.dn[inst]);
      dm_out = std::max<int>(dm_out, g.dm[inst]);
    }
    stack.insert(stack.end(), p.inner.begin(), p.inner.end());
  }
}

// True when a combinational path from `from` to `target` exists. Along any
// combinational edge `up` strictly increases, so only nodes with
// up < up[target] are expanded.
bool probe_reaches(Gen& g, uint32_t from, uint32_t target) {
  if (from == target) return true;
  if (!comb(g.nl, from) || !comb(g.nl, target)) return false;
  if (g.up[from] >= g.up[target]) return false;
  if (++g.epoch == 0) {
    std::fill(g.mark.begin(), g.mark.end(), 0);
    g.epoch = 1;
  }
  std::vector<uint32_t> stack{from};
  g.mark[from] = g.epoch;
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    const CellMaster& m = g.nl.master_of(v);
    for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
      if (m.pins[pin].dir != PinDir::kOutput) continue;
      uint32_t net = g.nl.pin_net(v, pin);
      if (net == kNone) continue;
      for (const Endpoint& s : g.nl.net(net).sinks) {
        if (s.is_port()) continue;
        uint32_t k = s.inst;
        if (k == target) return true;
        if (!comb(g.nl, k) || g.mark[k] == g.epoch || g.up[k] >= g.up[target]) continue;
        g.mark[k] = g.epoch;
        stack.push_back(k);
      }
    }
  }
  return false;
}

// Monotone forward relaxation after raising up/um of `j`.
void raise_up(Gen& g, uint32_t j, int new_up, int new_um) {
  if (!comb(g.nl, j)) return;
  bool changed = false;
  if (new_up > g.up[j]) {
    g.up[j] = static_cast<int16_t>(new_up);
    changed = true;
  }
  if (new_um > g.um[j]) {
    g.um[j] = static_cast<int16_t>(new_um);
    changed = true;
  }
  if (!changed) return;
  std::vector<uint32_t> stack{j};
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    const CellMaster& m = g.nl.master_of(v);
    for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
      if (m.pins[pin].dir != PinDir::kOutput) continue;
      uint32_t net = g.nl.pin_net(v, pin);
      if (net == kNone) continue;
      for (const Endpoint& s : g.nl.net(net).sinks) {
        if (s.is_port() || !comb(g.nl, s.inst)) continue;
        uint32_t k = s.inst;
        bool ch = false;
        if (g.up[v] + 1 > g.up[k]) {
          g.up[k] = static_cast<int16_t>(g.up[v] + 1);
          ch = true;
        }
        if (g.um[v] >= 0 && g.um[v] + 1 > g.um[k]) {
          g.um[k] = static_cast<int16_t>(g.um[v] + 1);
          ch = true;
        }
        if (ch) stack.push_back(k);
      }
    }
  }
}

// Monotone backward relaxation after raising dn/dm of `d`.
void raise_dn(Gen& g, uint32_t d, int new_dn, int new_dm) {
  if (!comb(g.nl, d)) return;
  bool changed = false;
  if (new_dn > g.dn[d]) {
    g.dn[d] = static_cast<int16_t>(new_dn);
    changed = true;
  }
  if (new_dm > g.dm[d]) {
    g.dm[d] = static_cast<int16_t>(new_dm);
    changed = true;
  }
  if (!changed) return;
  std::vector<uint32_t> stack{d};
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    const CellMaster& m = g.nl.master_of(v);
    for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
      if (m.pins[pin].dir != PinDir::kInput) continue;
      uint32_t net = g.nl.pin_net(v, pin);
      if (net == kNone || g.nl.net(net).drivers.empty()) continue;
      const Endpoint& drv = g.nl.net(net).drivers.front();
      if (drv.is_port() || !comb(g.nl, drv.inst)) continue;
      uint32_t k = drv.inst;
      bool ch = false;
      if (g.dn[v] + 1 > g.dn[k]) {
        g.dn[k] = static_cast<int16_t>(g.dn[v] + 1);
        ch = true;
      }
      if (g.dm[v] >= 0 && g.dm[v] + 1 > g.dm[k]) {
        g.dm[k] = static_cast<int16_t>(g.dm[v] + 1);
        ch = true;
      }
      if (ch) stack.push_back(k);
    }
  }
}

// Connects the stub (pin or whole child-port tree) to `net` and folds the
// new paths into the depth bookkeeping.
void connect_stub(Gen& g, uint32_t net, const InStub& s) {
  int u = up_of_net(g, net);
  int umn = um_of_net(g, net);
  uint32_t drv = net_driver_inst(g, net);
  if (!s.is_port()) {
    g.nl.connect_sink(net, s.inst, s.key - g.nl.instance(s.inst).pin_offset);
    raise_up(g, s.inst, u + 1, umn >= 0 ? umn + 1 : -1);
    g.net_max_dn[net] = std::max<int16_t>(g.net_max_dn[net], g.dn[s.inst]);
    if (drv != kNone)
      raise_dn(g, drv, g.dn[s.inst] + 1, g.dm[s.inst] >= 0 ? g.dm[s.inst] + 1 : -1);
    return;
  }
  connect_input_port_tree(g.nl, net, s.port());
  int dnv = 0, dmv = -1;
  std::vector<uint32_t> stack{s.port()};
  while (!stack.empty()) {
    const Port& p = g.nl.port(stack.back());
    stack.pop_back();
    for (uint32_t pin : p.pins) {
      uint32_t inst = g.nl.pin_inst(pin);
      raise_up(g, inst, u + 1, umn >= 0 ? umn + 1 : -1);
      dnv = std::max<int>(dnv, g.dn[inst]);
      dmv = std::max<int>(dmv, g.dm[inst]);
    }
    stack.insert(stack.end(), p.inner.begin(), p.inner.end());
  }
  g.net_max_dn[net] = std::max<int16_t>(g.net_max_dn[net], static_cast<int16_t>(dnv));
  if (drv != kNone) raise_dn(g, drv, dnv + 1, dmv >= 0 ? dmv + 1 : -1);
}

uint32_t ff_d_pin(const Gen& g, uint32_t ff) {
  const CellMaster& m = g.nl.master_of(ff);
  for (uint32_t pin = 0; pin < m.pins.size(); ++pin)
    if (m.pins[pin].dir == PinDir::kInput) return pin;
  throw std::logic_error("sequential master without data input");
}

uint32_t ff_q_pin(const Gen& g, uint32_t ff) {
  const CellMaster& m = g.nl.master_of(ff);
  for (uint32_t pin = 0; pin < m.pins.size(); ++pin)
    if (m.pins[pin].dir == PinDir::kOutput) return pin;
  throw std::logic_error("sequential master without output");
}

uint32_t take_ff(Gen& g, ModState& ms) {
  if (ms.q_head < ms.q_seq.size()) return ms.q_seq[ms.q_head++];
  ++g.rep.extra_ffs;
  return g.new_instance(g.lib.default_flipflop(), ms.module);
}

// Splits `net` behind a flip-flop: the old driver feeds the flip-flop's data
// input through a fresh (immediately closed) net and the flip-flop output
// takes over driving `net`. Downstream depth values stay conservatively
// stale-high. Returns the new data-side net.
uint32_t insert_ff_on(Gen& g, ModState& ms, uint32_t net) {
  uint32_t ff = take_ff(g, ms);
  Endpoint old = g.nl.net(net).drivers.front();
  uint32_t net_d = ms.new_net(g);
  g.nl.disconnect_pin(old.inst, old.index);
  g.nl.connect_driver(net_d, old.inst, old.index);
  g.nl.connect_sink(net_d, ff, ff_d_pin(g, ff));
  g.nl.connect_driver(net, ff, ff_q_pin(g, ff));
  g.net_max_dn[net_d] = 0;
  return net_d;
}

// ---------------------------------------------------------------------------
// Merge-time connection machinery.

struct Side {
  std::vector<uint32_t> outs;     // sorted deep-first each round
  std::vector<uint8_t> dead;      // skipped for the rest of this merge
  std::vector<uint32_t> retired;  // skipped outputs compacted out of `outs`
  size_t alive = 0;
  size_t cursor = 0;
  std::vector<std::vector<InStub>> buckets;  // by down-depth; last = overflow
  std::vector<size_t> bhead;
  size_t in_count = 0;
};

struct Merge {
  Gen& g;
  ModState& ms;
  int d_min, d_max, md_max;
  bool is_root;
  uint64_t budget;
  uint64_t ffs_inserted = 0;
  Side side[2] = {};

  void sort_outs(Side& s) {
    std::vector<uint32_t> alive;
    alive.reserve(s.alive);
    for (size_t i = 0; i < s.outs.size(); ++i)
      (s.dead[i] ? s.retired : alive).push_back(s.outs[i]);
    std::sort(alive.begin(), alive.end(), [&](uint32_t a, uint32_t b) {
      int ua = up_of_net(g, a), ub = up_of_net(g, b);
      if (ua != ub) return ua > ub;
      return a < b;
    });
    s.outs = std::move(alive);
    s.dead.assign(s.outs.size(), 0);
    s.alive = s.outs.size();
    s.cursor = 0;
  }

  void bucket_in(Side& s, const InStub& stub) {
    int dnv, dmv;
    stub_depth(g, stub, dnv, dmv);
    size_t b = std::min<size_t>(static_cast<size_t>(dnv), s.buckets.size() - 1);
    s.buckets[b].push_back(stub);
  }

  void init_side(Side& s, std::vector<uint32_t>&& outs, std::vector<InStub>&& ins) {
    s.outs = std::move(outs);
    s.dead.assign(s.outs.size(), 0);
    s.alive = s.outs.size();
    s.buckets.assign(static_cast<size_t>(d_max) + 2, {});
    s.bhead.assign(s.buckets.size(), 0);
    s.in_count = ins.size();
    for (const InStub& stub : ins) bucket_in(s, stub);
    sort_outs(s);
  }

  bool stub_ok(uint32_t net, int u, int umn, const InStub& stub, int dnv, int dmv) {
    uint32_t drv = net_driver_inst(g, net);
    if (!stub.is_port() && stub.inst == drv) {
      ++g.rep.cycle_rejections;
      return false;
    }
    if ((dmv >= 0 && u + dmv > md_max) || (umn >= 0 && umn + dnv > md_max)) {
      ++g.rep.macro_rejections;
      return false;
    }
    if (drv != kNone && comb(g.nl, drv)) {
      bool cyc = false;
      if (!stub.is_port()) {
        cyc = probe_reaches(g, stub.inst, drv);
      } else {
        std::vector<uint32_t> stack{stub.port()};
        while (!stack.empty() && !cyc) {
          const Port& p = g.nl.port(stack.back());
          stack.pop_back();
          for (uint32_t pin : p.pins)
            if (probe_reaches(g, g.nl.pin_inst(pin), drv)) {
              cyc = true;
              break;
            }
          stack.insert(stack.end(), p.inner.begin(), p.inner.end());
        }
      }
      if (cyc) {
        ++g.rep.cycle_rejections;
        return false;
      }
    }
    return true;
  }

  // Scans bucket b for an acceptable stub; stale entries migrate to their
  // current bucket, rejected entries rotate to the tail.
  bool scan_bucket(Side& in, uint32_t net, int u, int umn, int b, InStub& found) {
    auto& bucket = in.buckets[static_cast<size_t>(b)];
    size_t& head = in.bhead[static_cast<size_t>(b)];
    std::vector<InStub> rejected;
    bool ok = false;
    while (head < bucket.size()) {
      InStub stub = bucket[head++];
      int dnv, dmv;
      stub_depth(g, stub, dnv, dmv);
      size_t cur = std::min<size_t>(static_cast<size_t>(dnv), in.buckets.size() - 1);
      if (cur != static_cast<size_t>(b)) {  // drifted deeper since bucketing
        in.buckets[cur].push_back(stub);
        continue;
      }
      if (!stub_ok(net, u, umn, stub, dnv, dmv)) {
        rejected.push_back(stub);
        continue;
      }
      found = stub;
      ok = true;
      break;
    }
    if (head == bucket.size() && rejected.empty()) {
      bucket.clear();
      head = 0;
    }
    for (const InStub& r : rejected) bucket.push_back(r);
    return ok;
  }

  bool find_stub(Side& in, uint32_t net, int u, int umn, InStub& found, bool& dmin_missed) {
    int lo = std::max(0, d_min - u);
    int hi = d_max - u;
    dmin_missed = false;
    for (int b = lo; b <= hi; ++b)
      if (scan_bucket(in, net, u, umn, b, found)) return true;
    for (int b = std::min(lo, hi + 1) - 1; b >= 0; --b) {
      if (scan_bucket(in, net, u, umn, b, found)) {
        dmin_missed = true;
        return true;
      }
    }
    return false;
  }

  // One connection attempt for output `net`. On a full miss a flip-flop may
  // rescue the output by zeroing its up-depth; rescues draw on the block's
  // flip-flop budget except at the module root.
  bool attempt(uint32_t net, Side& in) {
    int u = up_of_net(g, net);
    int umn = um_of_net(g, net);
    InStub stub{0, 0};
    bool miss = false;
    if (!find_stub(in, net, u, umn, stub, miss)) {
      ++g.rep.depth_rejections;
      uint32_t drv = net_driver_inst(g, net);
      bool ff_helps = u > 0 || umn >= 0;
      bool local = drv != kNone && g.nl.instance(drv).module == ms.module;
      if (!ff_helps || !local || (!is_root && budget == 0)) return false;
      insert_ff_on(g, ms, net);
      ++ffs_inserted;
      if (is_root) {
        ++g.rep.root_rescue_ffs;
      } else {
        --budget;
        ++g.rep.rescue_ffs;
      }
      if (!find_stub(in, net, 0, -1, stub, miss)) return false;
    }
    if (miss) ++g.rep.dmin_misses;
    connect_stub(g, net, stub);
    --in.in_count;
    return true;
  }

  // Alternating connection loop; an output that fails is skipped for the
  // rest of the merge (its window only shrinks), successes flip direction.
  uint64_t run(uint64_t want) {
    uint64_t made = 0;
    int dir = 0;
    while (made < want) {
      bool usable0 = side[0].alive > 0 && side[1].in_count > 0;
      bool usable1 = side[1].alive > 0 && side[0].in_count > 0;
      if (!(dir == 0 ? usable0 : usable1)) {
        if (!(dir == 0 ? usable1 : usable0)) break;
        dir ^= 1;
        continue;
      }
      Side& out = side[dir];
      Side& in = side[1 - dir];
      if (out.cursor >= out.outs.size()) sort_outs(out);
      size_t idx = out.cursor++;
      if (out.dead[idx]) continue;
      if (attempt(out.outs[idx], in)) {
        ++made;
        dir ^= 1;
      } else {
        out.dead[idx] = 1;
        --out.alive;
        ++g.rep.skipped_outputs;
      }
    }
    return made;
  }

  // Collects leftovers into `dst`, hiding the `internal` deepest connected
  // nets from the surviving outputs.
  void finish(Pool& dst, uint64_t internal) {
    std::vector<uint32_t> open;
    for (Side& s : side) {
      open.insert(open.end(), s.outs.begin(), s.outs.end());
      open.insert(open.end(), s.retired.begin(), s.retired.end());
      for (size_t b = 0; b < s.buckets.size(); ++b)
        for (size_t i = s.bhead[b]; i < s.buckets[b].size(); ++i)
          dst.ins.push_back(s.buckets[b][i]);
    }
    std::vector<uint32_t> candidates;
    for (uint32_t net : open)
      if (!g.nl.net(net).sinks.empty()) candidates.push_back(net);
    std::sort(candidates.begin(), candidates.end(), [&](uint32_t a, uint32_t b) {
      int da = up_of_net(g, a) + g.net_max_dn[a];
      int db = up_of_net(g, b) + g.net_max_dn[b];
      if (da != db) return da > db;
      return a < b;
    });
    size_t hide = std::min<size_t>(internal, candidates.size());
    g.rep.hidden_made += hide;
    candidates.resize(hide);
    std::sort(candidates.begin(), candidates.end());
    for (uint32_t net : open)
      if (!std::binary_search(candidates.begin(), candidates.end(), net))
        dst.outs.push_back(net);
  }
};

// ---------------------------------------------------------------------------
// Module generation.

struct LeafRef {
  uint32_t inst = kNone;
  int child = -1;  // index into the child pool list
};

// Integer allocation of n slots across weighted masters. Largest-remainder
// rounding keeps the realized mix as close to the weights as whole instances
// allow; a seeded shuffle stops equal cells from clumping in id order.
struct Sampler {
  std::vector<uint32_t> masters;
  std::vector<double> weights;
  double total = 0.0;

  void add(uint32_t master, double w) {
    if (w <= 0.0) return;
    masters.push_back(master);
    weights.push_back(w);
    total += w;
  }
  bool empty() const { return masters.empty(); }
  std::vector<uint32_t> assign(uint64_t n, Rng& rng) const {
    std::vector<uint32_t> out;
    if (n == 0 || masters.empty()) return out;
    out.reserve(n);
    size_t k = masters.size();
    std::vector<uint64_t> quota(k);
    std::vector<std::pair<double, size_t>> rem(k);
    uint64_t used = 0;
    for (size_t i = 0; i < k; ++i) {
      double share = static_cast<double>(n) * weights[i] / total;
      quota[i] = std::min<uint64_t>(static_cast<uint64_t>(share), n);
      used += quota[i];
      rem[i] = {share - static_cast<double>(quota[i]), i};
    }
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (size_t j = 0; used < n; ++j, ++used) ++quota[rem[j % k].second];
    for (size_t i = 0; i < k; ++i) out.insert(out.end(), quota[i], masters[i]);
    for (size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
    return out;
  }
};

struct OwnMix {
  uint64_t n_own = 0;
  uint64_t pin_sum = 0;  // signal pins over own instances
};

// Creates this module's own instances: combinational and macro cells become
// clustering leaves, sequential cells queue up for later insertion.
OwnMix build_inventory(Gen& g, ModState& ms, std::vector<ClusterLeaf>& leaves,
                       std::vector<LeafRef>& refs) {
  const SpecParams& spec = *ms.spec;
  const CellLibrary& lib = g.lib;
  const CellInventory& inv = spec.inventory;
  OwnMix mix;

  auto add_leaf_inst = [&](uint32_t master) {
    uint32_t inst = g.new_instance(master, ms.module);
    uint32_t t = lib.master(master).signal_pins();
    leaves.push_back({1, t});
    refs.push_back({inst, -1});
    mix.pin_sum += t;
    ++mix.n_own;
  };
  auto add_seq_inst = [&](uint32_t master) {
    uint32_t inst = g.new_instance(master, ms.module);
    ms.q_seq.push_back(inst);
    mix.pin_sum += lib.master(master).signal_pins();
    ++mix.n_own;
  };
  auto master_of_name = [&](const std::string& name) {
    int mi = lib.find(name);
    if (mi < 0) throw std::runtime_error("spec: unknown cell '" + name + "'");
    return static_cast<uint32_t>(mi);
  };

  uint64_t n_comb = 0, n_seq = 0, n_macro = 0;
  if (!inv.counts.empty()) {
    // Exact inventory: combinational, then macros, then flip-flops.
    for (int pass = 0; pass < 3; ++pass) {
      for (const auto& [name, count] : inv.counts) {
        uint32_t m = master_of_name(name);
        const CellMaster& cm = lib.master(m);
        int cat = cm.is_sequential ? 2 : cm.is_macro ? 1 : 0;
        if (cat != pass) continue;
        for (uint64_t k = 0; k < count; ++k) cat == 2 ? add_seq_inst(m) : add_leaf_inst(m);
        (cat == 2 ? n_seq : cat == 1 ? n_macro : n_comb) += count;
      }
    }
  } else {
    uint64_t n_inst = spec.n_inst;
    n_macro = spec.n_macro;
    n_seq = static_cast<uint64_t>(std::llround(spec.s_ratio * static_cast<double>(n_inst)));
    if (n_seq + n_macro > n_inst) n_seq = n_inst - n_macro;
    n_comb = n_inst - n_seq - n_macro;

    Sampler comb_s, seq_s, mac_s;
    if (!inv.weights.empty()) {
      for (const auto& [name, w] : inv.weights) {
        uint32_t m = master_of_name(name);
        const CellMaster& cm = lib.master(m);
        (cm.is_sequential ? seq_s : cm.is_macro ? mac_s : comb_s).add(m, w);
      }
    } else {
      for (uint32_t m = 0; m < lib.size(); ++m) {
        const CellMaster& cm = lib.master(m);
        if (!cm.is_sequential && !cm.is_macro) comb_s.add(m, 1.0);
      }
    }
    if (n_seq && seq_s.empty()) seq_s.add(lib.default_flipflop(), 1.0);
    if (n_macro && mac_s.empty()) {
      int found = -1;
      for (uint32_t m = 0; m < lib.size(); ++m)
        if (lib.master(m).is_macro) {
          found = static_cast<int>(m);
          break;
        }
      if (found < 0)
        throw std::runtime_error("spec: macro instances requested but library has no macro");
      mac_s.add(static_cast<uint32_t>(found), 1.0);
    }
    if (n_comb && comb_s.empty())
      throw std::runtime_error("spec: no combinational cell available");
    for (uint32_t m : comb_s.assign(n_comb, ms.rng)) add_leaf_inst(m);
    for (uint32_t m : mac_s.assign(n_macro, ms.rng)) add_leaf_inst(m);
    for (uint32_t m : seq_s.assign(n_seq, ms.rng)) add_seq_inst(m);
  }

  g.rep.n_comb += n_comb;
  g.rep.n_seq += n_seq;
  g.rep.n_macro += n_macro;
  uint64_t total = n_comb + n_seq + n_macro;
  ms.s_eff = total ? static_cast<double>(n_seq) / static_cast<double>(total) : 0.0;
  return mix;
}

Pool inst_pool(Gen& g, ModState& ms, uint32_t inst) {
  Pool p;
  p.size_total = p.size_own = 1;
  const CellMaster& m = g.nl.master_of(inst);
  for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
    if (m.pins[pin].dir == PinDir::kOutput) {
      uint32_t net = ms.new_net(g);
      g.nl.connect_driver(net, inst, pin);
      p.outs.push_back(net);
    } else if (m.pins[pin].dir == PinDir::kInput) {
      p.ins.push_back({g.nl.instance(inst).pin_offset + pin, inst});
    }
    // clock pins wait for the final clock pass
  }
  return p;
}

Pool merge_pools(Gen& g, ModState& ms, Pool&& pa, Pool&& pb, bool is_root) {
  const SpecParams& spec = *ms.spec;
  Pool dst;
  dst.size_total = pa.size_total + pb.size_total;
  dst.size_own = pa.size_own + pb.size_own;
  dst.ff = pa.ff + pb.ff;

  IoSample io = sample_io(dst.size_total, ms.t_avg_eff, spec.p, spec.sigma_p, spec.g_avg,
                          spec.sigma_g, ms.rng);
  int64_t d_out = static_cast<int64_t>(pa.outs.size() + pb.outs.size()) - io.o;
  int64_t d_in = static_cast<int64_t>(pa.ins.size() + pb.ins.size()) - io.i;
  NetPlan plan = plan_net_counts(d_out, d_in);
  g.rep.plan_clamps += plan.clamps;
  g.rep.connections_target += plan.connections();
  g.rep.hidden_target += plan.internal;

  Merge mg{g,
           ms,
           spec.d_min,
           spec.d_max,
           spec.md_max,
           is_root,
           plan_ff_budget(ms.s_eff, dst.size_own, dst.ff)};
  mg.init_side(mg.side[0], std::move(pa.outs), std::move(pa.ins));
  mg.init_side(mg.side[1], std::move(pb.outs), std::move(pb.ins));
  g.rep.connections_made += mg.run(plan.connections());
  mg.finish(dst, plan.internal);
  dst.size_total += mg.ffs_inserted;
  dst.size_own += mg.ffs_inserted;
  dst.ff += mg.ffs_inserted;
  return dst;
}

// Exact recomputation of every up/dn/um/dm value (and per-net sink depths)
// by forward and backward topological sweeps over the whole arena.
void recompute_depths(Gen& g) {
  const Netlist& nl = g.nl;
  uint32_t n = nl.n_instances();
  std::vector<uint32_t> deg(n, 0);
  std::vector<uint32_t> queue;
  queue.reserve(n);

  auto each_pred = [&](uint32_t v, auto&& fn) {
    const CellMaster& m = nl.master_of(v);
    for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
      if (m.pins[pin].dir != PinDir::kInput) continue;
      uint32_t net = nl.pin_net(v, pin);
      if (net == kNone || nl.net(net).drivers.empty()) continue;
      const Endpoint& d = nl.net(net).drivers.front();
      if (!d.is_port()) fn(d.inst);
    }
  };
  auto each_succ = [&](uint32_t v, auto&& fn) {
    const CellMaster& m = nl.master_of(v);
    for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
      if (m.pins[pin].dir != PinDir::kOutput) continue;
      uint32_t net = nl.pin_net(v, pin);
      if (net == kNone) continue;
      for (const Endpoint& s : nl.net(net).sinks)
        if (!s.is_port()) fn(s.inst);
    }
  };

  // Forward pass: up/um.
  for (uint32_t v = 0; v < n; ++v) {
    if (!comb(nl, v)) {
      g.up[v] = g.dn[v] = 0;
      g.um[v] = g.dm[v] = nl.is_macro(v) ? 0 : -1;
      continue;
    }
    uint32_t d = 0;
    each_pred(v, [&](uint32_t p) {
      if (comb(nl, p)) ++d;
    });
    deg[v] = d;
    if (!d) queue.push_back(v);
  }
  size_t qh = 0;
  while (qh < queue.size()) {
    uint32_t v = queue[qh++];
    int bu = 0, bm = -1;
    each_pred(v, [&](uint32_t p) {
      if (comb(nl, p)) {
        bu = std::max<int>(bu, g.up[p]);
        if (g.um[p] >= 0) bm = std::max<int>(bm, g.um[p]);
      } else if (nl.is_macro(p)) {
        bm = std::max(bm, 0);
      }
    });
    g.up[v] = static_cast<int16_t>(bu + 1);
    g.um[v] = static_cast<int16_t>(bm >= 0 ? bm + 1 : -1);
    each_succ(v, [&](uint32_t k) {
      if (comb(nl, k) && --deg[k] == 0) queue.push_back(k);
    });
  }

  // Backward pass: dn/dm.
  queue.clear();
  qh = 0;
  for (uint32_t v = 0; v < n; ++v) {
    if (!comb(nl, v)) continue;
    uint32_t d = 0;
    each_succ(v, [&](uint32_t k) {
      if (comb(nl, k)) ++d;
    });
    deg[v] = d;
    if (!d) queue.push_back(v);
  }
  while (qh < queue.size()) {
    uint32_t v = queue[qh++];
    int bd = 0, bm = -1;
    each_succ(v, [&](uint32_t k) {
      if (comb(nl, k)) {
        bd = std::max<int>(bd, g.dn[k]);
        if (g.dm[k] >= 0) bm = std::max<int>(bm, g.dm[k]);
      } else if (nl.is_macro(k)) {
        bm = std::max(bm, 0);
      }
    });
    g.dn[v] = static_cast<int16_t>(bd + 1);
    g.dm[v] = static_cast<int16_t>(bm >= 0 ? bm + 1 : -1);
    each_pred(v, [&](uint32_t p) {
      if (comb(nl, p) && --deg[p] == 0) queue.push_back(p);
    });
  }

  for (uint32_t net = 0; net < nl.n_nets(); ++net) {
    int best = 0;
    for (const Endpoint& s : nl.net(net).sinks)
      if (!s.is_port()) best = std::max<int>(best, g.dn[s.inst]);
    g.net_max_dn[net] = static_cast<int16_t>(best);
  }
}

// Chains the remaining queued flip-flops head to tail; the open ends join
// the module pool as ordinary stubs.
void chain_leftovers(Gen& g, ModState& ms, Pool& pool) {
  uint32_t first_ff = kNone;
  uint32_t prev = kNone;
  while (ms.q_head < ms.q_seq.size()) {
    uint32_t ff = ms.q_seq[ms.q_head++];
    if (prev == kNone)
      first_ff = ff;
    else
      g.nl.connect_sink(prev, ff, ff_d_pin(g, ff));
    uint32_t qn = ms.new_net(g);
    g.nl.connect_driver(qn, ff, ff_q_pin(g, ff));
    prev = qn;
    ++g.rep.chain_ffs;
  }
  if (first_ff == kNone) return;
  pool.ins.push_back({g.nl.instance(first_ff).pin_offset + ff_d_pin(g, first_ff), first_ff});
  pool.outs.push_back(prev);
}

// Distributes flip-flops left in the queue after the merge phase by
// repeatedly splitting the deepest module-local net, preferring hidden nets
// over would-be outputs. Depth bookkeeping is recomputed exactly in batches.
void place_leftover_ffs(Gen& g, ModState& ms, Pool& pool) {
  uint64_t remaining = ms.q_seq.size() - ms.q_head;
  if (!remaining) return;
  g.rep.leftover_ffs += remaining;
  if (ms.my_nets.empty()) {
    chain_leftovers(g, ms, pool);
    return;
  }

  std::unordered_set<uint32_t> open_set(pool.outs.begin(), pool.outs.end());
  using Key = std::tuple<int, int, int64_t, uint32_t>;  // (hidden, depth, -net, net)
  std::priority_queue<Key> heap;
  auto key_of = [&](uint32_t net) -> Key {
    int d = up_of_net(g, net) + g.net_max_dn[net];
    return {open_set.count(net) ? 0 : 1, d, -static_cast<int64_t>(net), net};
  };
  for (uint32_t net : ms.my_nets) heap.push(key_of(net));

  uint64_t batch = std::max<uint64_t>(64, remaining / 16);
  uint64_t since = 0;
  while (ms.q_head < ms.q_seq.size() && !heap.empty()) {
    if (since == batch) {
      since = 0;
      recompute_depths(g);
      heap = {};
      for (uint32_t net : ms.my_nets) heap.push(key_of(net));
      continue;
    }
    Key top = heap.top();
    heap.pop();
    uint32_t net = std::get<3>(top);
    Key cur = key_of(net);
    if (cur != top) {  // stale entry: reinsert with the current key
      heap.push(cur);
      continue;
    }
    uint32_t net_d = insert_ff_on(g, ms, net);
    ++since;
    heap.push(key_of(net));
    heap.push(key_of(net_d));
  }
  if (ms.q_head < ms.q_seq.size()) chain_leftovers(g, ms, pool);
}

Pool gen_module(Gen& g, const SpecParams& spec, uint32_t module, const std::string& path) {
  uint64_t inst_base = g.nl.n_instances();
  ModState ms;
  ms.module = module;
  ms.spec = &spec;
  ms.rng = Rng(hash_str(g.root.seed, path));

  // Children first: each submodule is fully generated (ports matched)
  // before the parent treats it as a single clustering leaf.
  std::vector<Pool> child_pools;
  child_pools.reserve(spec.submodules.size());
  for (const SpecParams& sub : spec.submodules) {
    uint32_t child = g.nl.add_module(sub.name, module, sub.name);
    std::string sub_path = path.empty() ? sub.name : path + "/" + sub.name;
    child_pools.push_back(gen_module(g, sub, child, sub_path));
  }

  std::vector<ClusterLeaf> leaves;
  std::vector<LeafRef> refs;
  OwnMix mix = build_inventory(g, ms, leaves, refs);
  for (size_t c = 0; c < child_pools.size(); ++c) {
    const Pool& cp = child_pools[c];
    leaves.push_back({cp.size_total, static_cast<uint32_t>(cp.outs.size() + cp.ins.size())});
    refs.push_back({kNone, static_cast<int>(c)});
  }

  if (spec.t_avg > 0) {
    ms.t_avg_eff = spec.t_avg;
  } else if (mix.n_own) {
    ms.t_avg_eff = static_cast<double>(mix.pin_sum) / static_cast<double>(mix.n_own);
  } else if (!leaves.empty()) {
    double sum = 0;
    for (const ClusterLeaf& l : leaves) sum += l.terminals;
    ms.t_avg_eff = sum / static_cast<double>(leaves.size());
  } else {
    ms.t_avg_eff = 2.0;
  }

  Pool pool;
  if (!leaves.empty()) {
    ClusterConfig cfg;
    cfg.t_avg = ms.t_avg_eff;
    cfg.p = spec.p;
    cfg.sigma_p = spec.sigma_p;
    cfg.alpha = spec.alpha;
    cfg.seed = hash_str(g.root.seed, path);
    ClusterTree tree = cluster(leaves, cfg);
    levelize(tree);
    g.rep.cluster_deferrals += tree.deferrals;
    g.rep.cluster_relaxations += tree.relaxations;

    std::vector<Pool> pools(tree.nodes.size());
    for (size_t i = 0; i < leaves.size(); ++i)
      pools[i] = refs[i].inst != kNone ? inst_pool(g, ms, refs[i].inst)
                                       : std::move(child_pools[refs[i].child]);
    for (uint32_t v : internal_schedule(tree)) {
      Pool a = std::move(pools[tree.nodes[v].right]);  // first dequeued
      Pool b = std::move(pools[tree.nodes[v].left]);
      pools[v] = merge_pools(g, ms, std::move(a), std::move(b), v == tree.root);
    }
    pool = std::move(pools[tree.root]);
  }

  place_leftover_ffs(g, ms, pool);

  // Provisional ports for everything still open, in id order.
  OpenPins open;
  open.out_nets = pool.outs;
  std::sort(open.out_nets.begin(), open.out_nets.end());
  for (const InStub& s : pool.ins)
    (s.is_port() ? open.in_ports : open.in_pins).push_back(s.is_port() ? s.port() : s.key);
  std::sort(open.in_pins.begin(), open.in_pins.end());
  std::sort(open.in_ports.begin(), open.in_ports.end());
  close_module(g.nl, module, open);

  uint64_t realized = g.nl.n_instances() - inst_base;
  int64_t want_pi = spec.n_pi, want_po = spec.n_po;
  if (want_pi < 0 || want_po < 0) {
    int64_t t = std::max<int64_t>(
        2, std::llround(ms.t_avg_eff * std::pow(static_cast<double>(realized), spec.p)));
    int64_t po = std::clamp<int64_t>(round_even(static_cast<double>(t) * spec.g_avg), 1, t - 1);
    if (want_po < 0) want_po = po;
    if (want_pi < 0) want_pi = t - po;
  }
  PortMatchReport pm = match_ports(g.nl, module, static_cast<uint32_t>(want_pi),
                                   static_cast<uint32_t>(want_po));
  g.rep.ports_in_added += pm.in_added;
  g.rep.ports_in_removed += pm.in_removed;
  g.rep.ports_out_added += pm.out_added;
  g.rep.ports_out_removed += pm.out_removed;
  g.rep.ports_in_shortfall += pm.in_shortfall;
  g.rep.ports_out_shortfall += pm.out_shortfall;

  Pool facing;
  facing.size_total = realized;
  if (module != 0) {
    for (uint32_t pid : g.nl.module(module).ports) {
      const Port& p = g.nl.port(pid);
      if (p.dir == PinDir::kInput)
        facing.ins.push_back({pid | kPortFlag, kNone});
      else
        facing.outs.push_back(p.net);
    }
  }
  return facing;
}

// Single clock domain: one top-level clock input drives every clock pin in
// the arena, entering each module through a dedicated pass-through port.
void connect_clock(Gen& g) {
  Netlist& nl = g.nl;
  std::vector<std::vector<uint32_t>> direct(nl.n_modules());
  for (uint32_t v = 0; v < nl.n_instances(); ++v) {
    if (nl.master_of(v).clock_pin >= 0) direct[nl.instance(v).module].push_back(v);
  }
  bool any = false;
  for (const auto& d : direct) any = any || !d.empty();
  if (!any) return;

  uint32_t clk_net = nl.add_net(0, "clk");
  for (uint32_t mod = 0; mod < nl.n_modules(); ++mod)
    for (uint32_t v : direct[mod])
      nl.connect_sink(clk_net, v, static_cast<uint32_t>(nl.master_of(v).clock_pin));

  std::vector<uint32_t> clk_port(nl.n_modules(), kNone);
  for (uint32_t mod = nl.n_modules(); mod-- > 0;) {
    std::vector<uint32_t> inner;
    for (uint32_t child : nl.module(mod).children)
      if (clk_port[child] != kNone) inner.push_back(clk_port[child]);
    std::vector<uint32_t> pins;
    for (uint32_t v : direct[mod])
      pins.push_back(nl.instance(v).pin_offset + static_cast<uint32_t>(nl.master_of(v).clock_pin));
    if (inner.empty() && pins.empty()) continue;
    uint32_t pid = nl.add_port(mod, PinDir::kInput, "clk");
    Port& p = nl.port_mut(pid);
    p.net = clk_net;
    p.pins = std::move(pins);
    p.inner = std::move(inner);
    if (mod == 0) nl.connect_port_driver(clk_net, pid);
    clk_port[mod] = pid;
  }
}

}  // namespace

GenResult generate_netlist(const SpecParams& spec, const CellLibrary& lib) {
  SpecParams resolved = spec;
  resolve_spec_defaults(resolved);
  validate_spec(resolved);
  GenResult res{Netlist(lib, resolved.name), GenReport{}};
  Gen g{res.netlist, lib, resolved, res.report};
  gen_module(g, resolved, 0, "");
  connect_clock(g);
  return res;
}

}  // namespace sn
