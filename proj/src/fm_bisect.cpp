#include <algorithm>
#include <utility>
#include <vector>

#include "synthnet/fm_bisect.hpp"

namespace sn {

namespace {

// Gain buckets: doubly linked lists per gain value with a lazily maintained
// maximum. LIFO insertion keeps tie-breaking deterministic.
struct Buckets {
  int off = 0;
  std::vector<int32_t> head;
  std::vector<int32_t> nxt, prv;
  int cur_max = -1;

  void reset(int max_deg, uint32_t n) {
    off = max_deg;
    head.assign(static_cast<size_t>(2 * max_deg + 1), -1);
    nxt.assign(n, -1);
    prv.assign(n, -1);
    cur_max = -1;
  }
  void insert(uint32_t v, int gain) {
    int b = gain + off;
    nxt[v] = head[static_cast<size_t>(b)];
    prv[v] = -1;
    if (head[static_cast<size_t>(b)] >= 0) prv[head[static_cast<size_t>(b)]] = static_cast<int32_t>(v);
    head[static_cast<size_t>(b)] = static_cast<int32_t>(v);
    cur_max = std::max(cur_max, b);
  }
  void remove(uint32_t v, int gain) {
    int b = gain + off;
    if (prv[v] >= 0)
      nxt[prv[v]] = nxt[v];
    else
      head[static_cast<size_t>(b)] = nxt[v];
    if (nxt[v] >= 0) prv[nxt[v]] = prv[v];
  }
  int32_t top() {
    while (cur_max >= 0 && head[static_cast<size_t>(cur_max)] < 0) --cur_max;
    return cur_max < 0 ? -1 : head[static_cast<size_t>(cur_max)];
  }
  int top_gain() const { return cur_max - off; }
};

// Weighted FM refinement: the caller seeds `side`, passes keep every side at
// or above 45% of the total vertex weight.
struct Fm {
  const HyperGraph& hg;
  const std::vector<uint32_t>& w;
  uint32_t n;
  uint64_t lo;  // minimum weight a side may shrink to
  int max_deg;
  std::vector<uint8_t> side;
  std::vector<int> gain;
  std::vector<uint8_t> locked;
  std::vector<uint32_t> cnt0, cnt1;  // per net: members on each side
  uint64_t size[2] = {0, 0};
  Buckets bucket[2];
  std::vector<uint32_t> moves;

  Fm(const HyperGraph& h, const std::vector<uint32_t>& wts) : hg(h), w(wts), n(h.n_vertices) {
    uint64_t total = 0;
    for (uint32_t v = 0; v < n; ++v) total += w[v];
    lo = std::max<uint64_t>(1, total * 45 / 100);
    max_deg = 1;
    for (uint32_t v = 0; v < n; ++v)
      max_deg = std::max<int>(max_deg, static_cast<int>(hg.vnet_off[v + 1] - hg.vnet_off[v]));
  }

  uint32_t& cnt(int s, uint32_t net) { return s == 0 ? cnt0[net] : cnt1[net]; }

  void init_counts() {
    cnt0.assign(hg.n_nets(), 0);
    cnt1.assign(hg.n_nets(), 0);
    size[0] = size[1] = 0;
    for (uint32_t v = 0; v < n; ++v) size[side[v]] += w[v];
    for (uint32_t e = 0; e < hg.n_nets(); ++e)
      for (uint32_t i = hg.nv_off[e]; i < hg.nv_off[e + 1]; ++i) ++cnt(side[hg.nv[i]], e);
  }

  uint64_t compute_cut() const {
    uint64_t cut = 0;
    for (uint32_t e = 0; e < hg.n_nets(); ++e)
      if (cnt0[e] > 0 && cnt1[e] > 0) ++cut;
    return cut;
  }

  void bump(uint32_t u, int d) {
    bucket[side[u]].remove(u, gain[u]);
    gain[u] += d;
    bucket[side[u]].insert(u, gain[u]);
  }

  void apply_move(uint32_t v) {
    int f = side[v], t = 1 - f;
    for (uint32_t i = hg.vnet_off[v]; i < hg.vnet_off[v + 1]; ++i) {
      uint32_t e = hg.vnet[i];
      if (cnt(t, e) == 0) {
        for (uint32_t j = hg.nv_off[e]; j < hg.nv_off[e + 1]; ++j) {
          uint32_t u = hg.nv[j];
          if (u != v && !locked[u]) bump(u, +1);
        }
      } else if (cnt(t, e) == 1) {
        for (uint32_t j = hg.nv_off[e]; j < hg.nv_off[e + 1]; ++j) {
          uint32_t u = hg.nv[j];
          if (!locked[u] && side[u] == t) bump(u, -1);
        }
      }
      --cnt(f, e);
      ++cnt(t, e);
      if (cnt(f, e) == 0) {
        for (uint32_t j = hg.nv_off[e]; j < hg.nv_off[e + 1]; ++j) {
          uint32_t u = hg.nv[j];
          if (u != v && !locked[u]) bump(u, -1);
        }
      } else if (cnt(f, e) == 1) {
        for (uint32_t j = hg.nv_off[e]; j < hg.nv_off[e + 1]; ++j) {
          uint32_t u = hg.nv[j];
          if (!locked[u] && side[u] == f) bump(u, +1);
        }
      }
    }
    side[v] = static_cast<uint8_t>(t);
    size[f] -= w[v];
    size[t] += w[v];
  }

  // One full pass; returns the cut improvement that was kept.
  int64_t pass() {
    init_counts();
    gain.assign(n, 0);
    locked.assign(n, 0);
    bucket[0].reset(max_deg, n);
    bucket[1].reset(max_deg, n);
    for (uint32_t v = 0; v < n; ++v) {
      int gv = 0;
      int s = side[v];
      for (uint32_t i = hg.vnet_off[v]; i < hg.vnet_off[v + 1]; ++i) {
        uint32_t e = hg.vnet[i];
        if (cnt(s, e) == 1) ++gv;
        if (cnt(1 - s, e) == 0) --gv;
      }
      gain[v] = gv;
      bucket[s].insert(v, gv);
    }

    moves.clear();
    int64_t gain_sum = 0, best_sum = 0;
    size_t best_prefix = 0;
    for (;;) {
      int32_t cand[2] = {bucket[0].top(), bucket[1].top()};
      int pick = -1;
      for (int s = 0; s < 2; ++s) {
        if (cand[s] < 0) continue;
        if (size[s] < lo + w[static_cast<uint32_t>(cand[s])]) continue;
        if (pick < 0 || bucket[s].top_gain() > bucket[pick].top_gain() ||
            (bucket[s].top_gain() == bucket[pick].top_gain() && size[s] > size[pick]))
          pick = s;
      }
      if (pick < 0) break;
      uint32_t v = static_cast<uint32_t>(cand[pick]);
      bucket[pick].remove(v, gain[v]);
      locked[v] = 1;
      gain_sum += gain[v];
      apply_move(v);
      moves.push_back(v);
      if (gain_sum > best_sum) {
        best_sum = gain_sum;
        best_prefix = moves.size();
      }
    }
    for (size_t i = moves.size(); i-- > best_prefix;) side[moves[i]] ^= 1;
    return best_sum;
  }

  void refine() {
    for (int round = 0; round < 32 && pass() > 0; ++round) {
    }
  }
};

struct Level {
  HyperGraph hg;
  std::vector<uint32_t> w;
  std::vector<uint32_t> map;  // finer vertex -> vertex here
};

void transpose_nets(HyperGraph& hg) {
  std::vector<uint32_t> deg(hg.n_vertices + 1, 0);
  for (uint32_t u : hg.nv) ++deg[u + 1];
  for (uint32_t u = 0; u < hg.n_vertices; ++u) deg[u + 1] += deg[u];
  hg.vnet_off.assign(deg.begin(), deg.end());
  hg.vnet.resize(hg.nv.size());
  std::vector<uint32_t> cur(hg.vnet_off.begin(), hg.vnet_off.end() - 1);
  for (uint32_t e = 0; e < hg.n_nets(); ++e)
    for (uint32_t i = hg.nv_off[e]; i < hg.nv_off[e + 1]; ++i) hg.vnet[cur[hg.nv[i]]++] = e;
}

// Heavy-edge matching and contraction. Vertices are visited in random order
// and paired with the unmatched neighbour sharing the most connectivity,
// scoring each shared net 1/(|e|-1); nets wider than 64 members say nothing
// about locality and are skipped. Returns false when the graph barely
// shrinks, which ends the coarsening chain.
bool coarsen(const HyperGraph& hg, const std::vector<uint32_t>& w, uint64_t seed, Level& out) {
  const uint32_t n = hg.n_vertices;
  std::vector<uint32_t> mate(n, n);
  Rng rng(seed);
  std::vector<uint32_t> perm(n);
  for (uint32_t v = 0; v < n; ++v) perm[v] = v;
  for (uint32_t v = n; v-- > 1;) std::swap(perm[v], perm[rng.below(v + 1)]);

  std::vector<double> score(n, 0.0);
  std::vector<uint32_t> touched;
  uint32_t n_pairs = 0;
  for (uint32_t pi = 0; pi < n; ++pi) {
    uint32_t v = perm[pi];
    if (mate[v] != n) continue;
    touched.clear();
    for (uint32_t i = hg.vnet_off[v]; i < hg.vnet_off[v + 1]; ++i) {
      uint32_t e = hg.vnet[i];
      uint32_t sz = hg.nv_off[e + 1] - hg.nv_off[e];
      if (sz < 2 || sz > 64) continue;
      double wgt = 1.0 / static_cast<double>(sz - 1);
      for (uint32_t j = hg.nv_off[e]; j < hg.nv_off[e + 1]; ++j) {
        uint32_t u = hg.nv[j];
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
      ++n_pairs;
    } else {
      mate[v] = v;
    }
  }
  const uint32_t nc = n - n_pairs;
  if (nc + n / 20 > n) return false;

  out.map.assign(n, 0);
  uint32_t c = 0;
  for (uint32_t v = 0; v < n; ++v) {
    if (mate[v] >= v)
      out.map[v] = c++;
    else
      out.map[v] = out.map[mate[v]];
  }
  out.w.assign(c, 0);
  for (uint32_t v = 0; v < n; ++v) out.w[out.map[v]] += w[v];

  HyperGraph& ch = out.hg;
  ch.n_vertices = c;
  ch.nv_off.assign(1, 0);
  ch.nv.clear();
  std::vector<uint32_t> stamp(c, UINT32_MAX);
  for (uint32_t e = 0; e < hg.n_nets(); ++e) {
    size_t start = ch.nv.size();
    for (uint32_t i = hg.nv_off[e]; i < hg.nv_off[e + 1]; ++i) {
      uint32_t cu = out.map[hg.nv[i]];
      if (stamp[cu] != e) {
        stamp[cu] = e;
        ch.nv.push_back(cu);
      }
    }
    if (ch.nv.size() - start < 2)
      ch.nv.resize(start);
    else
      ch.nv_off.push_back(static_cast<uint32_t>(ch.nv.size()));
  }
  transpose_nets(ch);
  return true;
}

// Balanced random initial partition: walk a shuffled order, always adding to
// the lighter side.
void seed_partition(const HyperGraph& hg, const std::vector<uint32_t>& w, uint64_t seed,
                    std::vector<uint8_t>& side) {
  const uint32_t n = hg.n_vertices;
  Rng rng(seed);
  std::vector<uint32_t> perm(n);
  for (uint32_t v = 0; v < n; ++v) perm[v] = v;
  for (uint32_t v = n; v-- > 1;) std::swap(perm[v], perm[rng.below(v + 1)]);
  side.assign(n, 0);
  uint64_t sz[2] = {0, 0};
  for (uint32_t v : perm) {
    int s = sz[0] <= sz[1] ? 0 : 1;
    side[v] = static_cast<uint8_t>(s);
    sz[s] += w[v];
  }
}

}  // namespace

BisectResult fm_bisect(const HyperGraph& hg, uint64_t seed, int n_starts) {
  BisectResult best;
  const uint32_t n = hg.n_vertices;
  if (n == 0) return best;
  if (n == 1) {
    best.side = {0};
    return best;
  }

  // Coarsen until the graph is small enough for random-start FM to be
  // reliable, then project the coarse bisection back with refinement at
  // every level.
  constexpr uint32_t kSmall = 192;
  std::vector<uint32_t> w0(n, 1);
  std::vector<Level> chain;
  chain.reserve(32);
  {
    const HyperGraph* cur = &hg;
    const std::vector<uint32_t>* curw = &w0;
    while (cur->n_vertices > kSmall) {
      Level lv;
      if (!coarsen(*cur, *curw, hash_mix(seed, 0xC0A5 + chain.size()), lv)) break;
      chain.push_back(std::move(lv));
      cur = &chain.back().hg;
      curw = &chain.back().w;
    }
  }

  const HyperGraph& top = chain.empty() ? hg : chain.back().hg;
  const std::vector<uint32_t>& topw = chain.empty() ? w0 : chain.back().w;

  Fm fm(top, topw);
  std::vector<uint8_t> top_side;
  uint64_t top_cut = 0;
  bool have = false;
  for (int k = 0; k < n_starts; ++k) {
    seed_partition(top, topw, hash_mix(seed, static_cast<uint64_t>(k)), fm.side);
    fm.refine();
    fm.init_counts();
    uint64_t cut = fm.compute_cut();
    if (!have || cut < top_cut) {
      have = true;
      top_side = fm.side;
      top_cut = cut;
    }
  }

  std::vector<uint8_t> side = std::move(top_side);
  for (size_t li = chain.size(); li-- > 0;) {
    const HyperGraph& fine = li == 0 ? hg : chain[li - 1].hg;
    const std::vector<uint32_t>& fw = li == 0 ? w0 : chain[li - 1].w;
    std::vector<uint8_t> fside(fine.n_vertices);
    for (uint32_t v = 0; v < fine.n_vertices; ++v) fside[v] = side[chain[li].map[v]];
    Fm rf(fine, fw);
    rf.side = std::move(fside);
    rf.refine();
    side = std::move(rf.side);
  }

  best.side = std::move(side);
  uint64_t cut = 0;
  for (uint32_t e = 0; e < hg.n_nets(); ++e) {
    bool on[2] = {false, false};
    for (uint32_t i = hg.nv_off[e]; i < hg.nv_off[e + 1]; ++i) on[best.side[hg.nv[i]]] = true;
    cut += on[0] && on[1];
  }
  best.cut = cut;
  return best;
}

}  // namespace sn
