#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "synthnet/cluster.hpp"
#include "synthnet/rng.hpp"

namespace sn {

double max_terminals(double size, double t_avg, double p, double sigma_p, double alpha) {
  return t_avg * std::pow(size, p) + alpha * std::pow(size, 2.0 * sigma_p);
}

ClusterTree cluster(const std::vector<ClusterLeaf>& leaves, const ClusterConfig& cfg) {
  if (leaves.empty()) throw std::invalid_argument("cluster: no leaves");

  ClusterTree t;
  t.n_leaves = static_cast<uint32_t>(leaves.size());
  t.nodes.reserve(2 * leaves.size());
  for (const ClusterLeaf& l : leaves)
    t.nodes.push_back({kNone, kNone, l.size, l.terminals, -1});

  // Min-heap on (size, salted hash, id). The salt is each node's deferral
  // count, so a rejected pair re-sorts among equal-size peers instead of
  // meeting again immediately.
  using Entry = std::tuple<uint64_t, uint64_t, uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
  std::vector<uint32_t> attempts(2 * leaves.size(), 0);
  auto push = [&](uint32_t v) {
    queue.push({t.nodes[v].size, hash_mix(hash_mix(cfg.seed, v), attempts[v]), v});
  };
  for (uint32_t v = 0; v < t.n_leaves; ++v) push(v);

  double alpha_mult = 1.0;
  uint64_t since_merge = 0;
  while (queue.size() >= 2) {
    uint32_t a = std::get<2>(queue.top());
    queue.pop();
    uint32_t b = std::get<2>(queue.top());
    queue.pop();
    const ClusterNode& na = t.nodes[a];
    const ClusterNode& nb = t.nodes[b];
    double cap_a = max_terminals(static_cast<double>(nb.size), cfg.t_avg, cfg.p, cfg.sigma_p,
                                 cfg.alpha * alpha_mult);
    double cap_b = max_terminals(static_cast<double>(na.size), cfg.t_avg, cfg.p, cfg.sigma_p,
                                 cfg.alpha * alpha_mult);
    if (na.terminals > cap_a || nb.terminals > cap_b) {
      ++t.deferrals;
      ++attempts[a];
      ++attempts[b];
      push(a);
      push(b);
      if (++since_merge > queue.size()) {
        alpha_mult *= 2.0;
        ++t.relaxations;
        since_merge = 0;
      }
      continue;
    }
    uint64_t size = na.size + nb.size;
    uint32_t terms = static_cast<uint32_t>(
        std::max<long long>(2, std::llround(cfg.t_avg * std::pow(static_cast<double>(size), cfg.p))));
    uint32_t v = static_cast<uint32_t>(t.nodes.size());
    t.nodes.push_back({b, a, size, terms, -1});
    if (cfg.record_audit) t.audit.push_back({v, cap_b, cap_a});
    push(v);
    since_merge = 0;
  }
  t.root = std::get<2>(queue.top());
  return t;
}

void levelize(ClusterTree& t) {
  if (t.root == kNone) throw std::logic_error("levelize: tree has no root");
  int32_t height = 0;
  std::vector<uint32_t> stack{t.root};
  t.nodes[t.root].level = 0;
  while (!stack.empty()) {
    uint32_t v = stack.back();
    stack.pop_back();
    height = std::max(height, t.nodes[v].level);
    if (t.is_leaf(v)) continue;
    t.nodes[t.nodes[v].left].level = t.nodes[v].level + 1;
    t.nodes[t.nodes[v].right].level = t.nodes[v].level + 1;
    stack.push_back(t.nodes[v].left);
    stack.push_back(t.nodes[v].right);
  }
  for (uint32_t v = 0; v < t.n_leaves; ++v) t.nodes[v].level = height;
  t.n_levels = height + 1;
}

std::vector<uint32_t> internal_schedule(const ClusterTree& t) {
  std::vector<uint32_t> order;
  order.reserve(t.nodes.size() - t.n_leaves);
  for (uint32_t v = t.n_leaves; v < t.nodes.size(); ++v) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](uint32_t x, uint32_t y) {
    if (t.nodes[x].level != t.nodes[y].level) return t.nodes[x].level > t.nodes[y].level;
    return x < y;
  });
  return order;
}

}  // namespace sn
