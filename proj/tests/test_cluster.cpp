#include <doctest.h>

#include <cmath>
#include <vector>

#include "synthnet/cluster.hpp"

using namespace sn;

TEST_CASE("cluster: terminal cap formula") {
  // t_avg * size^p + alpha * size^(2 * sigma_p), checked against a hand
  // computation: 2.58 * 100^0.57 + 1 * 100^0.57 = 3.58 * e^(0.57 ln 100)
  double got = max_terminals(100.0, 2.58, 0.57, 0.285, 1.0);
  double want = 2.58 * std::pow(100.0, 0.57) + std::pow(100.0, 0.57);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
  CHECK(got == doctest::Approx(49.4154).epsilon(1e-4));
  // alpha = 0 drops the slack term entirely
  CHECK(max_terminals(1.0, 3.0, 0.7, 0.35, 0.0) == doctest::Approx(3.0));
  // cap grows with size
  CHECK(max_terminals(200.0, 2.5, 0.6, 0.3, 1.0) > max_terminals(100.0, 2.5, 0.6, 0.3, 1.0));
}

TEST_CASE("cluster: tree over n leaves has n-1 internal nodes") {
  for (uint32_t n : {1u, 2u, 3u, 7u, 64u, 100u}) {
    std::vector<ClusterLeaf> leaves(n, ClusterLeaf{1, 3});
    ClusterConfig cfg;
    ClusterTree t = cluster(leaves, cfg);
    CHECK(t.n_leaves == n);
    CHECK(t.nodes.size() == 2 * n - 1);
    REQUIRE(t.root != kNone);
    CHECK(t.nodes[t.root].size == n);
    // every node except the root is referenced exactly once as a child
    std::vector<int> refs(t.nodes.size(), 0);
    for (const ClusterNode& nd : t.nodes) {
      if (nd.left != kNone) ++refs[nd.left];
      if (nd.right != kNone) ++refs[nd.right];
    }
    for (uint32_t v = 0; v < t.nodes.size(); ++v) CHECK(refs[v] == (v == t.root ? 0 : 1));
  }
}

TEST_CASE("cluster: sizes and terminals aggregate bottom-up") {
  std::vector<ClusterLeaf> leaves = {{1, 2}, {1, 3}, {4, 9}, {2, 4}};
  ClusterConfig cfg;
  cfg.record_audit = true;
  ClusterTree t = cluster(leaves, cfg);
  uint64_t total = 0;
  for (uint32_t v = 0; v < t.n_leaves; ++v) total += t.nodes[v].size;
  CHECK(t.nodes[t.root].size == total);
  for (uint32_t v = t.n_leaves; v < t.nodes.size(); ++v) {
    const ClusterNode& nd = t.nodes[v];
    REQUIRE(nd.left != kNone);
    REQUIRE(nd.right != kNone);
    CHECK(nd.size == t.nodes[nd.left].size + t.nodes[nd.right].size);
  }
}

TEST_CASE("cluster: merges respect the terminal cap recorded in the audit") {
  std::vector<ClusterLeaf> leaves;
  for (int i = 0; i < 40; ++i) leaves.push_back({1, static_cast<uint32_t>(2 + i % 4)});
  ClusterConfig cfg;
  cfg.t_avg = 2.5;
  cfg.p = 0.6;
  cfg.sigma_p = 0.3;
  cfg.alpha = 1.0;
  cfg.record_audit = true;
  ClusterTree t = cluster(leaves, cfg);
  REQUIRE(t.audit.size() == t.nodes.size() - t.n_leaves);
  for (const MergeAudit& a : t.audit) {
    const ClusterNode& nd = t.nodes[a.node];
    CHECK(static_cast<double>(t.nodes[nd.left].terminals) <= a.cap_for_left);
    CHECK(static_cast<double>(t.nodes[nd.right].terminals) <= a.cap_for_right);
  }
}

TEST_CASE("cluster: oversized terminals defer and eventually relax") {
  // Two leaves whose terminal counts blow any reasonable cap for their size:
  // the pairing can only happen after the slack is doubled.
  std::vector<ClusterLeaf> leaves = {{1, 1000}, {1, 1000}, {1, 2}, {1, 2}};
  ClusterConfig cfg;
  cfg.t_avg = 2.0;
  cfg.p = 0.5;
  cfg.sigma_p = 0.25;
  cfg.alpha = 1.0;
  ClusterTree t = cluster(leaves, cfg);
  CHECK(t.nodes[t.root].size == 4);
  CHECK(t.deferrals > 0);
  CHECK(t.relaxations > 0);
}

TEST_CASE("cluster: determinism in the seed") {
  std::vector<ClusterLeaf> leaves;
  for (int i = 0; i < 100; ++i) leaves.push_back({1, static_cast<uint32_t>(2 + i % 5)});
  ClusterConfig cfg;
  cfg.seed = 77;
  ClusterTree a = cluster(leaves, cfg);
  ClusterTree b = cluster(leaves, cfg);
  REQUIRE(a.nodes.size() == b.nodes.size());
  for (size_t v = 0; v < a.nodes.size(); ++v) {
    CHECK(a.nodes[v].left == b.nodes[v].left);
    CHECK(a.nodes[v].right == b.nodes[v].right);
  }
}

TEST_CASE("cluster: levelize puts the root at 0 and leaves at the bottom") {
  std::vector<ClusterLeaf> leaves = {{1, 2}, {1, 2}, {1, 2}};
  ClusterConfig cfg;
  ClusterTree t = cluster(leaves, cfg);
  levelize(t);
  CHECK(t.nodes[t.root].level == 0);
  // 3 leaves -> two internal nodes -> height 2
  CHECK(t.n_levels == 3);
  for (uint32_t v = 0; v < t.n_leaves; ++v) CHECK(t.nodes[v].level == t.n_levels - 1);
  for (uint32_t v = t.n_leaves; v < t.nodes.size(); ++v) {
    const ClusterNode& nd = t.nodes[v];
    if (v != t.root) CHECK(nd.level > 0);
    // children sit strictly below their parent unless they are leaves
    for (uint32_t c : {nd.left, nd.right})
      if (!t.is_leaf(c)) CHECK(t.nodes[c].level == nd.level + 1);
  }
}

TEST_CASE("cluster: schedule runs deepest level first and root last") {
  std::vector<ClusterLeaf> leaves(9, ClusterLeaf{1, 3});
  ClusterConfig cfg;
  ClusterTree t = cluster(leaves, cfg);
  levelize(t);
  std::vector<uint32_t> order = internal_schedule(t);
  REQUIRE(order.size() == t.nodes.size() - t.n_leaves);
  CHECK(order.back() == t.root);
  for (size_t i = 1; i < order.size(); ++i) {
    int32_t prev = t.nodes[order[i - 1]].level;
    int32_t cur = t.nodes[order[i]].level;
    // levels are non-increasing (deepest first), ids ascend within a level
    CHECK(prev >= cur);
    if (prev == cur) CHECK(order[i - 1] < order[i]);
  }
  // a parent never runs before its children
  std::vector<size_t> pos(t.nodes.size(), 0);
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = i + 1;  // 0 = leaf
  for (uint32_t v : order) {
    const ClusterNode& nd = t.nodes[v];
    for (uint32_t c : {nd.left, nd.right})
      if (!t.is_leaf(c)) CHECK(pos[c] < pos[v]);
  }
}

TEST_CASE("cluster: single leaf is its own root") {
  std::vector<ClusterLeaf> one = {{5, 7}};
  ClusterConfig cfg;
  ClusterTree t = cluster(one, cfg);
  CHECK(t.nodes.size() == 1);
  CHECK(t.root == 0);
  CHECK(t.is_leaf(0));
  levelize(t);
  CHECK(t.nodes[0].level == 0);
  CHECK(internal_schedule(t).empty());
}
