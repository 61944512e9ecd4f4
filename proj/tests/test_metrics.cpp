#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "synthnet/metrics.hpp"
#include "synthnet/netgen.hpp"
#include "synthnet/rng.hpp"
#include "test_util.hpp"

using namespace sn;

namespace {

// 1-in/1-out cells in a line: cutting anywhere costs one net.
Netlist make_chain(uint32_t n) {
  Netlist nl(test_library(), "chain");
  uint32_t invm = static_cast<uint32_t>(nl.library().find("INV"));
  std::vector<uint32_t> inst(n);
  for (uint32_t k = 0; k < n; ++k) inst[k] = nl.add_instance(invm);
  for (uint32_t k = 0; k + 1 < n; ++k) {
    uint32_t net = nl.add_net(0);
    nl.connect_driver(net, inst[k], 1);
    nl.connect_sink(net, inst[k + 1], 0);
  }
  return nl;
}

// 2-D grid: each cell feeds its right and down neighbours, so any block's
// crossing count scales with its perimeter.
Netlist make_mesh(uint32_t rows, uint32_t cols) {
  Netlist nl(test_library(), "mesh");
  uint32_t nandm = static_cast<uint32_t>(nl.library().find("NAND2"));
  std::vector<uint32_t> inst(rows * cols);
  for (uint32_t k = 0; k < rows * cols; ++k) inst[k] = nl.add_instance(nandm);
  auto at = [&](uint32_t r, uint32_t c) { return inst[r * cols + c]; };
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c) {
      uint32_t net = nl.add_net(0);
      nl.connect_driver(net, at(r, c), 2);
      bool used = false;
      if (c + 1 < cols) nl.connect_sink(net, at(r, c + 1), 0), used = true;
      if (r + 1 < rows) nl.connect_sink(net, at(r + 1, c), 1), used = true;
      (void)used;
    }
  return nl;
}

// Random long-range pairing: every block leaks roughly one net per member.
// Expander-like wiring: every input pin is fed by a uniformly random other
// instance. No small separators, so any block's pin count grows with its
// size and the fitted exponent sits near 1. (A random permutation would not
// do: it decomposes into rings, which are chains topologically.)
Netlist make_scattered(uint32_t n, uint32_t seed) {
  Netlist nl(test_library(), "scatter");
  uint32_t nand2 = static_cast<uint32_t>(nl.library().find("NAND2"));
  std::vector<uint32_t> inst(n), out_net(n);
  for (uint32_t k = 0; k < n; ++k) {
    inst[k] = nl.add_instance(nand2);
    out_net[k] = nl.add_net(0);
    nl.connect_driver(out_net[k], inst[k], 2);
  }
  Rng rng(seed);
  for (uint32_t v = 0; v < n; ++v)
    for (uint32_t pin = 0; pin < 2; ++pin) {
      uint32_t u = static_cast<uint32_t>(rng.below(n));
      if (u == v) u = (u + 1) % n;
      nl.connect_sink(out_net[u], inst[v], pin);
    }
  return nl;
}

}  // namespace

TEST_CASE("metrics: block pins for a single fanned-out net") {
  Netlist nl(test_library(), "t");
  uint32_t invm = static_cast<uint32_t>(nl.library().find("INV"));
  std::vector<uint32_t> inst;
  for (int k = 0; k < 4; ++k) inst.push_back(nl.add_instance(invm));
  uint32_t net = nl.add_net(0);
  nl.connect_driver(net, inst[0], 1);
  for (int k = 1; k < 4; ++k) nl.connect_sink(net, inst[k], 0);

  std::vector<uint32_t> block_of = {0, 1, 2, 3};
  BlockPins bp = count_block_pins(nl, block_of, 4);
  // driver block: three crossing pairs, one net, three partner blocks
  CHECK(bp.type1[0] == 3);
  CHECK(bp.type2[0] == 1);
  CHECK(bp.type3[0] == 3);
  for (int b = 1; b < 4; ++b) {
    CHECK(bp.type1[b] == 1);
    CHECK(bp.type2[b] == 1);
    CHECK(bp.type3[b] == 1);
  }

  // a same-block sink adds nothing
  uint32_t extra = nl.add_instance(invm);
  nl.connect_sink(net, extra, 0);
  block_of.push_back(0);
  BlockPins bp2 = count_block_pins(nl, block_of, 4);
  CHECK(bp2.type1[0] == 3);
  CHECK(bp2.type2[0] == 1);
  CHECK(bp2.type3[0] == 3);
}

TEST_CASE("metrics: top-level ports count as an external block") {
  Netlist nl(test_library(), "t");
  uint32_t invm = static_cast<uint32_t>(nl.library().find("INV"));
  uint32_t v = nl.add_instance(invm);
  uint32_t pin_in = nl.add_port(0, PinDir::kInput, "a");
  uint32_t n_in = nl.add_net(0);
  nl.connect_port_driver(n_in, pin_in);
  nl.connect_sink(n_in, v, 0);
  uint32_t pout = nl.add_port(0, PinDir::kOutput, "y");
  uint32_t n_out = nl.add_net(0);
  nl.connect_driver(n_out, v, 1);
  nl.connect_port_sink(n_out, pout);

  BlockPins bp = count_block_pins(nl, {0}, 1);
  CHECK(bp.type1[0] == 2);
  CHECK(bp.type2[0] == 2);
  CHECK(bp.type3[0] == 2);
}

TEST_CASE("metrics: clock nets are ignored") {
  Netlist nl(test_library(), "t");
  uint32_t ffm = static_cast<uint32_t>(nl.library().find("DFF_X1"));
  uint32_t invm = static_cast<uint32_t>(nl.library().find("INV"));
  uint32_t src = nl.add_instance(invm);  // block 0
  uint32_t ff = nl.add_instance(ffm);    // block 1
  uint32_t d = nl.add_net(0);
  nl.connect_driver(d, src, 1);
  nl.connect_sink(d, ff, 0);
  uint32_t pclk = nl.add_port(0, PinDir::kInput, "clk");
  uint32_t clk = nl.add_net(0);
  nl.connect_port_driver(clk, pclk);
  nl.connect_sink(clk, ff, 1);  // CK makes the net a clock net

  BlockPins bp = count_block_pins(nl, {0, 1}, 2);
  CHECK(bp.type1[1] == 1);  // only the data edge shows up
  CHECK(bp.type2[1] == 1);
  CHECK(bp.type3[1] == 1);
}

TEST_CASE("metrics: convention ordering holds on a generated design") {
  SpecParams s;
  s.n_inst = 300;
  s.p = 0.6;
  s.s_ratio = 0.15;
  s.seed = 9;
  Netlist nl = generate_netlist(s, test_library()).netlist;
  std::mt19937 gen(42);
  std::vector<uint32_t> block_of(nl.n_instances());
  for (auto& b : block_of) b = gen() % 8;
  BlockPins bp = count_block_pins(nl, block_of, 8);
  uint64_t total2 = 0;
  for (int b = 0; b < 8; ++b) {
    CHECK(bp.type2[b] <= bp.type3[b]);
    CHECK(bp.type3[b] <= bp.type1[b]);
    total2 += bp.type2[b];
  }
  CHECK(total2 > 0);
}

TEST_CASE("metrics: error statistics") {
  ErrorStats st = error_metrics({10, 0, 5}, {11, 3, 4});
  CHECK(st.mape == doctest::Approx(0.15));  // the zero target is skipped
  CHECK(st.mae == doctest::Approx(5.0 / 3.0));
  CHECK(st.medae == doctest::Approx(1.0));

  ErrorStats even = error_metrics({1, 1}, {2, 4});
  CHECK(even.medae == doctest::Approx(2.0));

  CHECK_THROWS_AS(error_metrics({1.0}, {}), std::invalid_argument);
}

TEST_CASE("metrics: cosine similarity of cell mixes") {
  std::map<std::string, double> a = {{"INV", 1.0}, {"NAND2", 2.0}};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
  std::map<std::string, double> scaled = {{"INV", 3.0}, {"NAND2", 6.0}};
  CHECK(cosine_similarity(a, scaled) == doctest::Approx(1.0));
  std::map<std::string, double> disjoint = {{"NOR2", 5.0}};
  CHECK(cosine_similarity(a, disjoint) == doctest::Approx(0.0));
  std::map<std::string, double> x = {{"INV", 1.0}};
  std::map<std::string, double> y = {{"INV", 1.0}, {"NAND2", 1.0}};
  CHECK(cosine_similarity(x, y) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(cosine_similarity({}, a) == doctest::Approx(0.0));

  std::map<std::string, uint64_t> counts = {{"INV", 30}, {"NAND2", 70}};
  auto w = to_weight_map(counts);
  CHECK(w.at("INV") == doctest::Approx(30.0));
  CHECK(w.at("NAND2") == doctest::Approx(70.0));
}

TEST_CASE("metrics: partitioning separates chain, mesh and scattered wiring") {
  RentOptions opt;
  opt.seed = 3;
  double chain = rent_by_partitioning(make_chain(256), opt).p;
  double mesh = rent_by_partitioning(make_mesh(16, 16), opt).p;
  double scattered = rent_by_partitioning(make_scattered(256, 5), opt).p;
  CAPTURE(chain);
  CAPTURE(mesh);
  CAPTURE(scattered);
  CHECK(chain > -0.15);  // flat pin profile, noise can dip slightly below 0
  CHECK(scattered <= 1.2);
  CHECK(chain + 0.1 < mesh);
  CHECK(mesh + 0.1 < scattered);
}

TEST_CASE("metrics: traversal agrees on the extremes") {
  RentOptions opt;
  opt.seed = 3;
  double chain = rent_by_traversal(make_chain(256), opt).p;
  double scattered = rent_by_traversal(make_scattered(256, 5), opt).p;
  CAPTURE(chain);
  CAPTURE(scattered);
  CHECK(chain + 0.1 < scattered);
}

TEST_CASE("metrics: parallel estimators match the serial reference") {
  SpecParams s;
  s.n_inst = 800;
  s.p = 0.58;
  s.s_ratio = 0.2;
  s.seed = 17;
  Netlist nl = generate_netlist(s, test_library()).netlist;

  RentOptions par, ser;
  par.seed = ser.seed = 7;
  par.parallel = true;
  ser.parallel = false;
  RentEstimate a = rent_by_partitioning(nl, par);
  RentEstimate b = rent_by_partitioning(nl, ser);
  CHECK(a.p == b.p);
  CHECK(a.k == b.k);
  REQUIRE(a.levels.size() == b.levels.size());
  for (size_t i = 0; i < a.levels.size(); ++i) {
    CHECK(a.levels[i].size == b.levels[i].size);
    CHECK(a.levels[i].pins == b.levels[i].pins);
  }

  DepthReport dp = analyze_depth(nl, true);
  DepthReport ds = analyze_depth(nl, false);
  CHECK(dp.d_max == ds.d_max);
  CHECK(dp.d_min == ds.d_min);
  CHECK(dp.md_max == ds.md_max);
  CHECK(dp.histogram == ds.histogram);
}

TEST_CASE("metrics: geometric level means stay in range") {
  RentOptions opt;
  opt.seed = 11;
  opt.geom_mean = true;
  double p = rent_by_partitioning(make_mesh(16, 16), opt).p;
  CHECK(p > 0.2);
  CHECK(p < 0.9);
}

TEST_CASE("metrics: full extraction is self-consistent") {
  SpecParams s;
  s.n_inst = 600;
  s.p = 0.6;
  s.s_ratio = 0.2;
  s.n_pi = 25;
  s.n_po = 12;
  s.seed = 29;
  Netlist nl = generate_netlist(s, test_library()).netlist;

  RentOptions opt;
  opt.seed = 1;
  ExtractedParams ex = extract_params(nl, opt);

  CHECK(ex.n_inst == nl.n_instances());
  CHECK(ex.n_comb + ex.n_seq + ex.n_macro == ex.n_inst);
  CHECK(ex.n_pi == 25);
  CHECK(ex.n_po == 12);
  CHECK(ex.n_clock_ports == 1);
  CHECK(ex.s_ratio == doctest::Approx(static_cast<double>(ex.n_seq) / ex.n_inst));
  CHECK(ex.g_avg == doctest::Approx(12.0 / 37.0));

  uint64_t pins = 0, by_count = 0;
  for (uint32_t v = 0; v < nl.n_instances(); ++v) pins += nl.master_of(v).signal_pins();
  for (const auto& [name, c] : ex.cell_counts) by_count += c;
  CHECK(ex.t_avg == doctest::Approx(static_cast<double>(pins) / ex.n_inst));
  CHECK(by_count == ex.n_inst);

  DepthReport d = analyze_depth(nl);
  CHECK(ex.depth.d_max == d.d_max);
  CHECK(ex.p_partition > 0.0);
  CHECK(ex.p_traversal > 0.0);
}
