#include <doctest.h>

#include <stdexcept>
#include <string>

#include "synthnet/spec.hpp"

using namespace sn;

static const char* kBasic = R"(# basic parameter file
name = chip
insts = 5000
p = 0.62
s_ratio = 0.15
g_avg = 0.35
d_max = 24
seed = 99
)";

TEST_CASE("spec: parse fills targets and resolves defaults") {
  SpecParams s = parse_specfile(kBasic);
  CHECK(s.name == "chip");
  CHECK(s.n_inst == 5000);
  CHECK(s.p == doctest::Approx(0.62));
  CHECK(s.s_ratio == doctest::Approx(0.15));
  CHECK(s.g_avg == doctest::Approx(0.35));
  CHECK(s.d_max == 24);
  CHECK(s.seed == 99);
  // sentinels resolved at parse time
  CHECK(s.sigma_p == doctest::Approx(0.31));  // p / 2
  CHECK(s.md_min == s.d_min);
  CHECK(s.md_max == 24);
  // untouched defaults
  CHECK(s.t_avg == 0.0);
  CHECK(s.n_pi == -1);
  CHECK(s.n_po == -1);
}

TEST_CASE("spec: write/parse round trip preserves every field") {
  SpecParams s = parse_specfile(kBasic);
  s.inventory.weights = {{"INV", 2.0}, {"NAND2", 5.5}};
  s.n_pi = 41;
  s.n_po = 17;
  SpecParams t = parse_specfile(write_specfile(s));
  CHECK(t.name == s.name);
  CHECK(t.n_inst == s.n_inst);
  CHECK(t.p == s.p);
  CHECK(t.s_ratio == s.s_ratio);
  CHECK(t.t_avg == s.t_avg);
  CHECK(t.g_avg == s.g_avg);
  CHECK(t.alpha == s.alpha);
  CHECK(t.sigma_p == s.sigma_p);
  CHECK(t.sigma_g == s.sigma_g);
  CHECK(t.r_ratio == s.r_ratio);
  CHECK(t.d_min == s.d_min);
  CHECK(t.d_max == s.d_max);
  CHECK(t.md_min == s.md_min);
  CHECK(t.md_max == s.md_max);
  CHECK(t.n_pi == s.n_pi);
  CHECK(t.n_po == s.n_po);
  CHECK(t.seed == s.seed);
  CHECK(t.inventory.weights == s.inventory.weights);
  // writing twice is stable
  CHECK(write_specfile(t) == write_specfile(s));
}

TEST_CASE("spec: exact cell counts pin the instance total") {
  SpecParams s = parse_specfile(
      "p = 0.5\n[cells]\nINV = 30\nNAND2 = 50\nDFF_X1 = 20\n");
  CHECK(s.n_inst == 100);
  CHECK(s.inventory.counts.at("NAND2") == 50);

  CHECK_THROWS_WITH_AS(
      parse_specfile("insts = 99\np = 0.5\n[cells]\nINV = 100\n"),
      doctest::Contains("does not match"), std::runtime_error);
}

TEST_CASE("spec: submodules inherit scalars as written at header time") {
  SpecParams s = parse_specfile(
      "insts = 1000\np = 0.6\nd_max = 30\n"
      "[submodule \"alu\"]\ninsts = 200\n"
      "[submodule \"alu/add\"]\ninsts = 50\nd_max = 12\n"
      "[submodule \"mem\"]\ninsts = 100\np = 0.4\n");
  CHECK(s.total_insts() == 1350);
  REQUIRE(s.submodules.size() == 2);
  const SpecParams* alu = s.find_submodule("alu");
  REQUIRE(alu != nullptr);
  CHECK(alu->p == doctest::Approx(0.6));   // inherited
  CHECK(alu->d_max == 30);                 // inherited
  CHECK(alu->seed == 1);                   // not inherited
  const SpecParams* add = alu->find_submodule("add");
  REQUIRE(add != nullptr);
  CHECK(add->n_inst == 50);
  CHECK(add->d_max == 12);  // overridden after the header
  const SpecParams* mem = s.find_submodule("mem");
  REQUIRE(mem != nullptr);
  CHECK(mem->p == doctest::Approx(0.4));
  CHECK(s.find_submodule("nope") == nullptr);

  // nested round trip
  SpecParams t = parse_specfile(write_specfile(s));
  CHECK(write_specfile(t) == write_specfile(s));
  CHECK(t.total_insts() == 1350);
}

TEST_CASE("spec: violated constraints name the offending field") {
  CHECK_THROWS_WITH_AS(parse_specfile("insts = 10\np = 1.5\n"), doctest::Contains("p = 1.5"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("insts = 10\np = 0.5\ns_ratio = 1\n"),
                       doctest::Contains("s_ratio"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("p = 0.5\n"), doctest::Contains("insts"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("insts = 10\np = 0.5\nd_min = 8\nd_max = 4\n"),
                       doctest::Contains("d_max"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("insts = 10\np = 0.5\nn_pi = 0\n"),
                       doctest::Contains("n_pi"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("insts = 10\np = 0.5\nn_macro = 11\n"),
                       doctest::Contains("n_macro"), std::runtime_error);
}

TEST_CASE("spec: parser errors carry the line number") {
  CHECK_THROWS_WITH_AS(parse_specfile("insts = 10\nwhat = 3\n"), doctest::Contains("spec:2"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("insts = ten\n"), doctest::Contains("spec:1"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("insts = 10\np = 0.5\n[bogus]\n"),
                       doctest::Contains("unknown section"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_specfile("[submodule \"a/b\"]\ninsts = 1\n"),
                       doctest::Contains("undeclared submodule"), std::runtime_error);
  CHECK_THROWS_WITH_AS(
      parse_specfile("insts = 1\np = 0.5\n[submodule \"a\"]\ninsts = 1\n[submodule \"a\"]\n"),
      doctest::Contains("declared twice"), std::runtime_error);
}

TEST_CASE("spec: comments and blank lines are ignored") {
  SpecParams s = parse_specfile("\n# header\n  insts = 4   # trailing\n\np = 0.5 # x\n");
  CHECK(s.n_inst == 4);
  CHECK(s.p == doctest::Approx(0.5));
}

TEST_CASE("spec: resolve_spec_defaults works on programmatic sets") {
  SpecParams s;
  s.n_inst = 10;
  s.p = 0.7;
  s.d_min = 2;
  s.d_max = 9;
  resolve_spec_defaults(s);
  CHECK(s.sigma_p == doctest::Approx(0.35));
  CHECK(s.md_min == 2);
  CHECK(s.md_max == 9);
  // idempotent
  resolve_spec_defaults(s);
  CHECK(s.sigma_p == doctest::Approx(0.35));
  validate_spec(s);
}
