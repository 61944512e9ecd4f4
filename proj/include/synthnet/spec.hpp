#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sn {

// Cell mix for one module. When `counts` is non-empty it fixes the exact
// number of instances per master and the module's instance total. Otherwise
// `weights` (or, when that is also empty, a built-in uniform mix over the
// library's combinational masters) is sampled to fill the instance budget.
struct CellInventory {
  std::map<std::string, uint64_t> counts;
  std::map<std::string, double> weights;

  bool empty() const { return counts.empty() && weights.empty(); }
  uint64_t total_counts() const;
};

// Target parameters for one generated module (and, recursively, its
// submodules). Fields set to the documented sentinels are resolved to
// defaults by parse time or, where the cell library is needed, by the
// generator driver.
struct SpecParams {
  std::string name = "top";
  uint64_t n_inst = 0;   // leaf instances directly in this module (required)
  double p = 0.0;        // Rent exponent target, in (0,1) (required)
  double s_ratio = 0.0;  // sequential fraction, in [0,1)
  double t_avg = 0.0;    // mean pins per instance; 0 = implied by the cell mix
  double g_avg = 0.3;    // mean output share of a block's terminals, in (0,1)
  double alpha = 1.0;    // slack multiplier on the terminal cap
  double sigma_p = -1.0;  // terminal spread exponent; <0 = p/2
  double sigma_g = 0.05;  // spread of the output share
  double r_ratio = 0.5;   // fit region: block sizes up to r_ratio * n_inst
  int d_min = 0;          // combinational depth bounds between boundaries
  int d_max = 40;
  int md_min = -1;  // macro-path depth bounds; <0 = follow d_min/d_max
  int md_max = -1;
  uint64_t n_macro = 0;
  int64_t n_pi = -1;  // primary input count; <0 = estimate from Rent target
  int64_t n_po = -1;
  uint64_t seed = 1;
  CellInventory inventory;
  std::vector<SpecParams> submodules;

  // Total instance count including submodule interiors.
  uint64_t total_insts() const;
  const SpecParams* find_submodule(const std::string& name) const;
};

// Parses the line-oriented spec format:
//
//   key = value          # '#' starts a comment
//   [cells]              # name = exact count, binds to the current module
//   [cell_weights]       # name = relative weight
//   [submodule "a/b"]    # nested module, path-qualified; scalar keys follow
//
// Submodules inherit the parent's scalar parameters (except size, port and
// seed fields) as written at the time their header appears. Violated
// constraints raise std::runtime_error naming the offending field.
SpecParams parse_specfile(const std::string& text);
SpecParams parse_specfile_file(const std::string& path);

std::string write_specfile(const SpecParams& p);
void write_specfile_file(const SpecParams& p, const std::string& path);

// Resolves the documented sentinels in place (recursively): an instance total
// implied by [cells], sigma_p < 0 -> p / 2, md_min/md_max < 0 -> d_min/d_max.
// The parsers apply it; programmatically built parameter sets get the same
// treatment from the generator driver. Idempotent.
void resolve_spec_defaults(SpecParams& p);

// Range-checks every field (recursively). Called by the parsers; exposed for
// programmatically built parameter sets.
void validate_spec(const SpecParams& p);

// Shortest round-trip decimal text for a double; used everywhere numbers are
// written out so spec files, reports and CSVs are byte-stable.
std::string format_double(double v);

}  // namespace sn
