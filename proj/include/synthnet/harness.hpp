#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "synthnet/cell_library.hpp"
#include "synthnet/metrics.hpp"
#include "synthnet/netgen.hpp"
#include "synthnet/spec.hpp"

namespace sn {

// One generation run plus the depth audit every consumer needs.
struct GenerateRun {
  SpecParams spec;  // parameters as used
  GenResult gen;
  DepthReport depth;
  bool depth_ok = false;  // loop-free and within the depth ceilings
  double seconds = 0.0;   // wall-clock generation time; never serialized
};

GenerateRun run_generate(const SpecParams& spec, const CellLibrary& lib);

// Largest combinational / macro-path depth ceiling across the module tree
// (submodules may allow deeper interiors than the top).
int max_target_depth(const SpecParams& spec);
int max_target_macro_depth(const SpecParams& spec);

// Deterministic JSON documents (insertion-ordered keys, no timings).
std::string generate_report_json(const GenerateRun& run);
std::string extract_report_json(const ExtractedParams& ex);

// Fixed-point stability loop: generate from the current input, measure, and
// feed the measured parameters back as the next input. Converged once every
// tracked quantity (instance count, Rent exponent by traversal, sequential
// ratio, port count) measures within `tol` relative error of the input that
// produced it. Measurements reuse the starting seed (common random numbers)
// unless vary_seed re-rolls structure each iteration.
struct ConvergeOptions {
  double tol = 0.01;
  int max_iter = 50;
  double gain = 1.0;  // relaxation on the feedback step; 1 = pure substitution
  bool vary_seed = false;
  RentOptions rent;  // estimator settings; seed stays fixed across iterations
};

struct ConvergeStep {
  int iter = 0;
  double ctl_n_inst = 0, ctl_p = 0, ctl_s_ratio = 0;   // input of this iteration
  double m_n_inst = 0, m_p = 0, m_s_ratio = 0, m_io = 0;  // measured from the result
  double err_n_inst = 0, err_p = 0, err_s_ratio = 0, err_io = 0;
  bool within = false;

  double max_err() const;
};

struct ConvergeResult {
  bool converged = false;
  std::vector<ConvergeStep> steps;
  SpecParams final_control;  // the input that measured within tolerance
};

ConvergeResult run_converge(const SpecParams& start, const CellLibrary& lib,
                            const ConvergeOptions& opt);

std::string converge_report_json(const SpecParams& start, const ConvergeOptions& opt,
                                 const ConvergeResult& r);

// Sweep grid: one axis per line, '#' comments, keys insts | s_ratio | p.
// Values are either an inclusive range `key = lo:hi:step` (step > 0) or an
// explicit list `key = v1,v2,...`. Errors name the offending line.
struct SweepAxis {
  std::string key;
  double lo = 0, hi = 0, step = 0;
  std::vector<double> list;  // non-empty overrides the range form

  std::vector<double> values() const;
  double lo_bound() const;  // smallest / largest swept value: the axis bounds
  double hi_bound() const;
};

std::vector<SweepAxis> parse_grid(const std::string& text);

// The cell mix a spec implies: exact counts when given, otherwise weight
// shares scaled to the planned combinational/macro/sequential split.
std::map<std::string, double> expected_mix(const SpecParams& spec, const CellLibrary& lib);

// Cartesian sweep (last axis fastest). Each point derives its seed from the
// base seed and its axis values and runs independently, so the CSV is
// byte-identical for any job count. jobs <= 0 uses the runtime default.
// A point is excluded when generation fails or when any extracted axis value
// leaves its axis bounds; the outcome column records which ("s_ratio>max").
std::string run_sweep_csv(const SpecParams& base, const std::vector<SweepAxis>& grid,
                          const CellLibrary& lib, int jobs);

// Tallies of the outcome column; the below/above counts per axis are
// independent, so one point can appear in several columns.
struct SweepSummary {
  uint64_t points = 0, ok = 0, excluded = 0, errors = 0, invalid = 0;
  std::map<std::string, uint64_t> below;  // axis key -> count of "<min"
  std::map<std::string, uint64_t> above;  // axis key -> count of ">max"
};

SweepSummary summarize_sweep_csv(const std::string& csv);

std::string sweep_summary_json(const SweepSummary& s);

// Side-by-side inverse analysis of two netlists plus the cosine similarity
// of their cell mixes.
struct CompareResult {
  ExtractedParams a, b;
  double mix_cosine = 0.0;
};

CompareResult run_compare(const Netlist& a, const Netlist& b, const RentOptions& opt);

std::string compare_report_json(const CompareResult& r);

}  // namespace sn
