#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string_view>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include <json.hpp>

#include "synthnet/harness.hpp"
#include "synthnet/rng.hpp"

namespace sn {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct TopIo {
  uint64_t pi = 0, po = 0, clock = 0;
};

TopIo count_top_io(const Netlist& nl) {
  TopIo io;
  for (uint32_t pid : nl.module(0).ports) {
    const Port& p = nl.port(pid);
    if (p.net != kNone && nl.net_is_clock(p.net))
      ++io.clock;
    else if (p.dir == PinDir::kInput)
      ++io.pi;
    else
      ++io.po;
  }
  return io;
}

// The cheap slice of the inverse analysis: everything except the Rent fits.
struct QuickStats {
  uint64_t n_inst = 0, n_net = 0, n_comb = 0, n_seq = 0, n_macro = 0;
  double s_ratio = 0.0, t_avg = 0.0;
  TopIo io;
};

QuickStats quick_stats(const Netlist& nl) {
  QuickStats q;
  q.n_inst = nl.n_instances();
  uint64_t pin_sum = 0;
  for (uint32_t v = 0; v < nl.n_instances(); ++v) {
    const CellMaster& m = nl.master_of(v);
    pin_sum += m.signal_pins();
    if (m.is_sequential)
      ++q.n_seq;
    else if (m.is_macro)
      ++q.n_macro;
    else
      ++q.n_comb;
  }
  for (uint32_t net = 0; net < nl.n_nets(); ++net)
    if (nl.net_in_use(net)) ++q.n_net;
  if (q.n_inst) {
    q.s_ratio = static_cast<double>(q.n_seq) / static_cast<double>(q.n_inst);
    q.t_avg = static_cast<double>(pin_sum) / static_cast<double>(q.n_inst);
  }
  q.io = count_top_io(nl);
  return q;
}

ordered_json spec_json(const SpecParams& s) {
  ordered_json j;
  j["name"] = s.name;
  j["n_inst"] = s.n_inst;
  j["total_insts"] = s.total_insts();
  j["p"] = s.p;
  j["s_ratio"] = s.s_ratio;
  j["t_avg"] = s.t_avg;
  j["g_avg"] = s.g_avg;
  j["alpha"] = s.alpha;
  j["sigma_p"] = s.sigma_p;
  j["sigma_g"] = s.sigma_g;
  j["r_ratio"] = s.r_ratio;
  j["d_min"] = s.d_min;
  j["d_max"] = s.d_max;
  j["md_min"] = s.md_min;
  j["md_max"] = s.md_max;
  j["n_macro"] = s.n_macro;
  j["n_pi"] = s.n_pi;
  j["n_po"] = s.n_po;
  j["seed"] = s.seed;
  j["n_submodules"] = s.submodules.size();
  return j;
}

ordered_json depth_json(const DepthReport& d) {
  ordered_json j;
  j["d_min"] = d.d_min;
  j["d_max"] = d.d_max;
  j["md_min"] = d.md_min;
  j["md_max"] = d.md_max;
  j["has_loop"] = d.has_loop;
  return j;
}

ordered_json extracted_json(const ExtractedParams& ex) {
  ordered_json j;
  j["n_inst"] = ex.n_inst;
  j["n_net"] = ex.n_net;
  j["n_pi"] = ex.n_pi;
  j["n_po"] = ex.n_po;
  j["n_clock_ports"] = ex.n_clock_ports;
  j["n_comb"] = ex.n_comb;
  j["n_seq"] = ex.n_seq;
  j["n_macro"] = ex.n_macro;
  j["s_ratio"] = ex.s_ratio;
  j["t_avg"] = ex.t_avg;
  j["g_avg"] = ex.g_avg;
  j["p_partition"] = ex.p_partition;
  j["p_traversal"] = ex.p_traversal;
  j["depth"] = depth_json(ex.depth);
  j["cell_counts"] = ex.cell_counts;
  return j;
}

void apply_axis(SpecParams& spec, const std::string& key, double v) {
  if (key == "insts")
    spec.n_inst = static_cast<uint64_t>(std::llround(v));
  else if (key == "s_ratio")
    spec.s_ratio = v;
  else
    spec.p = v;
}

}  // namespace

int max_target_depth(const SpecParams& spec) {
  int d = spec.d_max;
  for (const SpecParams& sub : spec.submodules) d = std::max(d, max_target_depth(sub));
  return d;
}

int max_target_macro_depth(const SpecParams& spec) {
  int d = spec.md_max < 0 ? spec.d_max : spec.md_max;
  for (const SpecParams& sub : spec.submodules) d = std::max(d, max_target_macro_depth(sub));
  return d;
}

GenerateRun run_generate(const SpecParams& spec, const CellLibrary& lib) {
  auto t0 = std::chrono::steady_clock::now();
  GenResult gen = generate_netlist(spec, lib);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  DepthReport depth = analyze_depth(gen.netlist, true);
  bool depth_ok = !depth.has_loop && depth.d_max <= max_target_depth(spec) &&
                  depth.md_max <= max_target_macro_depth(spec);
  return GenerateRun{spec, std::move(gen), depth, depth_ok, seconds};
}

std::string generate_report_json(const GenerateRun& run) {
  const Netlist& nl = run.gen.netlist;
  QuickStats q = quick_stats(nl);
  ordered_json j;
  j["targets"] = spec_json(run.spec);
  ordered_json r;
  r["n_inst"] = q.n_inst;
  r["n_net"] = q.n_net;
  r["n_pi"] = q.io.pi;
  r["n_po"] = q.io.po;
  r["n_clock_ports"] = q.io.clock;
  r["n_comb"] = q.n_comb;
  r["n_seq"] = q.n_seq;
  r["n_macro"] = q.n_macro;
  r["n_modules"] = nl.n_modules();
  r["s_ratio"] = q.s_ratio;
  r["t_avg"] = q.t_avg;
  j["realized"] = r;
  j["depth"] = depth_json(run.depth);
  j["depth_ok"] = run.depth_ok;
  const GenReport& g = run.gen.report;
  ordered_json c;
  c["n_comb"] = g.n_comb;
  c["n_seq"] = g.n_seq;
  c["n_macro"] = g.n_macro;
  c["cluster_deferrals"] = g.cluster_deferrals;
  c["cluster_relaxations"] = g.cluster_relaxations;
  c["connections_target"] = g.connections_target;
  c["connections_made"] = g.connections_made;
  c["hidden_target"] = g.hidden_target;
  c["hidden_made"] = g.hidden_made;
  c["plan_clamps"] = g.plan_clamps;
  c["rescue_ffs"] = g.rescue_ffs;
  c["root_rescue_ffs"] = g.root_rescue_ffs;
  c["extra_ffs"] = g.extra_ffs;
  c["leftover_ffs"] = g.leftover_ffs;
  c["chain_ffs"] = g.chain_ffs;
  c["depth_rejections"] = g.depth_rejections;
  c["macro_rejections"] = g.macro_rejections;
  c["cycle_rejections"] = g.cycle_rejections;
  c["dmin_misses"] = g.dmin_misses;
  c["skipped_outputs"] = g.skipped_outputs;
  c["ports_in_added"] = g.ports_in_added;
  c["ports_in_removed"] = g.ports_in_removed;
  c["ports_out_added"] = g.ports_out_added;
  c["ports_out_removed"] = g.ports_out_removed;
  c["ports_in_shortfall"] = g.ports_in_shortfall;
  c["ports_out_shortfall"] = g.ports_out_shortfall;
  j["generator"] = c;
  return j.dump(2) + "\n";
}

std::string extract_report_json(const ExtractedParams& ex) {
  return extracted_json(ex).dump(2) + "\n";
}

double ConvergeStep::max_err() const {
  return std::max(std::max(err_n_inst, err_p), std::max(err_s_ratio, err_io));
}

ConvergeResult run_converge(const SpecParams& start, const CellLibrary& lib,
                            const ConvergeOptions& opt) {
  SpecParams input = start;
  resolve_spec_defaults(input);
  validate_spec(input);
  ConvergeResult res;
  const bool swap_counts = !input.inventory.counts.empty() && input.submodules.empty();

  for (int it = 0; it < opt.max_iter; ++it) {
    input.seed = opt.vary_seed ? hash_mix(start.seed, static_cast<uint64_t>(it)) : start.seed;
    GenResult gen = generate_netlist(input, lib);
    QuickStats q = quick_stats(gen.netlist);
    RentOptions ropt = opt.rent;
    ropt.r_ratio = input.r_ratio;
    double m_p = rent_by_traversal(gen.netlist, ropt).p;

    const double in_total = static_cast<double>(input.total_insts());
    ConvergeStep st;
    st.iter = it;
    st.ctl_n_inst = in_total;
    st.ctl_p = input.p;
    st.ctl_s_ratio = input.s_ratio;
    st.m_n_inst = static_cast<double>(q.n_inst);
    st.m_p = m_p;
    st.m_s_ratio = q.s_ratio;
    st.m_io = static_cast<double>(q.io.pi + q.io.po);
    st.err_n_inst = std::abs(st.m_n_inst - in_total) / in_total;
    st.err_p = std::abs(m_p - input.p) / input.p;
    st.err_s_ratio = input.s_ratio > 0.0
                         ? std::abs(q.s_ratio - input.s_ratio) / input.s_ratio
                         : std::abs(q.s_ratio - input.s_ratio);
    if (input.n_pi >= 0 && input.n_po >= 0) {
      double t_io = static_cast<double>(input.n_pi + input.n_po);
      st.err_io = t_io > 0.0 ? std::abs(st.m_io - t_io) / t_io : 0.0;
    }
    st.within = st.err_n_inst <= opt.tol && st.err_p <= opt.tol && st.err_s_ratio <= opt.tol &&
                st.err_io <= opt.tol;
    res.steps.push_back(st);
    if (st.within) {
      res.converged = true;
      break;
    }

    // The measured parameters become the next input (relaxed by gain), so the
    // loop walks toward a fixed point of the generate-then-measure map. A
    // hierarchy keeps its submodule sizes; size drift lands on the root.
    input.p = std::clamp(input.p + opt.gain * (m_p - input.p), 0.05, 0.95);
    if (swap_counts) {
      std::map<std::string, uint64_t> counts;
      const Netlist& nl = gen.netlist;
      for (uint32_t v = 0; v < nl.n_instances(); ++v) ++counts[nl.master_of(v).name];
      input.inventory.counts = std::move(counts);
      input.n_inst = q.n_inst;
    } else {
      int64_t adj = static_cast<int64_t>(input.n_inst) +
                    static_cast<int64_t>(std::llround(opt.gain * (st.m_n_inst - in_total)));
      input.n_inst = static_cast<uint64_t>(std::max<int64_t>(2, adj));
    }
    input.s_ratio = std::clamp(input.s_ratio + opt.gain * (q.s_ratio - input.s_ratio), 0.0, 0.95);
    input.n_pi = std::max<int64_t>(1, static_cast<int64_t>(q.io.pi));
    input.n_po = std::max<int64_t>(1, static_cast<int64_t>(q.io.po));
  }
  res.final_control = input;
  return res;
}

std::string converge_report_json(const SpecParams& start, const ConvergeOptions& opt,
                                 const ConvergeResult& r) {
  ordered_json j;
  j["start"] = spec_json(start);
  j["tol"] = opt.tol;
  j["max_iter"] = opt.max_iter;
  j["gain"] = opt.gain;
  j["vary_seed"] = opt.vary_seed;
  ordered_json steps = ordered_json::array();
  for (const ConvergeStep& s : r.steps) {
    ordered_json e;
    e["iter"] = s.iter;
    e["control"] =
        ordered_json{{"n_inst", s.ctl_n_inst}, {"p", s.ctl_p}, {"s_ratio", s.ctl_s_ratio}};
    e["measured"] = ordered_json{
        {"n_inst", s.m_n_inst}, {"p", s.m_p}, {"s_ratio", s.m_s_ratio}, {"io", s.m_io}};
    e["error"] = ordered_json{{"n_inst", s.err_n_inst},
                              {"p", s.err_p},
                              {"s_ratio", s.err_s_ratio},
                              {"io", s.err_io}};
    e["within_tol"] = s.within;
    steps.push_back(e);
  }
  j["steps"] = steps;
  j["converged"] = r.converged;
  j["iterations"] = r.steps.size();
  j["final_control"] = spec_json(r.final_control);
  return j.dump(2) + "\n";
}

std::vector<double> SweepAxis::values() const {
  if (!list.empty()) return list;
  std::vector<double> out;
  long long n = std::llround(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long long i = 0; i < n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

double SweepAxis::lo_bound() const {
  std::vector<double> v = values();
  return *std::min_element(v.begin(), v.end());
}

double SweepAxis::hi_bound() const {
  std::vector<double> v = values();
  return *std::max_element(v.begin(), v.end());
}

std::vector<SweepAxis> parse_grid(const std::string& text) {
  std::vector<SweepAxis> axes;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  auto fail = [&line](const std::string& msg) {
    throw std::runtime_error("grid:" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (size_t hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    size_t eq = s.find('=');
    if (eq == std::string_view::npos) fail("expected 'axis = lo:hi:step' or 'axis = v1,v2,...'");
    std::string key{trim(s.substr(0, eq))};
    std::string_view rest = trim(s.substr(eq + 1));
    if (key != "insts" && key != "s_ratio" && key != "p") fail("unknown axis '" + key + "'");
    for (const SweepAxis& a : axes)
      if (a.key == key) fail("duplicate axis '" + key + "'");
    SweepAxis ax;
    ax.key = key;
    auto parse_num = [&](std::string_view tok, double& out) {
      auto [pe, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
      if (ec != std::errc() || pe != tok.data() + tok.size())
        fail("invalid number '" + std::string(tok) + "'");
    };
    if (rest.find(':') != std::string_view::npos) {
      double* slot[3] = {&ax.lo, &ax.hi, &ax.step};
      size_t pos = 0;
      for (int k = 0; k < 3; ++k) {
        size_t colon = k < 2 ? rest.find(':', pos) : rest.size();
        if (colon == std::string_view::npos) fail("expected 'axis = lo:hi:step'");
        parse_num(trim(rest.substr(pos, colon - pos)), *slot[k]);
        pos = colon + 1;
      }
      if (ax.step <= 0.0) fail("step must be > 0");
      if (ax.hi < ax.lo) fail("hi must be >= lo");
    } else {
      size_t pos = 0;
      while (true) {
        size_t comma = rest.find(',', pos);
        size_t end = comma == std::string_view::npos ? rest.size() : comma;
        double v = 0;
        parse_num(trim(rest.substr(pos, end - pos)), v);
        ax.list.push_back(v);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
      }
    }
    axes.push_back(std::move(ax));
  }
  if (axes.empty()) throw std::runtime_error("grid: no axes defined");
  return axes;
}

std::map<std::string, double> expected_mix(const SpecParams& spec, const CellLibrary& lib) {
  std::map<std::string, double> mix;
  SpecParams r = spec;
  resolve_spec_defaults(r);
  auto walk = [&](auto&& self, const SpecParams& m) -> void {
    if (!m.inventory.counts.empty()) {
      for (const auto& [name, c] : m.inventory.counts) mix[name] += static_cast<double>(c);
    } else {
      uint64_t n_macro = m.n_macro;
      uint64_t n_seq = static_cast<uint64_t>(std::llround(m.s_ratio * static_cast<double>(m.n_inst)));
      if (n_seq + n_macro > m.n_inst) n_seq = m.n_inst - n_macro;
      uint64_t n_comb = m.n_inst - n_seq - n_macro;
      auto category = [](const CellMaster& cm) { return cm.is_sequential ? 2 : cm.is_macro ? 1 : 0; };
      double wc = 0, ws = 0, wm = 0;
      for (const auto& [name, w] : m.inventory.weights) {
        int mi = lib.find(name);
        if (mi < 0 || w <= 0.0) continue;
        int cat = category(lib.master(static_cast<uint32_t>(mi)));
        (cat == 2 ? ws : cat == 1 ? wm : wc) += w;
      }
      auto spread = [&](uint64_t n, bool seq, bool macro, double wsum) {
        if (!n) return;
        int want = seq ? 2 : macro ? 1 : 0;
        if (wsum > 0.0) {
          for (const auto& [name, w] : m.inventory.weights) {
            int mi = lib.find(name);
            if (mi < 0 || w <= 0.0) continue;
            if (category(lib.master(static_cast<uint32_t>(mi))) == want)
              mix[name] += static_cast<double>(n) * w / wsum;
          }
        } else if (seq) {
          mix[lib.master(lib.default_flipflop()).name] += static_cast<double>(n);
        } else if (macro) {
          for (uint32_t k = 0; k < lib.size(); ++k)
            if (lib.master(k).is_macro) {
              mix[lib.master(k).name] += static_cast<double>(n);
              break;
            }
        } else {
          uint64_t combs = 0;
          for (uint32_t k = 0; k < lib.size(); ++k)
            if (!lib.master(k).is_sequential && !lib.master(k).is_macro) ++combs;
          if (combs)
            for (uint32_t k = 0; k < lib.size(); ++k)
              if (!lib.master(k).is_sequential && !lib.master(k).is_macro)
                mix[lib.master(k).name] += static_cast<double>(n) / static_cast<double>(combs);
        }
      };
      spread(n_comb, false, false, wc);
      spread(n_seq, true, false, ws);
      spread(n_macro, false, true, wm);
    }
    for (const SpecParams& c : m.submodules) self(self, c);
  };
  walk(walk, r);
  return mix;
}

std::string run_sweep_csv(const SpecParams& base, const std::vector<SweepAxis>& grid,
                          const CellLibrary& lib, int jobs) {
  std::vector<std::vector<double>> vals;
  int64_t total = 1;
  for (const SweepAxis& a : grid) {
    vals.push_back(a.values());
    total *= static_cast<int64_t>(vals.back().size());
  }
  std::string header;
  for (const SweepAxis& a : grid) header += a.key + ",";
  header +=
      "excluded,outcome,valid,n_inst,n_net,n_pi,n_po,n_seq,d_max,md_max,loop,p_partition,"
      "p_traversal,t_avg,s_ratio,mix_cosine,depth_ok";
  std::vector<std::string> rows(static_cast<size_t>(total));

#if defined(_OPENMP)
  const int n_threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
#else
  (void)jobs;
#endif
  for (int64_t idx = 0; idx < total; ++idx) {
    std::vector<double> pt(grid.size());
    int64_t rem = idx;
    for (size_t k = grid.size(); k-- > 0;) {
      pt[k] = vals[k][static_cast<size_t>(rem) % vals[k].size()];
      rem /= static_cast<int64_t>(vals[k].size());
    }
    SpecParams spec = base;
    uint64_t h = base.seed;
    std::string row;
    for (size_t k = 0; k < grid.size(); ++k) {
      apply_axis(spec, grid[k].key, pt[k]);
      h = hash_mix(h, std::bit_cast<uint64_t>(pt[k]));
      row += format_double(pt[k]);
      row += ',';
    }
    spec.seed = h;
    // A point the generator cannot take (or that dies inside it) is excluded
    // rather than aborting the sweep; exceptions must not cross the parallel
    // loop boundary.
    try {
      validate_spec(spec);
      GenResult gen = generate_netlist(spec, lib);
      bool valid = gen.netlist.validate().empty();
      RentOptions ropt;
      ropt.r_ratio = spec.r_ratio;
      ropt.seed = h;
      ExtractedParams ex = extract_params(gen.netlist, ropt);
      bool depth_ok = !ex.depth.has_loop && ex.depth.d_max <= max_target_depth(spec) &&
                      ex.depth.md_max <= max_target_macro_depth(spec);
      double cosine = cosine_similarity(expected_mix(spec, lib), to_weight_map(ex.cell_counts));

      // A point whose extracted axis values leave the swept range is excluded;
      // each axis is judged independently.
      std::string outcome;
      for (const SweepAxis& a : grid) {
        double v = a.key == "insts"     ? static_cast<double>(ex.n_inst)
                   : a.key == "s_ratio" ? ex.s_ratio
                                        : ex.p_partition;
        const char* side = v < a.lo_bound() ? "<min" : v > a.hi_bound() ? ">max" : nullptr;
        if (!side) continue;
        if (!outcome.empty()) outcome += ';';
        outcome += a.key + side;
      }
      if (outcome.empty()) outcome = "ok";

      row += outcome == "ok" ? "0," : "1,";
      row += outcome + ",";
      row += valid ? "1," : "0,";
      row += std::to_string(ex.n_inst) + ",";
      row += std::to_string(ex.n_net) + ",";
      row += std::to_string(ex.n_pi) + ",";
      row += std::to_string(ex.n_po) + ",";
      row += std::to_string(ex.n_seq) + ",";
      row += std::to_string(ex.depth.d_max) + ",";
      row += std::to_string(ex.depth.md_max) + ",";
      row += ex.depth.has_loop ? "1," : "0,";
      row += format_double(ex.p_partition) + ",";
      row += format_double(ex.p_traversal) + ",";
      row += format_double(ex.t_avg) + ",";
      row += format_double(ex.s_ratio) + ",";
      row += format_double(cosine) + ",";
      row += depth_ok ? "1" : "0";
      rows[static_cast<size_t>(idx)] = row;
    } catch (const std::exception&) {
      rows[static_cast<size_t>(idx)] = row + "1,error,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0";
    }
  }

  std::string out = header;
  out += '\n';
  for (const std::string& r : rows) {
    out += r;
    out += '\n';
  }
  return out;
}

SweepSummary summarize_sweep_csv(const std::string& csv) {
  SweepSummary s;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("sweep: empty csv");
  std::vector<std::string> cols;
  for (size_t pos = 0; pos <= line.size();) {
    size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    cols.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  auto col_of = [&](const std::string& name) {
    auto it = std::find(cols.begin(), cols.end(), name);
    if (it == cols.end()) throw std::runtime_error("sweep: csv lacks column " + name);
    return static_cast<size_t>(it - cols.begin());
  };
  size_t c_outcome = col_of("outcome");
  size_t c_valid = col_of("valid");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    for (size_t pos = 0; pos <= line.size();) {
      size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      f.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    ++s.points;
    const std::string& outcome = f.at(c_outcome);
    if (outcome == "ok") {
      ++s.ok;
    } else {
      ++s.excluded;
      if (outcome == "error") ++s.errors;
    }
    if (f.at(c_valid) == "0" && outcome != "error") ++s.invalid;
    for (size_t pos = 0; pos < outcome.size();) {
      size_t semi = outcome.find(';', pos);
      if (semi == std::string::npos) semi = outcome.size();
      std::string part = outcome.substr(pos, semi - pos);
      if (size_t lt = part.find("<min"); lt != std::string::npos)
        ++s.below[part.substr(0, lt)];
      else if (size_t gt = part.find(">max"); gt != std::string::npos)
        ++s.above[part.substr(0, gt)];
      pos = semi + 1;
    }
  }
  return s;
}

std::string sweep_summary_json(const SweepSummary& s) {
  ordered_json j;
  j["points"] = s.points;
  j["ok"] = s.ok;
  j["excluded"] = s.excluded;
  j["errors"] = s.errors;
  j["invalid"] = s.invalid;
  ordered_json axes = ordered_json::object();
  std::vector<std::string> keys;
  for (const auto& [k, v] : s.below) keys.push_back(k);
  for (const auto& [k, v] : s.above)
    if (!s.below.count(k)) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const std::string& k : keys) {
    ordered_json e;
    e["below_min"] = s.below.count(k) ? s.below.at(k) : 0;
    e["above_max"] = s.above.count(k) ? s.above.at(k) : 0;
    axes[k] = e;
  }
  j["axes"] = axes;
  return j.dump(2) + "\n";
}

CompareResult run_compare(const Netlist& a, const Netlist& b, const RentOptions& opt) {
  CompareResult r;
  r.a = extract_params(a, opt);
  r.b = extract_params(b, opt);
  r.mix_cosine = cosine_similarity(to_weight_map(r.a.cell_counts), to_weight_map(r.b.cell_counts));
  return r;
}

std::string compare_report_json(const CompareResult& r) {
  ordered_json j;
  j["a"] = extracted_json(r.a);
  j["b"] = extracted_json(r.b);
  j["mix_cosine"] = r.mix_cosine;
  return j.dump(2) + "\n";
}

}  // namespace sn
