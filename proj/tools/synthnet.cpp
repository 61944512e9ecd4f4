#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthnet/harness.hpp"
#include "synthnet/verilog.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// '-' targets stdout; everything else is a file path.
void write_out(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthnet: synthetic netlist generation and inverse analysis"};
  app.require_subcommand(1);

  std::string spec_path, lef_path, in_path, out_path, report_path, grid_path, a_path, b_path;
  std::string mean = "arith", method = "partition";
  std::vector<std::string> clock_pins;
  int pin_type = 2, max_iter = 50, jobs = 0;
  double r_ratio = 0.5, tol = 0.01, gain = 1.0;
  std::uint64_t est_seed = 1, seed_override = 0;
  bool flat = false, serial = false, vary_seed = false;
  int converge_failed = 0;

  auto add_lef = [&](CLI::App* cmd) {
    cmd->add_option("--lef", lef_path, "cell library in LEF format")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--clock-pin", clock_pins, "extra pin names treated as clock pins");
  };
  auto add_estimator = [&](CLI::App* cmd) {
    cmd->add_option("--pin-type", pin_type, "block pin counting convention")
        ->check(CLI::IsMember({1, 2, 3}));
    cmd->add_option("--mean", mean, "level averaging")->check(CLI::IsMember({"arith", "geom"}));
    cmd->add_option("--r-ratio", r_ratio, "fit window: block sizes up to r_ratio * n_inst");
    cmd->add_option("--seed", est_seed, "estimator seed");
    cmd->add_flag("--serial", serial, "single-threaded estimators");
  };
  auto rent_options = [&]() {
    sn::RentOptions opt;
    opt.pin_type = pin_type;
    opt.geom_mean = mean == "geom";
    opt.r_ratio = r_ratio;
    opt.seed = est_seed;
    opt.parallel = !serial;
    return opt;
  };

  CLI::App* g = app.add_subcommand("generate", "generate a netlist from a parameter file");
  g->add_option("--spec", spec_path, "parameter file")->required()->check(CLI::ExistingFile);
  add_lef(g);
  g->add_option("--seed", seed_override, "override the seed from the parameter file");
  g->add_option("--out", out_path, "write structural Verilog here ('-' = stdout)");
  g->add_flag("--flat", flat, "flatten the hierarchy in the Verilog output");
  g->add_option("--report", report_path, "write the JSON run report here ('-' = stdout)");
  g->callback([&] {
    sn::SpecParams spec = sn::parse_specfile_file(spec_path);
    if (g->count("--seed")) spec.seed = seed_override;
    sn::CellLibrary lib = sn::parse_lef_file(lef_path, clock_pins);
    sn::GenerateRun run = sn::run_generate(spec, lib);
    std::fprintf(stderr, "generated %u instances, %u nets in %.3f s\n",
                 run.gen.netlist.n_instances(), run.gen.netlist.n_nets(), run.seconds);
    if (!out_path.empty()) write_out(out_path, sn::write_verilog(run.gen.netlist, flat));
    if (!report_path.empty())
      write_out(report_path, sn::generate_report_json(run));
    else if (out_path.empty())
      write_out("-", sn::generate_report_json(run));
  });

  CLI::App* x = app.add_subcommand("extract", "inverse analysis of a structural Verilog netlist");
  x->add_option("--in", in_path, "netlist to analyze")->required()->check(CLI::ExistingFile);
  add_lef(x);
  add_estimator(x);
  x->add_option("--report", report_path, "write the JSON report here ('-' = stdout)");
  x->callback([&] {
    sn::CellLibrary lib = sn::parse_lef_file(lef_path, clock_pins);
    sn::Netlist nl = sn::read_verilog_file(in_path, lib);
    sn::ExtractedParams ex = sn::extract_params(nl, rent_options());
    write_out(report_path.empty() ? "-" : report_path, sn::extract_report_json(ex));
  });

  CLI::App* an = app.add_subcommand("analyze", "run one Rent-exponent estimator");
  an->add_option("--in", in_path, "netlist to analyze")->required()->check(CLI::ExistingFile);
  add_lef(an);
  an->add_option("--method", method, "estimator")->check(CLI::IsMember({"partition", "bfs"}));
  add_estimator(an);
  an->add_option("--report", report_path, "write the JSON report here ('-' = stdout)");
  an->callback([&] {
    sn::CellLibrary lib = sn::parse_lef_file(lef_path, clock_pins);
    sn::Netlist nl = sn::read_verilog_file(in_path, lib);
    sn::RentOptions opt = rent_options();
    sn::RentEstimate est =
        method == "partition" ? sn::rent_by_partitioning(nl, opt) : sn::rent_by_traversal(nl, opt);
    ordered_json j;
    j["method"] = method;
    j["pin_type"] = opt.pin_type;
    j["mean"] = mean;
    j["r_ratio"] = opt.r_ratio;
    j["seed"] = opt.seed;
    j["p"] = est.p;
    j["k"] = est.k;
    ordered_json levels = ordered_json::array();
    for (const sn::RentLevel& lv : est.levels)
      levels.push_back(ordered_json{{"size", lv.size}, {"pins", lv.pins}, {"blocks", lv.blocks}});
    j["levels"] = levels;
    write_out(report_path.empty() ? "-" : report_path, j.dump(2) + "\n");
  });

  CLI::App* c = app.add_subcommand(
      "converge", "feed measured parameters back as inputs until they reach a fixed point");
  c->add_option("--spec", spec_path, "starting parameter file")
      ->required()
      ->check(CLI::ExistingFile);
  add_lef(c);
  c->add_option("--tol", tol, "relative tolerance per tracked quantity");
  c->add_option("--max-iter", max_iter, "iteration cap");
  c->add_option("--gain", gain, "relaxation on the feedback step (1 = pure substitution)");
  c->add_flag("--vary-seed", vary_seed, "re-roll the generation seed each iteration");
  c->add_option("--report", report_path, "write the JSON trace here ('-' = stdout)");
  c->callback([&] {
    sn::SpecParams start = sn::parse_specfile_file(spec_path);
    sn::CellLibrary lib = sn::parse_lef_file(lef_path, clock_pins);
    sn::ConvergeOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    opt.gain = gain;
    opt.vary_seed = vary_seed;
    sn::ConvergeResult res = sn::run_converge(start, lib, opt);
    std::fprintf(stderr, "%s after %zu iterations\n",
                 res.converged ? "converged" : "did not converge", res.steps.size());
    write_out(report_path.empty() ? "-" : report_path,
              sn::converge_report_json(start, opt, res));
    converge_failed = res.converged ? 0 : 1;
  });

  CLI::App* s = app.add_subcommand("sweep", "grid sweep: generate + analyze every point");
  s->add_option("--spec", spec_path, "base parameter file")->required()->check(CLI::ExistingFile);
  s->add_option("--grid", grid_path, "axis file: 'axis = lo:hi:step' or 'axis = v1,v2,...' per line")
      ->required()
      ->check(CLI::ExistingFile);
  add_lef(s);
  s->add_option("--out", out_path, "write the CSV here ('-' = stdout)")->required();
  s->add_option("--jobs", jobs, "parallel sweep points (0 = runtime default)");
  s->callback([&] {
    sn::SpecParams base = sn::parse_specfile_file(spec_path);
    std::vector<sn::SweepAxis> grid = sn::parse_grid(read_file(grid_path));
    sn::CellLibrary lib = sn::parse_lef_file(lef_path, clock_pins);
    std::string csv = sn::run_sweep_csv(base, grid, lib, jobs);
    write_out(out_path, csv);
    if (out_path != "-") std::fputs(sn::sweep_summary_json(sn::summarize_sweep_csv(csv)).c_str(), stdout);
  });

  CLI::App* cp = app.add_subcommand("compare", "side-by-side analysis of two netlists");
  cp->add_option("--a", a_path, "first netlist")->required()->check(CLI::ExistingFile);
  cp->add_option("--b", b_path, "second netlist")->required()->check(CLI::ExistingFile);
  add_lef(cp);
  add_estimator(cp);
  cp->add_option("--report", report_path, "write the JSON report here ('-' = stdout)");
  cp->callback([&] {
    sn::CellLibrary lib = sn::parse_lef_file(lef_path, clock_pins);
    sn::Netlist na = sn::read_verilog_file(a_path, lib);
    sn::Netlist nb = sn::read_verilog_file(b_path, lib);
    sn::CompareResult res = sn::run_compare(na, nb, rent_options());
    write_out(report_path.empty() ? "-" : report_path, sn::compare_report_json(res));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return converge_failed;
}
