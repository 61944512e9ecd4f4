#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "synthnet/spec.hpp"

namespace sn {

// Shortest round-trip text for a double (std::to_chars), shared by the spec
// writer and the report/CSV emitters so numeric output is byte-stable.
std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Parser {
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("spec:" + std::to_string(line) + ": " + msg);
  }

  double num(std::string_view v) {
    double out;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail("invalid number '" + std::string(v) + "'");
    return out;
  }

  template <class Int>
  Int integer(std::string_view v) {
    Int out;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size())
      fail("invalid integer '" + std::string(v) + "'");
    return out;
  }

  void scalar_key(SpecParams& m, std::string_view key, std::string_view val) {
    if (key == "name") m.name = std::string(val);
    else if (key == "insts") m.n_inst = integer<uint64_t>(val);
    else if (key == "p") m.p = num(val);
    else if (key == "s_ratio") m.s_ratio = num(val);
    else if (key == "t_avg") m.t_avg = num(val);
    else if (key == "g_avg") m.g_avg = num(val);
    else if (key == "alpha") m.alpha = num(val);
    else if (key == "sigma_p") m.sigma_p = num(val);
    else if (key == "sigma_g") m.sigma_g = num(val);
    else if (key == "r_ratio") m.r_ratio = num(val);
    else if (key == "d_min") m.d_min = integer<int>(val);
    else if (key == "d_max") m.d_max = integer<int>(val);
    else if (key == "md_min") m.md_min = integer<int>(val);
    else if (key == "md_max") m.md_max = integer<int>(val);
    else if (key == "n_macro") m.n_macro = integer<uint64_t>(val);
    else if (key == "n_pi") m.n_pi = integer<int64_t>(val);
    else if (key == "n_po") m.n_po = integer<int64_t>(val);
    else if (key == "seed") m.seed = integer<uint64_t>(val);
    else fail("unknown key '" + std::string(key) + "'");
  }
};

// Copies tunables a nested module should default to; sizes, ports, seed and
// the cell mix stay module-local.
void inherit_scalars(SpecParams& child, const SpecParams& parent) {
  child.p = parent.p;
  child.s_ratio = parent.s_ratio;
  child.t_avg = parent.t_avg;
  child.g_avg = parent.g_avg;
  child.alpha = parent.alpha;
  child.sigma_p = parent.sigma_p;
  child.sigma_g = parent.sigma_g;
  child.r_ratio = parent.r_ratio;
  child.d_min = parent.d_min;
  child.d_max = parent.d_max;
  child.md_min = parent.md_min;
  child.md_max = parent.md_max;
}

SpecParams* find_child(SpecParams& m, std::string_view name) {
  for (SpecParams& c : m.submodules)
    if (c.name == name) return &c;
  return nullptr;
}

void finalize(SpecParams& m, const std::string& path) {
  if (!m.inventory.counts.empty()) {
    uint64_t total = m.inventory.total_counts();
    if (m.n_inst == 0) m.n_inst = total;
    else if (m.n_inst != total)
      throw std::runtime_error("spec: " + path + "insts = " + std::to_string(m.n_inst) +
                               " does not match [cells] total " + std::to_string(total));
  }
  if (m.sigma_p < 0.0) m.sigma_p = m.p / 2.0;
  if (m.md_min < 0) m.md_min = m.d_min;
  if (m.md_max < 0) m.md_max = m.d_max;
  for (SpecParams& c : m.submodules) finalize(c, path + c.name + "/");
}

}  // namespace

void resolve_spec_defaults(SpecParams& p) { finalize(p, ""); }

namespace {

void validate_one(const SpecParams& m, const std::string& prefix) {
  auto bad = [&](const std::string& field, const std::string& value, const std::string& range) {
    throw std::runtime_error("spec: " + prefix + field + " = " + value + " out of range " + range);
  };
  if (m.n_inst == 0)
    throw std::runtime_error("spec: " + prefix + "insts must be at least 1");
  if (m.p <= 0.0 || m.p >= 1.0) bad("p", format_double(m.p), "(0, 1)");
  if (m.s_ratio < 0.0 || m.s_ratio >= 1.0) bad("s_ratio", format_double(m.s_ratio), "[0, 1)");
  if (m.t_avg < 0.0 || (m.t_avg > 0.0 && m.t_avg < 1.0)) bad("t_avg", format_double(m.t_avg), "[1, inf)");
  if (m.g_avg <= 0.0 || m.g_avg >= 1.0) bad("g_avg", format_double(m.g_avg), "(0, 1)");
  if (m.alpha < 0.0) bad("alpha", format_double(m.alpha), "[0, inf)");
  if (m.sigma_p >= 0.0 && m.sigma_p >= 1.0) bad("sigma_p", format_double(m.sigma_p), "[0, 1)");
  if (m.sigma_g < 0.0) bad("sigma_g", format_double(m.sigma_g), "[0, inf)");
  if (m.r_ratio <= 0.0 || m.r_ratio > 1.0) bad("r_ratio", format_double(m.r_ratio), "(0, 1]");
  if (m.d_min < 0) bad("d_min", std::to_string(m.d_min), "[0, inf)");
  if (m.d_max < m.d_min) bad("d_max", std::to_string(m.d_max), "[d_min, inf)");
  if (m.md_min >= 0 && m.md_max >= 0 && m.md_max < m.md_min)
    bad("md_max", std::to_string(m.md_max), "[md_min, inf)");
  if (m.n_macro > m.n_inst) bad("n_macro", std::to_string(m.n_macro), "[0, insts]");
  if (m.n_pi == 0) bad("n_pi", "0", "[1, inf)");
  if (m.n_po == 0) bad("n_po", "0", "[1, inf)");
  double wsum = 0.0;
  for (const auto& [name, w] : m.inventory.weights) {
    if (w < 0.0)
      throw std::runtime_error("spec: " + prefix + "cell weight " + name + " = " + format_double(w) +
                               " out of range [0, inf)");
    wsum += w;
  }
  if (!m.inventory.weights.empty() && wsum <= 0.0)
    throw std::runtime_error("spec: " + prefix + "cell weights sum to zero");
  for (const SpecParams& c : m.submodules) validate_one(c, prefix + "submodule " + c.name + ": ");
}

void write_one(std::ostringstream& out, const SpecParams& m, const std::string& path) {
  if (path.empty()) {
    out << "name = " << m.name << "\n";
  } else {
    out << "\n[submodule \"" << path << "\"]\n";
  }
  out << "insts = " << m.n_inst << "\n";
  out << "p = " << format_double(m.p) << "\n";
  out << "s_ratio = " << format_double(m.s_ratio) << "\n";
  if (m.t_avg > 0.0) out << "t_avg = " << format_double(m.t_avg) << "\n";
  out << "g_avg = " << format_double(m.g_avg) << "\n";
  out << "alpha = " << format_double(m.alpha) << "\n";
  if (m.sigma_p >= 0.0) out << "sigma_p = " << format_double(m.sigma_p) << "\n";
  out << "sigma_g = " << format_double(m.sigma_g) << "\n";
  out << "r_ratio = " << format_double(m.r_ratio) << "\n";
  out << "d_min = " << m.d_min << "\n";
  out << "d_max = " << m.d_max << "\n";
  if (m.md_min >= 0) out << "md_min = " << m.md_min << "\n";
  if (m.md_max >= 0) out << "md_max = " << m.md_max << "\n";
  if (m.n_macro > 0) out << "n_macro = " << m.n_macro << "\n";
  if (m.n_pi >= 0) out << "n_pi = " << m.n_pi << "\n";
  if (m.n_po >= 0) out << "n_po = " << m.n_po << "\n";
  if (path.empty()) out << "seed = " << m.seed << "\n";
  if (!m.inventory.counts.empty()) {
    out << "\n[cells]\n";
    for (const auto& [name, count] : m.inventory.counts) out << name << " = " << count << "\n";
  }
  if (!m.inventory.weights.empty()) {
    out << "\n[cell_weights]\n";
    for (const auto& [name, w] : m.inventory.weights) out << name << " = " << format_double(w) << "\n";
  }
  for (const SpecParams& c : m.submodules)
    write_one(out, c, path.empty() ? c.name : path + "/" + c.name);
}

}  // namespace

uint64_t CellInventory::total_counts() const {
  uint64_t total = 0;
  for (const auto& [name, count] : counts) total += count;
  return total;
}

uint64_t SpecParams::total_insts() const {
  uint64_t total = n_inst;
  for (const SpecParams& c : submodules) total += c.total_insts();
  return total;
}

const SpecParams* SpecParams::find_submodule(const std::string& sub) const {
  for (const SpecParams& c : submodules)
    if (c.name == sub) return &c;
  return nullptr;
}

SpecParams parse_specfile(const std::string& text) {
  SpecParams root;
  Parser ps;
  enum class Section { kParams, kCells, kWeights };
  SpecParams* cur = &root;
  Section section = Section::kParams;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++ps.line;
    std::string_view sv(raw);
    if (size_t hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;

    if (sv.front() == '[') {
      if (sv.back() != ']') ps.fail("unterminated section header");
      std::string_view head = trim(sv.substr(1, sv.size() - 2));
      if (head == "cells") {
        section = Section::kCells;
      } else if (head == "cell_weights") {
        section = Section::kWeights;
      } else if (head.substr(0, 9) == "submodule") {
        std::string_view path = trim(head.substr(9));
        if (path.size() >= 2 && path.front() == '"' && path.back() == '"')
          path = path.substr(1, path.size() - 2);
        if (path.empty()) ps.fail("empty submodule path");
        SpecParams* parent = &root;
        size_t start = 0;
        std::string_view leaf;
        while (true) {
          size_t slash = path.find('/', start);
          std::string_view seg = path.substr(start, slash == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : slash - start);
          if (seg.empty()) ps.fail("empty segment in submodule path '" + std::string(path) + "'");
          if (slash == std::string_view::npos) {
            leaf = seg;
            break;
          }
          SpecParams* next = find_child(*parent, seg);
          if (!next)
            ps.fail("submodule path '" + std::string(path) + "' references undeclared submodule '" +
                    std::string(seg) + "'");
          parent = next;
          start = slash + 1;
        }
        if (find_child(*parent, leaf))
          ps.fail("submodule '" + std::string(path) + "' declared twice");
        SpecParams child;
        child.name = std::string(leaf);
        inherit_scalars(child, *parent);
        parent->submodules.push_back(std::move(child));
        cur = &parent->submodules.back();
        section = Section::kParams;
      } else {
        ps.fail("unknown section [" + std::string(head) + "]");
      }
      continue;
    }

    size_t eq = sv.find('=');
    if (eq == std::string_view::npos) ps.fail("expected 'key = value'");
    std::string_view key = trim(sv.substr(0, eq));
    std::string_view val = trim(sv.substr(eq + 1));
    if (key.empty() || val.empty()) ps.fail("expected 'key = value'");
    switch (section) {
      case Section::kParams:
        ps.scalar_key(*cur, key, val);
        break;
      case Section::kCells:
        if (!cur->inventory.counts.emplace(std::string(key), ps.integer<uint64_t>(val)).second)
          ps.fail("duplicate cell count for " + std::string(key));
        break;
      case Section::kWeights:
        if (!cur->inventory.weights.emplace(std::string(key), ps.num(val)).second)
          ps.fail("duplicate cell weight for " + std::string(key));
        break;
    }
  }

  finalize(root, "");
  validate_spec(root);
  return root;
}

SpecParams parse_specfile_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_specfile(ss.str());
}

void validate_spec(const SpecParams& p) { validate_one(p, ""); }

std::string write_specfile(const SpecParams& p) {
  std::ostringstream out;
  write_one(out, p, "");
  return out.str();
}

void write_specfile_file(const SpecParams& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << write_specfile(p);
}

}  // namespace sn
