#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "synthnet/verilog.hpp"

namespace sn {
namespace {

bool needs_escape(const std::string& s) {
  if (s.empty()) return true;
  if ((s[0] >= '0' && s[0] <= '9') || s[0] == '$') return true;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '$';
    if (!ok) return true;
  }
  return false;
}

void append_id(std::string& out, const std::string& s) {
  if (needs_escape(s)) {
    out += '\\';
    out += s;
    out += ' ';  // escaped identifiers are terminated by whitespace
  } else {
    out += s;
  }
}

struct ModuleWriter {
  const Netlist& nl;
  uint32_t mod;
  // Local name of each referenced net (port names win over wire names).
  std::unordered_map<uint32_t, std::string> net_alias;
  // Input-port claims: pin -> port name, child port -> wrapping port name.
  std::unordered_map<uint64_t, std::string> pin_claim;
  std::unordered_map<uint32_t, std::string> child_port_claim;

  ModuleWriter(const Netlist& n, uint32_t m) : nl(n), mod(m) {
    for (uint32_t pid : nl.module(mod).ports) {
      const Port& p = nl.port(pid);
      if (p.dir == PinDir::kInput) {
        for (uint32_t pin : p.pins) pin_claim[pin] = p.name;
        for (uint32_t inner : p.inner) child_port_claim[inner] = p.name;
        if (mod == 0 && p.net != kNone) net_alias[p.net] = p.name;
      } else if (p.net != kNone) {
        net_alias[p.net] = p.name;
      }
    }
  }

  std::string net_ref(uint32_t net) {
    auto it = net_alias.find(net);
    if (it != net_alias.end()) return it->second;
    return nl.net_name(net);
  }

  std::string pin_ref(uint32_t inst, uint32_t pin, uint32_t net) {
    uint64_t key = static_cast<uint64_t>(nl.instance(inst).pin_offset) + pin;
    auto it = pin_claim.find(key);
    if (it != pin_claim.end()) return it->second;
    return net_ref(net);
  }
};

void write_module(const Netlist& nl, uint32_t mod, std::string& out) {
  const Module& m = nl.module(mod);
  ModuleWriter w(nl, mod);

  // Reject nets that would need a continuous assignment.
  if (mod == 0) {
    for (uint32_t pid : m.ports) {
      const Port& p = nl.port(pid);
      if (p.dir != PinDir::kInput || p.net == kNone) continue;
      for (const Endpoint& s : nl.net(p.net).sinks)
        if (s.is_port())
          throw std::runtime_error("cannot write net connecting port " + p.name +
                                   " directly to port " + nl.port(s.index).name);
    }
  }

  out += "module ";
  append_id(out, m.name);
  out += " (";
  bool first = true;
  for (uint32_t pid : m.ports) {
    if (!first) out += ", ";
    first = false;
    append_id(out, nl.port(pid).name);
  }
  out += ");\n";
  for (uint32_t pid : m.ports) {
    const Port& p = nl.port(pid);
    out += p.dir == PinDir::kInput ? "  input " : "  output ";
    append_id(out, p.name);
    out += ";\n";
  }

  // Collect references: leaf instance pins, then child-module port bindings.
  struct ChildRef {
    uint32_t child;
    std::vector<std::pair<std::string, std::string>> conns;  // port -> local name
  };
  std::vector<uint32_t> leafs;
  for (uint32_t inst = 0; inst < nl.n_instances(); ++inst)
    if (nl.instance(inst).module == mod) leafs.push_back(inst);

  std::map<uint32_t, std::string> wires;  // net id -> local wire name
  auto note_wire = [&](uint32_t net, const std::string& name) {
    if (!w.net_alias.count(net)) wires.emplace(net, name);
  };

  for (uint32_t inst : leafs) {
    const CellMaster& cm = nl.master_of(inst);
    for (uint32_t pin = 0; pin < cm.pins.size(); ++pin) {
      uint32_t net = nl.pin_net(inst, pin);
      if (net == kNone) continue;
      uint64_t key = static_cast<uint64_t>(nl.instance(inst).pin_offset) + pin;
      if (!w.pin_claim.count(key)) note_wire(net, nl.net_name(net));
    }
  }
  std::vector<ChildRef> child_refs;
  for (uint32_t child : m.children) {
    ChildRef cr{child, {}};
    for (uint32_t cpid : nl.module(child).ports) {
      const Port& cp = nl.port(cpid);
      auto claimed = w.child_port_claim.find(cpid);
      std::string local;
      if (claimed != w.child_port_claim.end()) {
        local = claimed->second;
      } else {
        if (cp.net == kNone)
          throw std::runtime_error("unconnected port " + cp.name + " on module " +
                                   nl.module(child).name);
        local = w.net_ref(cp.net);
        note_wire(cp.net, local);
      }
      cr.conns.emplace_back(cp.name, std::move(local));
    }
    child_refs.push_back(std::move(cr));
  }

  // wires.emplace keeps the first name seen; emit in net-id order.
  for (const auto& [net, name] : wires) {
    (void)net;
    out += "  wire ";
    append_id(out, name);
    out += ";\n";
  }

  for (uint32_t inst : leafs) {
    const CellMaster& cm = nl.master_of(inst);
    out += "  ";
    append_id(out, cm.name);
    out += ' ';
    append_id(out, nl.instance_name(inst));
    out += " (";
    bool first_pin = true;
    for (uint32_t pin = 0; pin < cm.pins.size(); ++pin) {
      uint32_t net = nl.pin_net(inst, pin);
      if (net == kNone) continue;
      if (!first_pin) out += ", ";
      first_pin = false;
      out += '.';
      append_id(out, cm.pins[pin].name);
      out += '(';
      append_id(out, w.pin_ref(inst, pin, net));
      out += ')';
    }
    out += ");\n";
  }
  for (const ChildRef& cr : child_refs) {
    out += "  ";
    append_id(out, nl.module(cr.child).name);
    out += ' ';
    append_id(out, nl.module(cr.child).inst_name);
    out += " (";
    bool first_pin = true;
    for (const auto& [pname, local] : cr.conns) {
      if (!first_pin) out += ", ";
      first_pin = false;
      out += '.';
      append_id(out, pname);
      out += '(';
      append_id(out, local);
      out += ')';
    }
    out += ");\n";
  }
  out += "endmodule\n";
}

std::string flat_prefix(const Netlist& nl, uint32_t mod) {
  std::string prefix;
  std::vector<uint32_t> chain;
  for (uint32_t m = mod; m != 0 && m != kNone; m = nl.module(m).parent) chain.push_back(m);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    prefix += nl.module(*it).inst_name + "__";
  return prefix;
}

void write_flat(const Netlist& nl, std::string& out) {
  const Module& top = nl.module(0);
  std::unordered_map<uint32_t, std::string> net_alias;
  for (uint32_t pid : top.ports) {
    const Port& p = nl.port(pid);
    if (p.net != kNone) net_alias[p.net] = p.name;
    if (p.dir == PinDir::kInput && p.net != kNone)
      for (const Endpoint& s : nl.net(p.net).sinks)
        if (s.is_port())
          throw std::runtime_error("cannot write net connecting port " + p.name +
                                   " directly to port " + nl.port(s.index).name);
  }

  out += "module ";
  append_id(out, top.name);
  out += " (";
  bool first = true;
  for (uint32_t pid : top.ports) {
    if (!first) out += ", ";
    first = false;
    append_id(out, nl.port(pid).name);
  }
  out += ");\n";
  for (uint32_t pid : top.ports) {
    const Port& p = nl.port(pid);
    out += p.dir == PinDir::kInput ? "  input " : "  output ";
    append_id(out, p.name);
    out += ";\n";
  }

  auto flat_net_name = [&](uint32_t net) {
    auto it = net_alias.find(net);
    if (it != net_alias.end()) return it->second;
    const Net& n = nl.net(net);
    if (n.name.empty()) return nl.net_name(net);  // auto names are globally unique
    return flat_prefix(nl, n.module) + n.name;
  };

  std::map<uint32_t, std::string> wires;
  for (uint32_t net = 0; net < nl.n_nets(); ++net) {
    const Net& n = nl.net(net);
    if (n.drivers.empty() && n.sinks.empty()) continue;
    if (!net_alias.count(net)) wires.emplace(net, flat_net_name(net));
  }
  for (const auto& [net, name] : wires) {
    (void)net;
    out += "  wire ";
    append_id(out, name);
    out += ";\n";
  }

  for (uint32_t inst = 0; inst < nl.n_instances(); ++inst) {
    const Instance& in = nl.instance(inst);
    const CellMaster& cm = nl.master_of(inst);
    out += "  ";
    append_id(out, cm.name);
    out += ' ';
    std::string name = in.name.empty() ? nl.instance_name(inst)
                                       : flat_prefix(nl, in.module) + in.name;
    append_id(out, name);
    out += " (";
    bool first_pin = true;
    for (uint32_t pin = 0; pin < cm.pins.size(); ++pin) {
      uint32_t net = nl.pin_net(inst, pin);
      if (net == kNone) continue;
      if (!first_pin) out += ", ";
      first_pin = false;
      out += '.';
      append_id(out, cm.pins[pin].name);
      out += '(';
      append_id(out, flat_net_name(net));
      out += ')';
    }
    out += ");\n";
  }
  out += "endmodule\n";
}

}  // namespace

std::string write_verilog(const Netlist& nl, bool flatten) {
  std::string out;
  out.reserve(96 * static_cast<size_t>(nl.n_instances()) + 4096);
  if (flatten || nl.n_modules() == 1) {
    if (flatten && nl.n_modules() > 1) {
      write_flat(nl, out);
      return out;
    }
    write_module(nl, 0, out);
    return out;
  }
  // Children before parents; module ids grow downward from the top.
  for (uint32_t mod = nl.n_modules(); mod-- > 1;) {
    write_module(nl, mod, out);
    out += '\n';
  }
  write_module(nl, 0, out);
  return out;
}

void write_verilog_file(const Netlist& nl, const std::string& path, bool flatten) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  std::string text = write_verilog(nl, flatten);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace sn
