#include <algorithm>
#include <string>
#include <unordered_set>

#include "synthnet/pipo.hpp"

namespace sn {
namespace {

bool is_clock_port(const Netlist& nl, const Port& p) {
  return p.net != kNone && nl.net_is_clock(p.net);
}

std::vector<uint32_t> data_ports(const Netlist& nl, uint32_t module, PinDir dir) {
  std::vector<uint32_t> out;
  for (uint32_t pid : nl.module(module).ports) {
    const Port& p = nl.port(pid);
    if (p.dir == dir && !is_clock_port(nl, p)) out.push_back(pid);
  }
  return out;
}

struct MatchCursor {
  uint32_t ff = 0;   // resume point for add_input_port scans
  uint32_t net = 0;  // resume point for add_output_port scans
};

bool is_comb(const Netlist& nl, uint32_t inst) { return !nl.is_path_boundary(inst); }

bool add_input_step(Netlist& nl, uint32_t module, MatchCursor& cur) {
  for (uint32_t ff = cur.ff; ff < nl.n_instances(); ++ff) {
    if (nl.instance(ff).module != module || !nl.is_sequential(ff)) continue;
    const CellMaster& m = nl.master_of(ff);
    for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
      if (m.pins[pin].dir != PinDir::kOutput) continue;
      uint32_t nid = nl.pin_net(ff, pin);
      if (nid == kNone || nl.net(nid).sinks.size() < 2) continue;
      for (const Endpoint& s : nl.net(nid).sinks) {
        if (s.is_port() || !is_comb(nl, s.inst)) continue;
        if (nl.instance(s.inst).module != module) continue;
        cur.ff = ff;
        uint32_t sink_inst = s.inst, sink_pin = s.index;
        nl.disconnect_pin(sink_inst, sink_pin);
        std::string name =
            (module == 0 ? "pi_" : "in_") +
            std::to_string(data_ports(nl, module, PinDir::kInput).size());
        uint32_t port = nl.add_port(module, PinDir::kInput, std::move(name));
        if (module == 0) {
          uint32_t net = nl.add_net(0);
          nl.connect_port_driver(net, port);
          nl.connect_sink(net, sink_inst, sink_pin);
        } else {
          nl.port_mut(port).pins.push_back(nl.instance(sink_inst).pin_offset + sink_pin);
        }
        return true;
      }
    }
  }
  cur.ff = nl.n_instances();
  return false;
}

bool remove_input_step(Netlist& nl, uint32_t module) {
  std::vector<uint32_t> ins = data_ports(nl, module, PinDir::kInput);
  if (ins.size() < 2) return false;
  uint32_t lo = ins.front();
  for (size_t k = ins.size(); k-- > 1;) {
    uint32_t hi = ins[k];
    if (module == 0) {
      uint32_t net_hi = nl.port(hi).net;
      uint32_t net_lo = nl.port(lo).net;
      bool clean = true;  // a primary-input net must not feed a primary output
      for (const Endpoint& s : nl.net(net_hi).sinks)
        if (s.is_port()) clean = false;
      if (!clean) continue;
      std::vector<Endpoint> sinks = nl.net(net_hi).sinks;
      for (const Endpoint& s : sinks) {
        nl.disconnect_pin(s.inst, s.index);
        nl.connect_sink(net_lo, s.inst, s.index);
      }
      nl.disconnect_port(hi);  // before retargeting: empties net_hi for good
      for (uint32_t pid = 0; pid < nl.n_ports(); ++pid)
        if (nl.port(pid).net == net_hi) nl.port_mut(pid).net = net_lo;
      nl.remove_port(hi);
    } else {
      Port& plo = nl.port_mut(lo);
      const Port& phi = nl.port(hi);
      plo.pins.insert(plo.pins.end(), phi.pins.begin(), phi.pins.end());
      plo.inner.insert(plo.inner.end(), phi.inner.begin(), phi.inner.end());
      nl.port_mut(hi).pins.clear();
      nl.port_mut(hi).inner.clear();
      nl.remove_port(hi);
    }
    return true;
  }
  return false;
}

bool add_output_step(Netlist& nl, uint32_t module, MatchCursor& cur,
                     std::unordered_set<uint32_t>& exported) {
  for (uint32_t nid = cur.net; nid < nl.n_nets(); ++nid) {
    const Net& net = nl.net(nid);
    if (!nl.net_in_use(nid) || net.drivers.size() != 1) continue;
    const Endpoint& d = net.drivers.front();
    if (d.is_port() || !is_comb(nl, d.inst)) continue;
    if (nl.instance(d.inst).module != module) continue;
    if (exported.count(nid)) continue;
    bool has_po = false;
    for (const Endpoint& s : net.sinks)
      if (s.is_port()) has_po = true;
    if (has_po) continue;
    cur.net = nid + 1;
    std::string name = (module == 0 ? "po_" : "out_") +
                       std::to_string(data_ports(nl, module, PinDir::kOutput).size());
    uint32_t port = nl.add_port(module, PinDir::kOutput, std::move(name));
    if (module == 0)
      nl.connect_port_sink(nid, port);
    else
      nl.port_mut(port).net = nid;
    exported.insert(nid);
    return true;
  }
  cur.net = nl.n_nets();
  return false;
}

bool remove_output_step(Netlist& nl, uint32_t module) {
  std::vector<uint32_t> outs = data_ports(nl, module, PinDir::kOutput);
  for (size_t k = outs.size(); k-- > 0;) {
    uint32_t pid = outs[k];
    uint32_t nid = nl.port(pid).net;
    if (nid == kNone) continue;
    size_t other_sinks = 0;
    for (const Endpoint& s : nl.net(nid).sinks)
      if (!(s.is_port() && s.index == pid)) ++other_sinks;
    if (other_sinks == 0) continue;
    if (module == 0) {
      nl.disconnect_port(pid);
    } else {
      nl.port_mut(pid).net = kNone;
    }
    nl.remove_port(pid);
    return true;
  }
  return false;
}

std::unordered_set<uint32_t> exported_nets(const Netlist& nl, uint32_t module) {
  std::unordered_set<uint32_t> out;
  for (uint32_t pid : nl.module(module).ports)
    if (nl.port(pid).net != kNone) out.insert(nl.port(pid).net);
  return out;
}

}  // namespace

void connect_input_port_tree(Netlist& nl, uint32_t net, uint32_t port) {
  nl.port_mut(port).net = net;
  for (uint32_t pin : nl.port(port).pins) {
    uint32_t inst = nl.pin_inst(pin);
    nl.connect_sink(net, inst, pin - nl.instance(inst).pin_offset);
  }
  for (uint32_t ip : nl.port(port).inner) connect_input_port_tree(nl, net, ip);
}

void close_module(Netlist& nl, uint32_t module, const OpenPins& open) {
  uint32_t k = 0;
  for (uint32_t pin : open.in_pins) {
    std::string name = (module == 0 ? "pi_" : "in_") + std::to_string(k++);
    uint32_t port = nl.add_port(module, PinDir::kInput, std::move(name));
    if (module == 0) {
      uint32_t net = nl.add_net(0);
      nl.connect_port_driver(net, port);
      uint32_t inst = nl.pin_inst(pin);
      nl.connect_sink(net, inst, pin - nl.instance(inst).pin_offset);
    } else {
      nl.port_mut(port).pins.push_back(pin);
    }
  }
  for (uint32_t child_port : open.in_ports) {
    std::string name = (module == 0 ? "pi_" : "in_") + std::to_string(k++);
    uint32_t port = nl.add_port(module, PinDir::kInput, std::move(name));
    if (module == 0) {
      uint32_t net = nl.add_net(0);
      nl.connect_port_driver(net, port);
      connect_input_port_tree(nl, net, child_port);
    } else {
      nl.port_mut(port).inner.push_back(child_port);
    }
  }
  uint32_t j = 0;
  for (uint32_t nid : open.out_nets) {
    std::string name = (module == 0 ? "po_" : "out_") + std::to_string(j++);
    uint32_t port = nl.add_port(module, PinDir::kOutput, std::move(name));
    if (module == 0)
      nl.connect_port_sink(nid, port);
    else
      nl.port_mut(port).net = nid;
  }
}

bool add_input_port(Netlist& nl, uint32_t module) {
  MatchCursor cur;
  return add_input_step(nl, module, cur);
}

bool remove_input_port(Netlist& nl, uint32_t module) { return remove_input_step(nl, module); }

bool add_output_port(Netlist& nl, uint32_t module) {
  MatchCursor cur;
  auto exported = exported_nets(nl, module);
  return add_output_step(nl, module, cur, exported);
}

bool remove_output_port(Netlist& nl, uint32_t module) { return remove_output_step(nl, module); }

PortMatchReport match_ports(Netlist& nl, uint32_t module, int64_t n_in, int64_t n_out) {
  PortMatchReport rep;
  MatchCursor cur;
  if (n_in >= 0) {
    int64_t have = static_cast<int64_t>(data_ports(nl, module, PinDir::kInput).size());
    while (have < n_in && add_input_step(nl, module, cur)) {
      ++have;
      ++rep.in_added;
    }
    while (have > n_in && remove_input_step(nl, module)) {
      --have;
      ++rep.in_removed;
    }
    rep.in_shortfall = static_cast<uint64_t>(std::llabs(have - n_in));
  }
  if (n_out >= 0) {
    auto exported = exported_nets(nl, module);
    int64_t have = static_cast<int64_t>(data_ports(nl, module, PinDir::kOutput).size());
    while (have < n_out && add_output_step(nl, module, cur, exported)) {
      ++have;
      ++rep.out_added;
    }
    while (have > n_out && remove_output_step(nl, module)) {
      --have;
      ++rep.out_removed;
    }
    rep.out_shortfall = static_cast<uint64_t>(std::llabs(have - n_out));
  }
  return rep;
}

}  // namespace sn
