#include "synthnet/netlist.hpp"

#include <algorithm>
#include <stdexcept>

namespace sn {

Netlist::Netlist(const CellLibrary& lib, std::string top_name) : lib_(&lib) {
  Module top;
  top.name = std::move(top_name);
  modules_.push_back(std::move(top));
}

uint32_t Netlist::add_module(std::string name, uint32_t parent, std::string inst_name) {
  Module m;
  m.name = std::move(name);
  m.inst_name = std::move(inst_name);
  m.parent = parent;
  uint32_t id = static_cast<uint32_t>(modules_.size());
  modules_[parent].children.push_back(id);
  modules_.push_back(std::move(m));
  return id;
}

uint32_t Netlist::add_instance(uint32_t master, uint32_t module, std::string name) {
  Instance inst;
  inst.name = std::move(name);
  inst.master = master;
  inst.module = module;
  inst.pin_offset = static_cast<uint32_t>(pin_net_.size());
  pin_net_.resize(pin_net_.size() + lib_->master(master).pins.size(), kNone);
  instances_.push_back(std::move(inst));
  return static_cast<uint32_t>(instances_.size() - 1);
}

uint32_t Netlist::add_net(uint32_t module, std::string name) {
  Net n;
  n.name = std::move(name);
  n.module = module;
  nets_.push_back(std::move(n));
  return static_cast<uint32_t>(nets_.size() - 1);
}

void Netlist::connect_driver(uint32_t net, uint32_t inst, uint32_t pin) {
  if (pin_dir(inst, pin) != PinDir::kOutput)
    throw std::logic_error("connect_driver on non-output pin");
  uint32_t& slot = pin_net_[instances_[inst].pin_offset + pin];
  if (slot != kNone) throw std::logic_error("output pin already connected");
  slot = net;
  nets_[net].drivers.push_back({inst, pin});
}

void Netlist::connect_sink(uint32_t net, uint32_t inst, uint32_t pin) {
  if (pin_dir(inst, pin) == PinDir::kOutput)
    throw std::logic_error("connect_sink on output pin");
  uint32_t& slot = pin_net_[instances_[inst].pin_offset + pin];
  if (slot != kNone) throw std::logic_error("input pin already connected");
  slot = net;
  nets_[net].sinks.push_back({inst, pin});
}

void Netlist::disconnect_pin(uint32_t inst, uint32_t pin) {
  uint32_t& slot = pin_net_[instances_[inst].pin_offset + pin];
  if (slot == kNone) return;
  Net& n = nets_[slot];
  Endpoint ep{inst, pin};
  auto& list = pin_dir(inst, pin) == PinDir::kOutput ? n.drivers : n.sinks;
  list.erase(std::remove(list.begin(), list.end(), ep), list.end());
  slot = kNone;
}

uint32_t Netlist::add_port(uint32_t module, PinDir dir, std::string name) {
  Port p;
  p.name = std::move(name);
  p.dir = dir;
  p.module = module;
  uint32_t id = static_cast<uint32_t>(ports_.size());
  ports_.push_back(std::move(p));
  modules_[module].ports.push_back(id);
  return id;
}

void Netlist::remove_port(uint32_t port) {
  auto& list = modules_[ports_[port].module].ports;
  list.erase(std::remove(list.begin(), list.end(), port), list.end());
}

void Netlist::connect_port_driver(uint32_t net, uint32_t port) {
  ports_[port].net = net;
  nets_[net].drivers.push_back({kNone, port});
}

void Netlist::connect_port_sink(uint32_t net, uint32_t port) {
  ports_[port].net = net;
  nets_[net].sinks.push_back({kNone, port});
}

void Netlist::disconnect_port(uint32_t port) {
  Port& p = ports_[port];
  if (p.net == kNone) return;
  Net& n = nets_[p.net];
  Endpoint ep{kNone, port};
  auto& list = p.dir == PinDir::kInput ? n.drivers : n.sinks;
  list.erase(std::remove(list.begin(), list.end(), ep), list.end());
  p.net = kNone;
}

void Netlist::reserve(size_t n_inst, size_t n_net) {
  instances_.reserve(n_inst);
  nets_.reserve(n_net);
  pin_net_.reserve(n_inst * 4);
}

uint32_t Netlist::pin_inst(uint32_t pin_id) const {
  auto it = std::upper_bound(instances_.begin(), instances_.end(), pin_id,
                             [](uint32_t v, const Instance& i) { return v < i.pin_offset; });
  return static_cast<uint32_t>(it - instances_.begin() - 1);
}

bool Netlist::net_is_clock(uint32_t net) const {
  for (const Endpoint& s : nets_[net].sinks)
    if (!s.is_port() && pin_dir(s.inst, s.index) == PinDir::kClock) return true;
  return false;
}

std::string Netlist::instance_name(uint32_t id) const {
  const std::string& n = instances_[id].name;
  return n.empty() ? "inst_" + std::to_string(id) : n;
}

std::string Netlist::net_name(uint32_t id) const {
  const std::string& n = nets_[id].name;
  return n.empty() ? "net_" + std::to_string(id) : n;
}

std::vector<uint32_t> Netlist::primary_inputs() const {
  std::vector<uint32_t> out;
  for (uint32_t p : modules_[0].ports)
    if (ports_[p].dir == PinDir::kInput) out.push_back(p);
  return out;
}

std::vector<uint32_t> Netlist::primary_outputs() const {
  std::vector<uint32_t> out;
  for (uint32_t p : modules_[0].ports)
    if (ports_[p].dir == PinDir::kOutput) out.push_back(p);
  return out;
}

}  // namespace sn
