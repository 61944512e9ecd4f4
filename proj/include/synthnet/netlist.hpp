#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synthnet/cell_library.hpp"

namespace sn {

inline constexpr uint32_t kNone = 0xffffffffu;

// One attachment point of a net: an instance pin, or (when inst == kNone) a
// primary input/output port of the top module.
struct Endpoint {
  uint32_t inst = kNone;
  uint32_t index = 0;  // pin index within the master, or port id
  bool is_port() const { return inst == kNone; }
  bool operator==(const Endpoint&) const = default;
};

struct Instance {
  std::string name;  // empty => "inst_<id>"
  uint32_t master = 0;
  uint32_t module = 0;
  uint32_t pin_offset = 0;  // base index into the per-pin net table
};

struct Net {
  std::string name;    // empty => "net_<id>"
  uint32_t module = 0; // scope the net was created in
  std::vector<Endpoint> drivers;  // exactly one in a valid netlist
  std::vector<Endpoint> sinks;
};

// A boundary crossing. Ports of module 0 are the design's PIs/POs; ports of
// other modules describe where a net passes through a submodule boundary.
struct Port {
  std::string name;
  PinDir dir = PinDir::kInput;
  uint32_t module = 0;
  uint32_t net = kNone;
  // Input ports only: the pins this port drives directly inside its module,
  // plus any wrapped ports of nested submodules.
  std::vector<uint32_t> pins;
  std::vector<uint32_t> inner;
};

struct Module {
  std::string name;
  std::string inst_name;   // instantiation label in the parent, "" for top
  uint32_t parent = kNone; // kNone for top
  std::vector<uint32_t> ports;     // declaration order
  std::vector<uint32_t> children;  // child module ids
};

enum class ViolationKind : uint8_t {
  kMultiDriver,
  kDanglingNet,
  kFloatingInput,
  kCombLoop,
  kDisconnectedInstance,
};

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Gate-level netlist. Instances and nets live in one flat arena tagged with
// the module that owns them; hierarchy is reconstructed from the tags and the
// port records when writing Verilog. Ids are stable and never reused.
class Netlist {
 public:
  Netlist(const CellLibrary& lib, std::string top_name);

  const CellLibrary& library() const { return *lib_; }

  // -- construction ---------------------------------------------------------
  uint32_t add_module(std::string name, uint32_t parent, std::string inst_name);
  uint32_t add_instance(uint32_t master, uint32_t module = 0, std::string name = "");
  uint32_t add_net(uint32_t module = 0, std::string name = "");
  void connect_driver(uint32_t net, uint32_t inst, uint32_t pin);
  void connect_sink(uint32_t net, uint32_t inst, uint32_t pin);
  void disconnect_pin(uint32_t inst, uint32_t pin);
  uint32_t add_port(uint32_t module, PinDir dir, std::string name);
  void remove_port(uint32_t port);  // drops it from the module's list
  void connect_port_driver(uint32_t net, uint32_t port);  // top-level PI
  void connect_port_sink(uint32_t net, uint32_t port);    // top-level PO
  void disconnect_port(uint32_t port);
  void reserve(size_t n_inst, size_t n_net);

  // -- access ---------------------------------------------------------------
  uint32_t n_instances() const { return static_cast<uint32_t>(instances_.size()); }
  uint32_t n_nets() const { return static_cast<uint32_t>(nets_.size()); }
  uint32_t n_modules() const { return static_cast<uint32_t>(modules_.size()); }
  uint32_t n_ports() const { return static_cast<uint32_t>(ports_.size()); }
  const Instance& instance(uint32_t id) const { return instances_[id]; }
  const Net& net(uint32_t id) const { return nets_[id]; }
  Net& net_mut(uint32_t id) { return nets_[id]; }
  const Port& port(uint32_t id) const { return ports_[id]; }
  Port& port_mut(uint32_t id) { return ports_[id]; }
  const Module& module(uint32_t id) const { return modules_[id]; }

  const CellMaster& master_of(uint32_t inst) const {
    return lib_->master(instances_[inst].master);
  }
  uint32_t pin_count(uint32_t inst) const {
    return static_cast<uint32_t>(master_of(inst).pins.size());
  }
  PinDir pin_dir(uint32_t inst, uint32_t pin) const { return master_of(inst).pins[pin].dir; }
  uint32_t pin_net(uint32_t inst, uint32_t pin) const {
    return pin_net_[instances_[inst].pin_offset + pin];
  }
  bool is_sequential(uint32_t inst) const { return master_of(inst).is_sequential; }
  bool is_macro(uint32_t inst) const { return master_of(inst).is_macro; }
  // Sequential elements and macros end timing paths.
  bool is_path_boundary(uint32_t inst) const {
    const CellMaster& m = master_of(inst);
    return m.is_sequential || m.is_macro;
  }
  bool net_is_clock(uint32_t net) const;
  // A net stripped of all endpoints (by port rebalancing) no longer exists
  // for validation, writing or metrics.
  bool net_in_use(uint32_t net) const {
    return !nets_[net].drivers.empty() || !nets_[net].sinks.empty();
  }
  // Resolves a global pin id (instance pin_offset + pin index) to its owner.
  uint32_t pin_inst(uint32_t pin_id) const;

  std::string instance_name(uint32_t id) const;
  std::string net_name(uint32_t id) const;

  // Primary inputs/outputs = ports of module 0 in declaration order.
  std::vector<uint32_t> primary_inputs() const;
  std::vector<uint32_t> primary_outputs() const;

  // -- checks ---------------------------------------------------------------
  // Reports all violations in the five categories: multi-driver nets, dangling
  // nets (no sinks), floating inputs (pin without a net, or on an undriven
  // net), combinational loops (one violation per strongly connected
  // component), and disconnected instances (no connected pin at all).
  std::vector<Violation> validate() const;

 private:
  const CellLibrary* lib_;
  std::vector<Instance> instances_;
  std::vector<Net> nets_;
  std::vector<Port> ports_;
  std::vector<Module> modules_;
  std::vector<uint32_t> pin_net_;
};

}  // namespace sn
