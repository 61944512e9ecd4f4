#pragma once

#include <cstdint>
#include <vector>

#include "synthnet/netlist.hpp"

namespace sn {

// Open connection points left in a module when net construction finishes.
struct OpenPins {
  std::vector<uint32_t> out_nets;  // driven nets still visible at the boundary
  std::vector<uint32_t> in_pins;   // unconnected input pins (global pin ids)
  std::vector<uint32_t> in_ports;  // unconnected input ports of child modules
};

// Attaches `net` to an input port: the port's direct pins become sinks of the
// net and wrapped child ports are connected recursively.
void connect_input_port_tree(Netlist& nl, uint32_t net, uint32_t port);

// Turns every open stub into a boundary port. Module 0 gets primary
// inputs/outputs (pi_<k> with a fresh net each, po_<k> on the stub net);
// other modules get crossing records (in_<k>, out_<k>) their parent connects
// later.
void close_module(Netlist& nl, uint32_t module, const OpenPins& open);

struct PortMatchReport {
  uint64_t in_added = 0, in_removed = 0;
  uint64_t out_added = 0, out_removed = 0;
  uint64_t in_shortfall = 0, out_shortfall = 0;  // unreachable target distance
};

// One rebalancing step each; returns false when no legal move remains.
//
//   add_input_port     taps the lowest-id flip-flop whose output net has
//                      fanout >= 2, moving one module-local combinational
//                      sink onto a new input.
//   remove_input_port  drops the highest-id input and folds its sinks into
//                      the lowest-id one.
//   add_output_port    exposes the lowest-id hidden module-local
//                      combinational net.
//   remove_output_port drops the highest-id output whose net keeps another
//                      sink.
//
// Clock ports and clock nets are never touched.
bool add_input_port(Netlist& nl, uint32_t module);
bool remove_input_port(Netlist& nl, uint32_t module);
bool add_output_port(Netlist& nl, uint32_t module);
bool remove_output_port(Netlist& nl, uint32_t module);

// Applies steps until the module has exactly n_in/n_out data ports; a
// negative target keeps the current count. Distances left when a step runs
// out of legal moves are reported as shortfalls.
PortMatchReport match_ports(Netlist& nl, uint32_t module, int64_t n_in, int64_t n_out);

}  // namespace sn
