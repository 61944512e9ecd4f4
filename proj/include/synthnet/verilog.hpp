#pragma once

#include <string>

#include "synthnet/netlist.hpp"

namespace sn {

// Emit structural Verilog (module/input/output/wire declarations and
// named-port instantiations only). Hierarchical by default: one module
// definition per submodule, children before parents, the top module last.
// With flatten = true every leaf instance is emitted in a single module;
// names inside submodules get the instantiation path as a "__" prefix.
// Output is byte-deterministic for a given netlist (ordering by id).
// A net that connects a primary input directly to a primary output cannot be
// expressed in this subset and raises std::runtime_error.
std::string write_verilog(const Netlist& nl, bool flatten = false);
void write_verilog_file(const Netlist& nl, const std::string& path, bool flatten = false);

// Parse the same structural subset. The top module is the one never
// instantiated. Throws std::runtime_error with a line number for syntax
// errors, references to undeclared wires, unknown cell masters, unknown or
// misdirected pins, and nets with more than one driver.
Netlist read_verilog(const std::string& text, const CellLibrary& lib);
Netlist read_verilog_file(const std::string& path, const CellLibrary& lib);

}  // namespace sn
