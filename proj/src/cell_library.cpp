#include "synthnet/cell_library.hpp"

#include <stdexcept>

namespace sn {

CellLibrary::CellLibrary(std::vector<CellMaster> masters) : masters_(std::move(masters)) {
  if (masters_.empty()) throw std::invalid_argument("cell library is empty");
  bool any_seq = false, any_comb = false;
  for (uint32_t id = 0; id < masters_.size(); ++id) {
    CellMaster& m = masters_[id];
    if (m.name.empty()) throw std::invalid_argument("cell master with empty name");
    if (m.pins.empty()) throw std::invalid_argument("cell master '" + m.name + "' has no pins");
    if (!index_.emplace(m.name, id).second)
      throw std::invalid_argument("duplicate cell master '" + m.name + "'");
    m.n_inputs = 0;
    m.n_outputs = 0;
    m.clock_pin = -1;
    int clocks = 0;
    for (size_t p = 0; p < m.pins.size(); ++p) {
      for (size_t q = p + 1; q < m.pins.size(); ++q)
        if (m.pins[p].name == m.pins[q].name)
          throw std::invalid_argument("duplicate pin '" + m.pins[p].name + "' on '" + m.name + "'");
      switch (m.pins[p].dir) {
        case PinDir::kInput: m.n_inputs++; break;
        case PinDir::kOutput: m.n_outputs++; break;
        case PinDir::kClock:
          clocks++;
          m.clock_pin = static_cast<int>(p);
          break;
      }
    }
    m.is_sequential = clocks > 0;
    if (m.is_sequential && clocks != 1)
      throw std::invalid_argument("sequential master '" + m.name + "' must have exactly one clock pin");
    if (m.is_sequential && !m.is_macro) any_seq = true;
    if (!m.is_sequential && !m.is_macro) any_comb = true;
  }
  if (!any_seq) throw std::invalid_argument("library has no sequential master");
  if (!any_comb) throw std::invalid_argument("library has no combinational master");
  for (uint32_t id = 0; id < masters_.size(); ++id) {
    if (masters_[id].is_sequential && !masters_[id].is_macro) {
      default_ff_ = id;
      break;
    }
  }
}

int CellLibrary::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : static_cast<int>(it->second);
}

void CellLibrary::set_default_flipflop(std::string_view name) {
  int id = find(name);
  if (id < 0) throw std::invalid_argument("unknown flip-flop master '" + std::string(name) + "'");
  if (!masters_[id].is_sequential)
    throw std::invalid_argument("default flip-flop '" + std::string(name) + "' is not sequential");
  default_ff_ = static_cast<uint32_t>(id);
}

}  // namespace sn
