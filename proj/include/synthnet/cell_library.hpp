#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sn {

enum class PinDir : uint8_t { kInput, kOutput, kClock };

struct MasterPin {
  std::string name;
  PinDir dir = PinDir::kInput;
};

// A library cell (or hard macro). Pin order is the declaration order and is
// the port order used when writing netlists.
struct CellMaster {
  std::string name;
  std::vector<MasterPin> pins;
  bool is_macro = false;       // hard block, not a standard cell
  bool is_sequential = false;  // has a clock pin
  // Derived at library construction.
  uint16_t n_inputs = 0;   // excludes clock pins
  uint16_t n_outputs = 0;
  int clock_pin = -1;      // pin index, -1 if none

  int find_pin(std::string_view pin_name) const {
    for (size_t i = 0; i < pins.size(); ++i)
      if (pins[i].name == pin_name) return static_cast<int>(i);
    return -1;
  }
  // Terminal count used by clustering: all pins except the clock.
  int signal_pins() const { return n_inputs + n_outputs; }
};

class CellLibrary {
 public:
  // Validates masters: unique names, >= 1 pin each, sequential implies exactly
  // one clock pin, and the library holds at least one sequential and one
  // combinational master.
  explicit CellLibrary(std::vector<CellMaster> masters);

  const CellMaster& master(uint32_t id) const { return masters_[id]; }
  uint32_t size() const { return static_cast<uint32_t>(masters_.size()); }
  int find(std::string_view name) const;

  // Default flip-flop used when a sequential instance must be created and no
  // inventory entry is available. Defaults to the first sequential non-macro
  // master in declaration order; can be overridden by name.
  uint32_t default_flipflop() const { return default_ff_; }
  void set_default_flipflop(std::string_view name);

 private:
  std::vector<CellMaster> masters_;
  std::unordered_map<std::string, uint32_t> index_;
  uint32_t default_ff_ = 0;
};

// Parse the structural subset of LEF: MACRO/PIN/DIRECTION/CLASS/USE. Geometry,
// layers, sites and properties are skipped. Pins with USE POWER/GROUND are
// ignored. A pin is a clock pin if it has USE CLOCK or its name appears in
// extra_clock_pins. Throws std::runtime_error with a line number on malformed
// input (unbalanced MACRO/END, pin without DIRECTION).
CellLibrary parse_lef_masters(std::string_view lef_text,
                              const std::vector<std::string>& extra_clock_pins = {});

CellLibrary parse_lef_file(const std::string& path,
                           const std::vector<std::string>& extra_clock_pins = {});

}  // namespace sn
