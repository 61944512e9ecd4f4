#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "synthnet/cell_library.hpp"

namespace sn {
namespace {

struct LefTokens {
  std::vector<std::string> tok;
  std::vector<int> line;
  size_t pos = 0;

  explicit LefTokens(std::string_view text) {
    int ln = 1;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) {
        tok.push_back(cur);
        line.push_back(ln);
        cur.clear();
      }
    };
    for (size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == '#') {  // comment to end of line
        flush();
        while (i < text.size() && text[i] != '\n') ++i;
        ++ln;
        continue;
      }
      if (c == '\n') {
        flush();
        ++ln;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        flush();
      } else {
        cur.push_back(c);
      }
    }
    flush();
  }

  bool done() const { return pos >= tok.size(); }
  const std::string& peek() const { return tok[pos]; }
  int cur_line() const { return pos < line.size() ? line[pos] : (line.empty() ? 0 : line.back()); }
  std::string take() { return tok[pos++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("lef:" + std::to_string(cur_line()) + ": " + msg);
  }

  std::string expect() {
    if (done()) fail("unexpected end of file");
    return take();
  }

  void skip_statement() {  // consume tokens up to and including ';'
    while (!done())
      if (take() == ";") return;
    fail("statement not terminated with ';'");
  }

  void skip_block() {  // consume a PORT/OBS style block up to its bare END
    while (!done())
      if (take() == "END") return;
    fail("block not terminated with END");
  }
};

MasterPin parse_pin(LefTokens& t, const std::string& macro_name,
                    const std::vector<std::string>& extra_clock_pins, bool& skip_out) {
  MasterPin pin;
  pin.name = t.expect();
  std::string direction, use;
  while (true) {
    if (t.done()) t.fail("PIN " + pin.name + " in MACRO " + macro_name + " not closed");
    std::string k = t.take();
    if (k == "END") {
      std::string closer = t.expect();
      if (closer != pin.name)
        t.fail("END " + closer + " does not match PIN " + pin.name);
      break;
    }
    if (k == "DIRECTION") {
      direction = t.expect();
      t.skip_statement();
    } else if (k == "USE") {
      use = t.expect();
      t.skip_statement();
    } else if (k == "PORT") {
      t.skip_block();
    } else {
      t.skip_statement();
    }
  }
  skip_out = (use == "POWER" || use == "GROUND");
  if (skip_out) return pin;
  if (direction.empty())
    throw std::runtime_error("lef: pin '" + pin.name + "' of MACRO " + macro_name +
                             " has no DIRECTION");
  bool named_clock = std::find(extra_clock_pins.begin(), extra_clock_pins.end(), pin.name) !=
                     extra_clock_pins.end();
  if (direction == "INPUT") {
    pin.dir = (use == "CLOCK" || named_clock) ? PinDir::kClock : PinDir::kInput;
  } else if (direction == "OUTPUT") {
    pin.dir = PinDir::kOutput;
  } else {
    throw std::runtime_error("lef: unsupported DIRECTION " + direction + " on pin '" + pin.name +
                             "' of MACRO " + macro_name);
  }
  return pin;
}

}  // namespace

CellLibrary parse_lef_masters(std::string_view lef_text,
                              const std::vector<std::string>& extra_clock_pins) {
  LefTokens t(lef_text);
  std::vector<CellMaster> masters;
  while (!t.done()) {
    std::string k = t.take();
    if (k == "MACRO") {
      CellMaster m;
      m.name = t.expect();
      bool closed = false;
      while (!t.done()) {
        std::string mk = t.take();
        if (mk == "END") {
          std::string closer = t.expect();
          if (closer != m.name) t.fail("END " + closer + " does not match MACRO " + m.name);
          closed = true;
          break;
        }
        if (mk == "CLASS") {
          m.is_macro = (t.expect() == "BLOCK");
          t.skip_statement();
        } else if (mk == "PIN") {
          bool skip = false;
          MasterPin pin = parse_pin(t, m.name, extra_clock_pins, skip);
          if (!skip) m.pins.push_back(std::move(pin));
        } else if (mk == "OBS") {
          t.skip_block();
        } else {
          t.skip_statement();
        }
      }
      if (!closed) throw std::runtime_error("lef: MACRO " + m.name + " not closed with END");
      masters.push_back(std::move(m));
    } else if (k == "END") {
      if (!t.done()) t.take();  // END LIBRARY
    } else {
      t.skip_statement();  // VERSION, BUSBITCHARS, SITE, ...
    }
  }
  return CellLibrary(std::move(masters));
}

CellLibrary parse_lef_file(const std::string& path,
                           const std::vector<std::string>& extra_clock_pins) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open LEF file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_lef_masters(ss.str(), extra_clock_pins);
}

}  // namespace sn
