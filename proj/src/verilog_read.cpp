#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "synthnet/verilog.hpp"

namespace sn {
namespace {

struct Token {
  enum Kind { kId, kPunct, kEnd } kind = kEnd;
  std::string text;
  int line = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("verilog:" + std::to_string(tok_.line) + ": " + msg);
  }

  std::string expect_id(const char* what) {
    if (tok_.kind != Token::kId) fail(std::string("expected ") + what);
    return take().text;
  }

  void expect_punct(char c) {
    if (tok_.kind != Token::kPunct || tok_.text[0] != c)
      fail(std::string("expected '") + c + "'");
    advance();
  }

  bool accept_punct(char c) {
    if (tok_.kind == Token::kPunct && tok_.text[0] == c) {
      advance();
      return true;
    }
    return false;
  }

 private:
  void advance() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        pos_ += 2;
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) {
          if (text_[pos_] == '\n') ++line_;
          ++pos_;
        }
        pos_ += 2;
      } else {
        break;
      }
    }
    tok_.line = line_;
    if (pos_ >= text_.size()) {
      tok_ = {Token::kEnd, "", line_};
      return;
    }
    char c = text_[pos_];
    if (c == '\\') {  // escaped identifier, runs to whitespace
      size_t start = ++pos_;
      while (pos_ < text_.size() && !isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      tok_ = {Token::kId, text_.substr(start, pos_ - start), line_};
      return;
    }
    auto id_char = [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
             ch == '_' || ch == '$';
    };
    if (id_char(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && id_char(text_[pos_])) ++pos_;
      tok_ = {Token::kId, text_.substr(start, pos_ - start), line_};
      return;
    }
    tok_ = {Token::kPunct, std::string(1, c), line_};
    ++pos_;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  Token tok_;
};

struct ParsedInst {
  std::string master;
  std::string name;
  std::vector<std::pair<std::string, std::string>> conns;  // pin -> net name
  int line = 0;
};

struct ParsedModule {
  std::string name;
  std::vector<std::string> port_order;
  std::unordered_map<std::string, PinDir> port_dir;
  std::vector<std::string> wires;
  std::vector<ParsedInst> insts;
  int line = 0;
};

ParsedModule parse_module(Lexer& lex) {
  ParsedModule pm;
  pm.line = lex.peek().line;
  pm.name = lex.expect_id("module name");
  lex.expect_punct('(');
  if (!lex.accept_punct(')')) {
    while (true) {
      pm.port_order.push_back(lex.expect_id("port name"));
      if (lex.accept_punct(')')) break;
      lex.expect_punct(',');
    }
  }
  lex.expect_punct(';');
  while (true) {
    const Token& t = lex.peek();
    if (t.kind == Token::kEnd) lex.fail("missing endmodule");
    if (t.kind != Token::kId) lex.fail("unexpected token '" + t.text + "'");
    if (t.text == "endmodule") {
      lex.take();
      return pm;
    }
    if (t.text == "input" || t.text == "output") {
      PinDir d = t.text == "input" ? PinDir::kInput : PinDir::kOutput;
      lex.take();
      while (true) {
        std::string name = lex.expect_id("port name");
        if (!pm.port_dir.emplace(name, d).second)
          lex.fail("duplicate declaration of port " + name);
        if (lex.accept_punct(';')) break;
        lex.expect_punct(',');
      }
      continue;
    }
    if (t.text == "wire") {
      lex.take();
      while (true) {
        pm.wires.push_back(lex.expect_id("wire name"));
        if (lex.accept_punct(';')) break;
        lex.expect_punct(',');
      }
      continue;
    }
    ParsedInst inst;
    inst.line = t.line;
    inst.master = lex.take().text;
    inst.name = lex.expect_id("instance name");
    lex.expect_punct('(');
    if (!lex.accept_punct(')')) {
      while (true) {
        lex.expect_punct('.');
        std::string pin = lex.expect_id("pin name");
        lex.expect_punct('(');
        std::string net = lex.expect_id("net name");
        lex.expect_punct(')');
        inst.conns.emplace_back(std::move(pin), std::move(net));
        if (lex.accept_punct(')')) break;
        lex.expect_punct(',');
      }
    }
    lex.expect_punct(';');
    pm.insts.push_back(std::move(inst));
  }
}

struct Builder {
  const CellLibrary& lib;
  const std::unordered_map<std::string, const ParsedModule*>& defs;
  Netlist& nl;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw std::runtime_error("verilog:" + std::to_string(line) + ": " + msg);
  }

  void add_driver(uint32_t net, uint32_t inst, uint32_t pin, int line) {
    if (!nl.net(net).drivers.empty())
      fail(line, "multi-driver net " + nl.net_name(net));
    nl.connect_driver(net, inst, pin);
  }

  // Builds module `pm` as module id `mod`. `bound` maps the module's port
  // names to nets provided by the parent; `port_of_net` lets pin and child
  // port connections be recorded on this module's port records.
  void build(const ParsedModule& pm, uint32_t mod,
             const std::unordered_map<std::string, uint32_t>& bound) {
    std::unordered_map<std::string, uint32_t> local;  // net name -> net id
    std::unordered_map<uint32_t, uint32_t> port_of_net;

    for (const std::string& pname : pm.port_order) {
      auto dir = pm.port_dir.find(pname);
      if (dir == pm.port_dir.end())
        fail(pm.line, "port " + pname + " of module " + pm.name + " has no direction");
      uint32_t pid = nl.add_port(mod, dir->second, pname);
      uint32_t net;
      if (mod == 0) {
        net = nl.add_net(mod, pname);
        if (dir->second == PinDir::kInput)
          nl.connect_port_driver(net, pid);
        else
          nl.connect_port_sink(net, pid);
      } else {
        auto b = bound.find(pname);
        if (b == bound.end())
          fail(pm.line, "port " + pname + " of module " + pm.name + " not connected");
        net = b->second;
        nl.port_mut(pid).net = net;
      }
      local[pname] = net;
      if (dir->second == PinDir::kInput) port_of_net[net] = pid;
    }
    for (const std::string& wname : pm.wires) {
      if (local.count(wname)) fail(pm.line, "wire " + wname + " redeclares a port");
      local[wname] = nl.add_net(mod, wname);
    }

    for (const ParsedInst& pi : pm.insts) {
      auto sub = defs.find(pi.master);
      if (sub != defs.end()) {
        uint32_t child = nl.add_module(pi.master, mod, pi.name);
        std::unordered_map<std::string, uint32_t> child_bound;
        for (const auto& [pin, netname] : pi.conns) {
          auto it = local.find(netname);
          if (it == local.end()) fail(pi.line, "undeclared wire " + netname);
          child_bound[pin] = it->second;
        }
        size_t ports_before = nl.n_ports();
        build(*sub->second, child, child_bound);
        // Record pass-through crossings on this module's own input ports.
        for (uint32_t pid = ports_before; pid < nl.n_ports(); ++pid) {
          const Port& cp = nl.port(pid);
          if (cp.module != child || cp.dir != PinDir::kInput) continue;
          auto owner = port_of_net.find(cp.net);
          if (owner != port_of_net.end()) nl.port_mut(owner->second).inner.push_back(pid);
        }
        continue;
      }
      int master = lib.find(pi.master);
      if (master < 0) fail(pi.line, "unknown cell master '" + pi.master + "'");
      uint32_t inst = nl.add_instance(static_cast<uint32_t>(master), mod, pi.name);
      const CellMaster& cm = lib.master(static_cast<uint32_t>(master));
      for (const auto& [pin_name, netname] : pi.conns) {
        int pin = cm.find_pin(pin_name);
        if (pin < 0)
          fail(pi.line, "master " + pi.master + " has no pin '" + pin_name + "'");
        auto it = local.find(netname);
        if (it == local.end()) fail(pi.line, "undeclared wire " + netname);
        uint32_t net = it->second;
        if (cm.pins[pin].dir == PinDir::kOutput) {
          add_driver(net, inst, static_cast<uint32_t>(pin), pi.line);
        } else {
          nl.connect_sink(net, inst, static_cast<uint32_t>(pin));
          auto owner = port_of_net.find(net);
          if (owner != port_of_net.end())
            nl.port_mut(owner->second).pins.push_back(nl.instance(inst).pin_offset +
                                                      static_cast<uint32_t>(pin));
        }
      }
    }
  }
};

}  // namespace

Netlist read_verilog(const std::string& text, const CellLibrary& lib) {
  Lexer lex(text);
  std::vector<ParsedModule> modules;
  while (lex.peek().kind != Token::kEnd) {
    if (lex.peek().kind != Token::kId || lex.peek().text != "module")
      lex.fail("expected 'module', got '" + lex.peek().text + "'");
    lex.take();
    modules.push_back(parse_module(lex));
  }
  if (modules.empty()) throw std::runtime_error("verilog: no module definitions found");

  std::unordered_map<std::string, const ParsedModule*> defs;
  for (const ParsedModule& m : modules)
    if (!defs.emplace(m.name, &m).second)
      throw std::runtime_error("verilog: duplicate module " + m.name);

  std::unordered_set<std::string> instantiated;
  for (const ParsedModule& m : modules)
    for (const ParsedInst& i : m.insts)
      if (defs.count(i.master)) instantiated.insert(i.master);

  const ParsedModule* top = nullptr;
  for (const ParsedModule& m : modules) {
    if (instantiated.count(m.name)) continue;
    if (top) throw std::runtime_error("verilog: multiple top modules: " + top->name + ", " + m.name);
    top = &m;
  }
  if (!top) throw std::runtime_error("verilog: no top module (instantiation cycle)");

  Netlist nl(lib, top->name);
  Builder b{lib, defs, nl};
  b.build(*top, 0, {});
  return nl;
}

Netlist read_verilog_file(const std::string& path, const CellLibrary& lib) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open netlist file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  return read_verilog(text, lib);
}

}  // namespace sn
