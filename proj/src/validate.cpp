#include <algorithm>
#include <vector>

#include "synthnet/netlist.hpp"

namespace sn {
namespace {

// Iterative Tarjan over the combinational subgraph restricted to `active`
// nodes. Returns SCCs (size >= 2, or size 1 with a self edge) as violations.
void report_loops(const Netlist& nl, const std::vector<std::vector<uint32_t>>& adj,
                  const std::vector<uint8_t>& active, std::vector<Violation>& out) {
  const uint32_t n = nl.n_instances();
  std::vector<uint32_t> index(n, kNone), low(n, 0);
  std::vector<uint8_t> on_stack(n, 0);
  std::vector<uint32_t> stack;
  uint32_t counter = 0;

  struct Frame {
    uint32_t v;
    size_t edge;
  };
  std::vector<Frame> call;
  for (uint32_t root = 0; root < n; ++root) {
    if (!active[root] || index[root] != kNone) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      uint32_t v = f.v;
      if (f.edge == 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (f.edge < adj[v].size()) {
        uint32_t w = adj[v][f.edge++];
        if (!active[w]) continue;
        if (index[w] == kNone) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::vector<uint32_t> scc;
        while (true) {
          uint32_t w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          scc.push_back(w);
          if (w == v) break;
        }
        bool self_loop = false;
        if (scc.size() == 1)
          self_loop = std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
        if (scc.size() > 1 || self_loop) {
          std::sort(scc.begin(), scc.end());
          std::string detail = "combinational loop through " +
                               std::to_string(scc.size()) + " instance(s):";
          for (size_t i = 0; i < scc.size() && i < 8; ++i)
            detail += " " + nl.instance_name(scc[i]);
          if (scc.size() > 8) detail += " ...";
          out.push_back({ViolationKind::kCombLoop, std::move(detail)});
        }
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
}

}  // namespace

std::vector<Violation> Netlist::validate() const {
  std::vector<Violation> out;

  for (uint32_t id = 0; id < n_nets(); ++id) {
    const Net& n = nets_[id];
    if (n.drivers.size() > 1)
      out.push_back({ViolationKind::kMultiDriver,
                     "net " + net_name(id) + " has " + std::to_string(n.drivers.size()) +
                         " drivers"});
  }

  for (uint32_t id = 0; id < n_nets(); ++id) {
    // Nets with no endpoints at all are tombstones left by port rebalancing.
    if (nets_[id].sinks.empty() && !nets_[id].drivers.empty())
      out.push_back({ViolationKind::kDanglingNet, "net " + net_name(id) + " has no sinks"});
  }

  for (uint32_t inst = 0; inst < n_instances(); ++inst) {
    const CellMaster& m = master_of(inst);
    for (uint32_t pin = 0; pin < m.pins.size(); ++pin) {
      if (m.pins[pin].dir == PinDir::kOutput) continue;
      uint32_t net = pin_net(inst, pin);
      if (net == kNone) {
        out.push_back({ViolationKind::kFloatingInput,
                       "pin " + instance_name(inst) + "/" + m.pins[pin].name + " unconnected"});
      } else if (nets_[net].drivers.empty()) {
        out.push_back({ViolationKind::kFloatingInput,
                       "pin " + instance_name(inst) + "/" + m.pins[pin].name + " on undriven net " +
                           net_name(net)});
      }
    }
  }
  for (uint32_t pid = 0; pid < n_ports(); ++pid) {
    const Port& p = ports_[pid];
    if (p.module != 0 || p.dir != PinDir::kOutput) continue;
    if (p.net != kNone && nets_[p.net].drivers.empty())
      out.push_back({ViolationKind::kFloatingInput,
                     "output port " + p.name + " on undriven net " + net_name(p.net)});
  }

  // Combinational adjacency for loop detection.
  std::vector<std::vector<uint32_t>> adj(n_instances());
  std::vector<uint8_t> comb(n_instances(), 0);
  for (uint32_t inst = 0; inst < n_instances(); ++inst)
    comb[inst] = !is_path_boundary(inst);
  for (const Net& n : nets_) {
    for (const Endpoint& d : n.drivers) {
      if (d.is_port() || !comb[d.inst]) continue;
      for (const Endpoint& s : n.sinks) {
        if (s.is_port() || !comb[s.inst]) continue;
        if (pin_dir(s.inst, s.index) == PinDir::kClock) continue;
        adj[d.inst].push_back(s.inst);
      }
    }
  }
  report_loops(*this, adj, comb, out);

  for (uint32_t inst = 0; inst < n_instances(); ++inst) {
    bool connected = false;
    for (uint32_t pin = 0; pin < pin_count(inst) && !connected; ++pin)
      connected = pin_net(inst, pin) != kNone;
    if (!connected)
      out.push_back(
          {ViolationKind::kDisconnectedInstance, "instance " + instance_name(inst) + " has no connections"});
  }

  return out;
}

}  // namespace sn
