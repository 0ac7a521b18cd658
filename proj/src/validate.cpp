#include "smt/validate.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "smt/errors.hpp"

namespace smt {

namespace {

class Collector {
 public:
  void add(std::string rule, std::string entity, std::string message) {
    diags_.push_back({std::move(rule), std::move(entity), std::move(message)});
  }
  std::vector<Diagnostic> take() { return std::move(diags_); }

 private:
  std::vector<Diagnostic> diags_;
};

std::size_t expected_inputs(Function f) {
  switch (f) {
    case Function::Nand2:
    case Function::Nor2:
    case Function::And2:
    case Function::Holder:
      return 2;
    default:
      return 1;
  }
}

void check_library(const Library& lib, Collector& out) {
  std::unordered_set<std::string> names;
  for (const auto& k : lib.kinds) {
    if (!names.insert(k.name).second) out.add("duplicate-id", k.name, "library kind declared twice");
    const bool has_output = !k.output.empty();
    const bool wants_output = k.function != Function::Holder && k.function != Function::Switch;
    if (k.inputs.size() != expected_inputs(k.function) || has_output != wants_output) {
      out.add("library-pins", k.name, "pin list does not match function " + std::string(to_string(k.function)));
    }
    for (const auto* c : {&k.hvt, &k.lvt}) {
      if (c->area < 0 || c->leak < 0 || c->d0 < 0 || c->r_drive < 0 || c->c_in < 0 || c->i_peak < 0) {
        out.add("library-range", k.name, "negative characterization value");
      }
    }
    if (k.function == Function::Switch) continue;
    if (!(k.hvt.c_in > 0 && k.lvt.c_in > 0)) out.add("library-range", k.name, "input capacitance must be positive");
    if (k.function == Function::Holder) continue;
    if (!(k.hvt.area > 0 && k.lvt.area > 0)) out.add("library-range", k.name, "area must be positive");
    if (!(k.hvt.d0 > k.lvt.d0) || !(k.hvt.r_drive >= k.lvt.r_drive)) {
      out.add("library-vth-order", k.name, "high-Vth variant must be strictly slower than low-Vth");
    }
    if (!(k.lvt.leak > k.hvt.leak)) {
      out.add("library-vth-order", k.name, "low-Vth variant must leak strictly more than high-Vth");
    }
    if (!(k.lvt.i_peak > 0 && k.hvt.i_peak > 0)) {
      out.add("library-range", k.name, "peak discharge current must be positive");
    }
  }
}

void check_constraints(const Constraints& c, Collector& out) {
  auto positive = [&](double v, const char* name) {
    if (!(v > 0)) out.add("constraint-range", name, "must be strictly positive");
  };
  positive(c.t_clk, "t_clk");
  positive(c.v_dd, "v_dd");
  positive(c.v_bounce_max, "v_bounce_max");
  positive(c.l_vgnd_max, "l_vgnd_max");
  positive(c.k_bounce, "k_bounce");
  positive(c.r0_switch, "r0_switch");
  positive(c.l_sw, "l_sw");
  positive(c.a_sw, "a_sw");
  positive(c.w_min, "w_min");
  positive(c.r_wire, "r_wire");
  positive(c.c_wire, "c_wire");
  if (!(c.hold_min >= 0)) out.add("constraint-range", "hold_min", "must be non-negative");
  if (c.n_cells_max < 1) out.add("constraint-range", "n_cells_max", "must be at least 1");
  if (c.mte_max_fanout < 2) out.add("constraint-range", "mte_max_fanout", "must be at least 2");
  if (!(c.alpha > 0 && c.alpha <= 1)) out.add("constraint-range", "alpha", "must lie in (0, 1]");
  if (!(c.v_bounce_max < c.v_dd)) out.add("constraint-range", "v_bounce_max", "must be below v_dd");
}

bool mte_sink_pin(const CellKind& k, Vth variant, const std::string& pin) {
  switch (k.function) {
    case Function::Holder:
      return pin == k.inputs[1];
    case Function::Switch:
    case Function::MteBuf:
      return pin == k.inputs[0];
    default:
      return variant == Vth::MtBuiltIn && pin == kBuiltInMtePin;
  }
}

// Reports cells on combinational cycles: Kahn's pruning from both ends leaves
// exactly the cells that sit on or between cycles.
void check_cycles(const Design& d, const Netlist& nl, Collector& out) {
  const auto n = d.cells.size();
  std::vector<std::vector<int>> succ(n);
  std::vector<std::vector<int>> pred(n);
  std::vector<char> comb(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const CellKind* k = nl.kind(static_cast<int>(i));
    comb[i] = (k != nullptr && is_combinational(k->function)) ? 1 : 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!comb[i]) continue;
    const int out_net = nl.output_net(static_cast<int>(i));
    if (out_net < 0) continue;
    for (const auto& s : nl.net(out_net).sinks) {
      if (s.cell < 0 || !comb[static_cast<std::size_t>(s.cell)]) continue;
      succ[i].push_back(s.cell);
      pred[static_cast<std::size_t>(s.cell)].push_back(static_cast<int>(i));
    }
  }
  std::vector<char> alive(comb);
  auto prune = [&](const std::vector<std::vector<int>>& in, const std::vector<std::vector<int>>& fwd) {
    std::vector<int> deg(n, 0);
    std::deque<int> queue;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (int p : in[i]) deg[i] += alive[static_cast<std::size_t>(p)] ? 1 : 0;
      if (deg[i] == 0) queue.push_back(static_cast<int>(i));
    }
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      alive[static_cast<std::size_t>(c)] = 0;
      for (int s : fwd[static_cast<std::size_t>(c)]) {
        if (alive[static_cast<std::size_t>(s)] && --deg[static_cast<std::size_t>(s)] == 0) queue.push_back(s);
      }
    }
  };
  prune(pred, succ);
  prune(succ, pred);
  std::vector<std::string> members;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) members.push_back(d.cells[i].id);
  }
  if (!members.empty()) {
    std::sort(members.begin(), members.end());
    std::string list;
    for (const auto& m : members) list += (list.empty() ? "" : ",") + m;
    out.add("combinational-cycle", list, "combinational logic contains a cycle");
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Design& d) {
  Collector out;
  check_library(d.library, out);
  check_constraints(d.constraints, out);
  if (d.die.hi.x < d.die.lo.x || d.die.hi.y < d.die.lo.y) out.add("die-box", "die", "empty die box");

  std::unordered_set<std::string> net_ids;
  for (const auto& n : d.nets) {
    if (!net_ids.insert(n).second) out.add("duplicate-id", n, "net declared twice");
  }
  std::unordered_map<std::string, const Cell*> cell_ids;
  for (const auto& c : d.cells) {
    if (!cell_ids.emplace(c.id, &c).second) out.add("duplicate-id", c.id, "cell declared twice");
  }
  for (const auto& p : d.inputs) {
    if (!net_ids.contains(p)) out.add("unresolved-reference", p, "primary input names an undeclared net");
  }
  for (const auto& p : d.outputs) {
    if (!net_ids.contains(p)) out.add("unresolved-reference", p, "primary output names an undeclared net");
    if (std::find(d.inputs.begin(), d.inputs.end(), p) != d.inputs.end()) {
      out.add("feedthrough", p, "net is both a primary input and a primary output");
    }
  }
  if (d.mte_net.empty()) {
    // Designs without MT hardware need no enable port.
  } else if (!net_ids.contains(d.mte_net)) {
    out.add("unresolved-reference", d.mte_net, "MTE net is not declared");
  } else if (std::find(d.inputs.begin(), d.inputs.end(), d.mte_net) == d.inputs.end()) {
    out.add("mte-not-input", d.mte_net, "MTE net must be a primary input");
  }

  bool any_switch = false;
  bool any_vgnd = false;
  bool any_builtin = false;
  for (const auto& c : d.cells) {
    const CellKind* k = d.library.find(c.kind);
    if (k == nullptr) {
      out.add("unresolved-reference", c.kind, "cell '" + c.id + "' uses an undeclared kind");
      continue;
    }
    for (const auto& [pin, net] : c.pins) {
      if (!net_ids.contains(net)) {
        out.add("unresolved-reference", net, "cell '" + c.id + "' pin " + pin + " names an undeclared net");
      }
      const bool known = std::find(k->inputs.begin(), k->inputs.end(), pin) != k->inputs.end() ||
                         pin == k->output ||
                         (c.variant == Vth::MtBuiltIn && pin == kBuiltInMtePin);
      if (!known) out.add("unknown-pin", c.id, "pin '" + pin + "' is not a pin of " + k->name);
    }
    for (const auto& pin : k->inputs) {
      if (!c.pins.contains(pin)) out.add("unbound-pin", c.id, "input pin '" + pin + "' is unbound");
    }
    if (!k->output.empty() && !c.pins.contains(k->output)) {
      out.add("unbound-pin", c.id, "output pin '" + k->output + "' is unbound");
    }
    if (c.variant == Vth::MtBuiltIn && !c.pins.contains(std::string(kBuiltInMtePin))) {
      out.add("unbound-pin", c.id, "conventional MT-cell has no MTE connection");
    }
    if (!d.die.contains(c.pos)) out.add("outside-die", c.id, "cell position outside the die box");

    if (!is_combinational(k->function)) {
      const bool ok = k->function == Function::Dff ? (c.variant == Vth::HighVth || c.variant == Vth::LowVth)
                                                    : c.variant == Vth::HighVth;
      if (!ok) out.add("variant-kind", c.id, std::string(to_string(k->function)) + " cannot take variant " + std::string(to_string(c.variant)));
    }
    if (c.variant == Vth::MtNoVgnd && d.stage != FlowStage::Assigned && d.stage != FlowStage::HoldersInserted) {
      out.add("variant-stage", c.id, "MT-cell without VGND port outside the assignment stages");
    }
    if (c.variant == Vth::MtWithVgnd && d.stage < FlowStage::SwitchInserted) {
      out.add("variant-stage", c.id, "MT-cell with VGND port before switch insertion");
    }
    if (d.stage == FlowStage::AllLow && is_logic(k->function) && c.variant != Vth::LowVth) {
      out.add("variant-stage", c.id, "all-low stage requires low-Vth logic");
    }
    if (c.variant == Vth::MtWithVgnd) {
      any_vgnd = true;
      if (c.vgnd.empty()) {
        out.add("vgnd-unbound", c.id, "MT-cell VGND port is not tied to a switch");
      } else {
        auto it = cell_ids.find(c.vgnd);
        const CellKind* sk = it == cell_ids.end() ? nullptr : d.library.find(it->second->kind);
        if (sk == nullptr || sk->function != Function::Switch) {
          out.add("unresolved-reference", c.vgnd, "cell '" + c.id + "' VGND names no switch");
        }
      }
    } else if (!c.vgnd.empty()) {
      out.add("vgnd-unexpected", c.id, "only MT-cells with VGND ports tie to a switch");
    }
    if (k->function == Function::Switch) any_switch = true;
    if (c.variant == Vth::MtBuiltIn) any_builtin = true;
    if (k->function == Function::Switch || c.variant == Vth::MtBuiltIn) {
      if (!(c.width >= d.constraints.w_min)) out.add("switch-width", c.id, "switch width below w_min");
    } else if (c.width != 0.0) {
      out.add("width-unexpected", c.id, "only switches carry a width");
    }
  }
  if (any_builtin && (any_switch || any_vgnd)) {
    out.add("mixed-mt-styles", "design", "conventional and shared-switch MT-cells cannot coexist");
  }

  const Netlist nl(d);
  std::unordered_map<int, int> holders_per_net;
  for (std::size_t ni = 0; ni < nl.nets().size(); ++ni) {
    const NetInfo& net = nl.nets()[ni];
    const int drivers = net.driver_count + (net.primary_input ? 1 : 0);
    if (drivers > 1) out.add("multiple-drivers", net.id, "net has more than one driver");
    if (drivers == 0) out.add("undriven-net", net.id, "net has no driver");
    if (net.sinks.empty() && net.id != d.mte_net) out.add("dangling-net", net.id, "net has no sinks");
    for (const auto& s : net.sinks) {
      if (s.cell < 0) {
        if (net.mte_tree) out.add("mte-logic-sink", net.id, "MTE net drives a primary output");
        continue;
      }
      const Cell& sc = d.cells[static_cast<std::size_t>(s.cell)];
      const CellKind* k = nl.kind(s.cell);
      const bool control = mte_sink_pin(*k, sc.variant, s.pin);
      if (net.mte_tree && !control) {
        out.add("mte-logic-sink", net.id, "MTE net drives logic pin " + sc.id + "." + s.pin);
      }
      if (!net.mte_tree && control) {
        out.add("mte-unbound", sc.id, "control pin " + s.pin + " is not on the MTE tree");
      }
      if (k->function == Function::Holder && s.pin == k->inputs[0]) {
        if (net.mte_tree) out.add("holder-net", sc.id, "holder attached to the MTE tree");
        if (++holders_per_net[static_cast<int>(ni)] == 2) {
          out.add("holder-duplicate", net.id, "more than one holder on a net");
        }
      }
    }
    if (net.mte_tree && net.driver >= 0) {
      const CellKind* dk = nl.kind(net.driver);
      if (dk->function != Function::MteBuf) out.add("mte-logic-sink", net.id, "MTE net driven by logic");
    }
  }

  check_cycles(d, nl, out);
  return out.take();
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::ostringstream ss;
  for (const auto& d : diags) ss << "  [" << d.rule << "] " << d.entity << ": " << d.message << "\n";
  return ss.str();
}

void require_valid(const Design& d) {
  const auto diags = validate(d);
  if (!diags.empty()) throw Error(ErrorKind::Validation, "invalid design\n" + format_diagnostics(diags));
}

}  // namespace smt
