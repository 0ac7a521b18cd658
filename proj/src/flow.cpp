#include "smt/flow.hpp"

#include <algorithm>
#include <chrono>

#include "smt/errors.hpp"
#include "smt/validate.hpp"
#include "smt/vth_assignment.hpp"

namespace smt {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::DualVth:
      return "dualvth";
    case Mode::ConventionalSmt:
      return "conventional";
    case Mode::ImprovedSmt:
      return "improved";
  }
  return "?";
}

std::string_view display_name(Mode m) {
  switch (m) {
    case Mode::DualVth:
      return "Dual-Vth";
    case Mode::ConventionalSmt:
      return "Con.-SMT";
    case Mode::ImprovedSmt:
      return "Imp.-SMT";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  for (Mode m : kAllModes) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

DelayCorner signoff_corner(Mode mode, const Constraints& c, double max_detour) {
  DelayCorner corner;
  corner.wire_derate = 1.0 + max_detour;
  if (mode != Mode::DualVth) {
    corner.planned_bounce = c.v_bounce_max;
    corner.assume_holders = true;
  }
  return corner;
}

Accounting account(const Design& d) {
  const Constraints& con = d.constraints;
  const CellKind* holder = d.library.find_function(Function::Holder);
  Accounting a;
  for (const auto& c : d.cells) {
    const CellKind& k = d.kind_of(c);
    switch (k.function) {
      case Function::Holder:
        a.total_area += k.hvt.area;
        a.standby_leakage += k.hvt.leak;
        ++a.counts.holders;
        continue;
      case Function::Switch:
        a.total_area += con.a_sw * c.width;
        a.standby_leakage += con.l_sw * c.width;
        ++a.counts.switches;
        continue;
      case Function::MteBuf:
        a.total_area += k.params(c.variant).area;
        a.standby_leakage += k.params(c.variant).leak;
        ++a.counts.mte_buffers;
        continue;
      default:
        break;
    }
    const Characterization& p = k.params(c.variant);
    a.total_area += p.area;
    switch (c.variant) {
      case Vth::HighVth:
        a.standby_leakage += p.leak;
        ++a.counts.hvt;
        break;
      case Vth::LowVth:
        a.standby_leakage += p.leak;
        ++a.counts.lvt;
        break;
      case Vth::MtNoVgnd:
      case Vth::MtWithVgnd:
        ++a.counts.mt;
        break;
      case Vth::MtBuiltIn:
        a.total_area += con.a_sw * c.width;
        a.standby_leakage += con.l_sw * c.width;
        if (holder != nullptr) {
          a.total_area += holder->hvt.area;
          a.standby_leakage += holder->hvt.leak;
        }
        ++a.counts.mt;
        ++a.counts.holders;
        ++a.counts.switches;
        break;
    }
  }
  return a;
}

Design conventional_smt_mode(Design d) {
  if (d.stage != FlowStage::Assigned) {
    throw Error(ErrorKind::Contract, "conventional MT conversion expects the assigned stage");
  }
  const bool any_mt = std::any_of(d.cells.begin(), d.cells.end(), [](const Cell& c) { return is_mt(c.variant); });
  if (any_mt && d.mte_net.empty()) {
    throw Error(ErrorKind::Contract, "design has MT-cells but declares no MTE port");
  }
  Constraints single = d.constraints;
  single.alpha = 1.0;
  for (auto& c : d.cells) {
    if (c.variant != Vth::MtNoVgnd) continue;
    const SwitchMember m{c.id, c.pos, d.kind_of(c).lvt.i_peak};
    const auto sizing = size_switch(std::span(&m, 1), c.pos, single);
    if (!sizing) throw Error(ErrorKind::Internal, "zero-wire switch sizing cannot be infeasible");
    c.variant = Vth::MtBuiltIn;
    c.width = sizing->width;
    c.pins[std::string(kBuiltInMtePin)] = d.mte_net;
  }
  d.stage = FlowStage::SwitchInserted;
  return d;
}

namespace {

// Splits the endpoint's net so that a new buffer sits between the existing
// driver and the endpoint.
void insert_hold_buffer(Design& d, const EndpointTiming& ep, int serial) {
  const CellKind* buf = d.library.find_function(Function::Buf);
  if (buf == nullptr) throw Error(ErrorKind::Characterization, "library has no BUF kind for hold fixing");
  const Netlist nl(d);
  const int ni = nl.net_index(ep.net);
  const NetInfo& info = nl.net(ni);
  const std::string fresh = unique_net_id(d, ep.net + "_hf" + std::to_string(serial));

  Cell b;
  b.kind = buf->name;
  b.variant = Vth::HighVth;
  if (!ep.cell.empty()) {
    // Only the flip-flop's data pin moves behind the buffer.
    Cell* ff = d.find_cell(ep.cell);
    b.id = unique_cell_id(d, "hfbuf_" + ep.cell);
    b.pos = ff->pos;
    b.pins[buf->inputs[0]] = ep.net;
    b.pins[buf->output] = fresh;
    ff->pins.at(d.kind_of(*ff).inputs[0]) = fresh;
  } else {
    // The buffer drives the output port; the old driver and other sinks move
    // to the new net.
    if (info.driver < 0) {
      throw Error(ErrorKind::InfeasibleTiming, "hold violation on port-driven net '" + ep.net + "'");
    }
    b.id = unique_cell_id(d, "hfbuf_" + ep.net);
    b.pos = d.cells[static_cast<std::size_t>(info.driver)].pos;
    for (const auto& s : info.sinks) {
      if (s.cell >= 0) d.cells[static_cast<std::size_t>(s.cell)].pins.at(s.pin) = fresh;
    }
    Cell& drv = d.cells[static_cast<std::size_t>(info.driver)];
    drv.pins.at(d.kind_of(drv).output) = fresh;
    b.pins[buf->inputs[0]] = fresh;
    b.pins[buf->output] = ep.net;
  }
  d.nets.push_back(fresh);
  d.cells.push_back(std::move(b));
}

const EndpointTiming* worst_hold(const TimingAnnotation& ta) {
  const EndpointTiming* worst = nullptr;
  for (const auto& ep : ta.endpoints) {
    if (ep.hold_slack >= 0) continue;
    if (worst == nullptr || ep.hold_slack < worst->hold_slack) worst = &ep;
  }
  return worst;
}

}  // namespace

Design eco_hold_fix(Design d, const BounceMap& bounce, double max_detour, int max_iterations) {
  for (int iter = 0;; ++iter) {
    const auto parasitics = extract_all_postroute(d, d.constraints.seed, max_detour);
    const auto ta = run_sta(d, parasitics, bounce);
    const EndpointTiming* worst = worst_hold(ta);
    if (worst == nullptr) return d;
    if (iter >= max_iterations) {
      std::string residual;
      for (const auto& ep : ta.endpoints) {
        if (ep.hold_slack >= 0) continue;
        if (!residual.empty()) residual += ", ";
        residual += ep.net + " (" + std::to_string(ep.hold_slack) + " ps)";
      }
      throw Error(ErrorKind::InfeasibleTiming,
                  "hold fixing stopped after " + std::to_string(max_iterations) +
                      " buffers; violations remain at " + residual);
    }
    insert_hold_buffer(d, *worst, iter);
  }
}

namespace {

class StageRunner {
 public:
  explicit StageRunner(bool record) : record_(record) {}

  template <typename F>
  auto operator()(std::string_view name, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        finish(name, start);
      } else {
        auto out = fn();
        finish(name, start);
        return out;
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "stage '" + std::string(name) + "': " + e.what());
    }
  }

  std::vector<StageTime> take() { return std::move(times_); }

 private:
  void finish(std::string_view name, std::chrono::steady_clock::time_point start) {
    if (!record_) return;
    const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
    times_.push_back({std::string(name), ms.count()});
  }

  bool record_;
  std::vector<StageTime> times_;
};

}  // namespace

FlowResult run_flow(const Design& input, const FlowOptions& options) {
  StageRunner stage(options.record_stage_timings);
  FlowResult r;
  r.mode = options.mode;
  const double md = options.max_detour;
  const std::uint64_t seed = input.constraints.seed;
  const DelayCorner corner = signoff_corner(options.mode, input.constraints, md);

  stage("validate", [&] { require_valid(input); });
  Design d = stage("initialize_low_vth", [&] { return initialize_low_vth(input); });
  d = stage("assign_vth", [&] {
    const auto pre = estimate_all_preroute(d);
    return options.mode == Mode::DualVth ? dual_vth_only_mode(std::move(d), pre, corner)
                                         : assign_dual_vth(std::move(d), pre, corner);
  });

  SwitchStructure ss;
  if (options.mode == Mode::ImprovedSmt) {
    d = stage("insert_holders", [&] { return insert_holders(std::move(d)); });
    std::tie(d, ss) = stage("insert_initial_switch", [&] { return insert_initial_switch(std::move(d)); });
    stage("cluster_switches", [&] {
      ss = cluster_switches(d, ss);
      d = apply_switch_structure(std::move(d), ss);
    });
    d = stage("buffer_mte", [&] { return buffer_mte(std::move(d)); });
    d.stage = FlowStage::Routed;
    stage("reoptimize_switches", [&] {
      ss = reoptimize_switches(d, ss, seed, md);
      d = buffer_mte(apply_switch_structure(std::move(d), ss));
    });
  } else if (options.mode == Mode::ConventionalSmt) {
    d = stage("conventional_mt", [&] { return buffer_mte(conventional_smt_mode(std::move(d))); });
    d.stage = FlowStage::Routed;
  } else {
    d.stage = FlowStage::Routed;
  }

  const BounceMap bounce = cell_bounces(d, ss);
  d = stage("eco_hold_fix", [&] {
    return eco_hold_fix(std::move(d), bounce, md, options.hold_fix_max_iterations);
  });
  d.stage = FlowStage::Signoff;
  stage("final_sta", [&] {
    require_valid(d);
    r.timing = run_sta(d, extract_all_postroute(d, seed, md), bounce);
  });
  r.accounting = stage("accounting", [&] { return account(d); });
  r.timing_met = r.timing.worst_setup_slack >= 0;
  r.design = std::move(d);
  r.structure = std::move(ss);
  r.stage_times = stage.take();
  return r;
}

std::vector<FlowResult> compare(const Design& input, FlowOptions options) {
  std::vector<FlowResult> out;
  for (Mode m : kAllModes) {
    options.mode = m;
    out.push_back(run_flow(input, options));
  }
  return out;
}

}  // namespace smt
