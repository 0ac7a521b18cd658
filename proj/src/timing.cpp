#include "smt/timing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "smt/errors.hpp"

namespace smt {

double gate_delay(const CellKind& kind, Vth variant, const Load& load, double v_bounce,
                  double k_bounce, double v_dd) {
  const Characterization& p = kind.params(variant);
  if (!(p.d0 > 0) || !(p.r_drive >= 0) || !std::isfinite(p.d0) || !std::isfinite(p.r_drive)) {
    throw Error(ErrorKind::Characterization, "cell kind '" + kind.name + "' has no usable " +
                                                 std::string(to_string(variant)) + " delay data");
  }
  if (v_bounce < 0) throw Error(ErrorKind::Contract, "negative VGND bounce");
  const double r_net_kohm = load.net.r_net / 1000.0;
  const double base = p.d0 + p.r_drive * (load.net.c_net + load.c_pins) + r_net_kohm * load.c_pins;
  const double m = is_mt(variant) ? 1.0 + k_bounce * (v_bounce / v_dd) : 1.0;
  return base * m;
}

std::int64_t round_ps(double ps) { return static_cast<std::int64_t>(std::floor(ps + 0.5)); }

double default_critical_margin(const Constraints& c) { return 0.05 * c.t_clk; }

Timer::Timer(const Design& d, const ParasiticsMap& parasitics, const BounceMap& bounce,
             const DelayCorner& corner)
    : design_(d), netlist_(d), corner_(corner) {
  t_clk_ = round_ps(d.constraints.t_clk);
  hold_min_ = round_ps(d.constraints.hold_min);
  if (const CellKind* h = d.library.find_function(Function::Holder)) holder_c_in_ = h->hvt.c_in;

  const auto n_cells = d.cells.size();
  const auto n_nets = netlist_.nets().size();
  variants_.resize(n_cells);
  bounce_.assign(n_cells, 0.0);
  timed_.assign(n_cells, 0);
  for (std::size_t i = 0; i < n_cells; ++i) {
    const Cell& c = d.cells[i];
    variants_[i] = c.variant;
    if (auto it = bounce.find(c.id); it != bounce.end()) bounce_[i] = it->second;
    const CellKind* k = netlist_.kind(static_cast<int>(i));
    if (k == nullptr) throw Error(ErrorKind::Reference, "cell '" + c.id + "' has an unknown kind");
    timed_[i] = is_combinational(k->function) ? 1 : 0;
  }

  parasitics_.resize(n_nets);
  has_holder_.assign(n_nets, 0);
  for (std::size_t ni = 0; ni < n_nets; ++ni) {
    const NetInfo& net = netlist_.nets()[ni];
    if (net.mte_tree) continue;
    auto it = parasitics.find(net.id);
    if (it == parasitics.end()) {
      throw Error(ErrorKind::Contract, "no parasitics for net '" + net.id + "'");
    }
    parasitics_[ni] = it->second;
    parasitics_[ni].r_net *= corner_.wire_derate;
    parasitics_[ni].c_net *= corner_.wire_derate;
    for (const auto& s : net.sinks) {
      if (s.cell >= 0 && netlist_.kind(s.cell)->function == Function::Holder) has_holder_[ni] = 1;
    }
  }

  // Levelize combinational cells.
  std::vector<int> indeg(n_cells, 0);
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (!timed_[i]) continue;
    for (int in : netlist_.input_nets(static_cast<int>(i))) {
      const int drv = in >= 0 ? netlist_.net(in).driver : -1;
      if (drv >= 0 && timed_[static_cast<std::size_t>(drv)]) indeg[i]++;
    }
  }
  std::deque<int> ready;
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (timed_[i] && indeg[i] == 0) ready.push_back(static_cast<int>(i));
  }
  topo_pos_.assign(n_cells, -1);
  while (!ready.empty()) {
    const int c = ready.front();
    ready.pop_front();
    topo_pos_[static_cast<std::size_t>(c)] = static_cast<int>(topo_.size());
    topo_.push_back(c);
    const int out = netlist_.output_net(c);
    if (out < 0) continue;
    for (const auto& s : netlist_.net(out).sinks) {
      if (s.cell < 0 || !timed_[static_cast<std::size_t>(s.cell)]) continue;
      // A cell may read the same net on two pins; count each pin once.
      if (--indeg[static_cast<std::size_t>(s.cell)] == 0) ready.push_back(s.cell);
    }
  }
  const auto timed_count = static_cast<std::size_t>(std::count(timed_.begin(), timed_.end(), 1));
  if (topo_.size() != timed_count) {
    throw Error(ErrorKind::Internal, "combinational cycle reached the timer");
  }

  for (std::size_t ni = 0; ni < n_nets; ++ni) {
    const NetInfo& net = netlist_.nets()[ni];
    if (net.mte_tree) continue;
    for (const auto& s : net.sinks) {
      if (s.cell < 0) {
        endpoints_.push_back({static_cast<int>(ni), -1});
      } else if (netlist_.kind(s.cell)->function == Function::Dff) {
        endpoints_.push_back({static_cast<int>(ni), s.cell});
      }
    }
  }

  delay_.assign(n_cells, 0);
  arr_max_.assign(n_nets, 0);
  arr_min_.assign(n_nets, 0);
  for (int c : topo_) compute_delay(c);
  propagate(topo_);
}

double Timer::net_load(int net) const {
  const NetInfo& info = netlist_.net(net);
  double c = 0.0;
  for (const auto& s : info.sinks) {
    if (s.cell < 0) continue;
    const CellKind* k = netlist_.kind(s.cell);
    if (k->function == Function::Holder) {
      if (s.pin == k->inputs[0]) c += k->hvt.c_in;
    } else if (is_logic(k->function)) {
      c += k->params(variants_[static_cast<std::size_t>(s.cell)]).c_in;
    }
  }
  if (info.driver >= 0) {
    const Vth dv = variants_[static_cast<std::size_t>(info.driver)];
    if (dv == Vth::MtBuiltIn) {
      c += holder_c_in_;
    } else if (corner_.assume_holders && timed_[static_cast<std::size_t>(info.driver)] &&
               dv != Vth::HighVth && !has_holder_[static_cast<std::size_t>(net)]) {
      c += holder_c_in_;
    }
  }
  return c;
}

void Timer::compute_delay(int cell) {
  const auto ci = static_cast<std::size_t>(cell);
  const int out = netlist_.output_net(cell);
  const Load load{net_load(out), parasitics_[static_cast<std::size_t>(out)]};
  Vth v = variants_[ci];
  double bounce = is_mt(v) ? bounce_[ci] : 0.0;
  if (corner_.planned_bounce > 0 && v != Vth::HighVth) {
    bounce = std::max(bounce, corner_.planned_bounce);
    if (v == Vth::LowVth) v = Vth::MtNoVgnd;
  }
  const auto& c = design_.constraints;
  delay_[ci] = round_ps(gate_delay(*netlist_.kind(cell), v, load, bounce, c.k_bounce, c.v_dd));
}

void Timer::propagate(std::vector<int> seeds) {
  std::priority_queue<int, std::vector<int>, std::greater<>> queue;
  std::vector<char> queued(topo_.size(), 0);
  for (int c : seeds) {
    const int pos = topo_pos_[static_cast<std::size_t>(c)];
    if (!queued[static_cast<std::size_t>(pos)]) {
      queued[static_cast<std::size_t>(pos)] = 1;
      queue.push(pos);
    }
  }
  while (!queue.empty()) {
    const int pos = queue.top();
    queue.pop();
    queued[static_cast<std::size_t>(pos)] = 0;
    const int c = topo_[static_cast<std::size_t>(pos)];
    std::int64_t in_max = 0;
    std::int64_t in_min = 0;
    bool first = true;
    for (int in : netlist_.input_nets(c)) {
      const auto a = arr_max_[static_cast<std::size_t>(in)];
      const auto b = arr_min_[static_cast<std::size_t>(in)];
      in_max = first ? a : std::max(in_max, a);
      in_min = first ? b : std::min(in_min, b);
      first = false;
    }
    const auto out = static_cast<std::size_t>(netlist_.output_net(c));
    const std::int64_t new_max = in_max + delay_[static_cast<std::size_t>(c)];
    const std::int64_t new_min = in_min + delay_[static_cast<std::size_t>(c)];
    if (new_max == arr_max_[out] && new_min == arr_min_[out]) continue;
    arr_max_[out] = new_max;
    arr_min_[out] = new_min;
    for (const auto& s : netlist_.net(static_cast<int>(out)).sinks) {
      if (s.cell < 0 || !timed_[static_cast<std::size_t>(s.cell)]) continue;
      const int sp = topo_pos_[static_cast<std::size_t>(s.cell)];
      if (!queued[static_cast<std::size_t>(sp)]) {
        queued[static_cast<std::size_t>(sp)] = 1;
        queue.push(sp);
      }
    }
  }
}

void Timer::set_variant(std::size_t cell, Vth v) {
  if (variants_[cell] == v) return;
  variants_[cell] = v;
  std::vector<int> seeds;
  if (timed_[cell]) seeds.push_back(static_cast<int>(cell));
  // Input capacitance may differ between variants: the fan-in drivers see a new load.
  for (int in : netlist_.input_nets(static_cast<int>(cell))) {
    if (in < 0) continue;
    const int drv = netlist_.net(in).driver;
    if (drv >= 0 && timed_[static_cast<std::size_t>(drv)]) seeds.push_back(drv);
  }
  for (int c : seeds) compute_delay(c);
  propagate(std::move(seeds));
}

std::int64_t Timer::worst_setup_slack() const {
  std::int64_t worst = kUnconstrained;
  for (const auto& e : endpoints_) {
    worst = std::min(worst, t_clk_ - arr_max_[static_cast<std::size_t>(e.net)]);
  }
  return worst;
}

std::int64_t Timer::worst_hold_slack() const {
  std::int64_t worst = kUnconstrained;
  for (const auto& e : endpoints_) {
    worst = std::min(worst, arr_min_[static_cast<std::size_t>(e.net)] - hold_min_);
  }
  return worst;
}

TimingAnnotation Timer::annotate() const {
  const auto n_nets = netlist_.nets().size();
  std::vector<std::int64_t> required(n_nets, kUnconstrained);
  for (const auto& e : endpoints_) {
    auto& r = required[static_cast<std::size_t>(e.net)];
    r = std::min(r, t_clk_);
  }
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
    const int c = *it;
    const auto out = static_cast<std::size_t>(netlist_.output_net(c));
    if (required[out] == kUnconstrained) continue;
    const std::int64_t r = required[out] - delay_[static_cast<std::size_t>(c)];
    for (int in : netlist_.input_nets(c)) {
      auto& ri = required[static_cast<std::size_t>(in)];
      ri = std::min(ri, r);
    }
  }

  TimingAnnotation ta;
  for (std::size_t ni = 0; ni < n_nets; ++ni) {
    const NetInfo& net = netlist_.nets()[ni];
    if (net.mte_tree) continue;
    NetTiming t;
    t.arrival_max = arr_max_[ni];
    t.arrival_min = arr_min_[ni];
    t.required = required[ni];
    t.slack = required[ni] == kUnconstrained ? kUnconstrained : required[ni] - arr_max_[ni];
    ta.nets.emplace(net.id, t);
  }
  for (int c : topo_) ta.cell_delay.emplace(design_.cells[static_cast<std::size_t>(c)].id, delay_[static_cast<std::size_t>(c)]);
  for (const auto& e : endpoints_) {
    EndpointTiming et;
    et.net = netlist_.net(e.net).id;
    et.cell = e.cell >= 0 ? design_.cells[static_cast<std::size_t>(e.cell)].id : std::string();
    et.arrival_max = arr_max_[static_cast<std::size_t>(e.net)];
    et.arrival_min = arr_min_[static_cast<std::size_t>(e.net)];
    et.setup_slack = t_clk_ - et.arrival_max;
    et.hold_slack = et.arrival_min - hold_min_;
    ta.worst_setup_slack = std::min(ta.worst_setup_slack, et.setup_slack);
    ta.worst_hold_slack = std::min(ta.worst_hold_slack, et.hold_slack);
    ta.endpoints.push_back(std::move(et));
  }
  std::sort(ta.endpoints.begin(), ta.endpoints.end(), [](const auto& a, const auto& b) {
    return std::tie(a.net, a.cell) < std::tie(b.net, b.cell);
  });
  return ta;
}

TimingAnnotation run_sta(const Design& d, const ParasiticsMap& parasitics, const BounceMap& bounce,
                         const DelayCorner& corner) {
  return Timer(d, parasitics, bounce, corner).annotate();
}

std::set<std::string> critical_cells(const Design& d, const TimingAnnotation& ta, double margin) {
  std::set<std::string> out;
  for (const auto& c : d.cells) {
    const CellKind* k = d.library.find(c.kind);
    if (k == nullptr || !is_combinational(k->function)) continue;
    auto pin = c.pins.find(k->output);
    if (pin == c.pins.end()) continue;
    auto it = ta.nets.find(pin->second);
    if (it == ta.nets.end() || it->second.slack == kUnconstrained) continue;
    if (static_cast<double>(it->second.slack) < margin) out.insert(c.id);
  }
  return out;
}

}  // namespace smt
