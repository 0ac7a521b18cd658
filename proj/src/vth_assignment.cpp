#include "smt/vth_assignment.hpp"

#include <algorithm>

#include "smt/errors.hpp"

namespace smt {

namespace {

Design greedy_high_vth(Design d, const ParasiticsMap& parasitics, const DelayCorner& corner) {
  if (d.stage != FlowStage::AllLow) {
    throw Error(ErrorKind::Contract, "threshold assignment expects the all-low stage, got '" +
                                         std::string(to_string(d.stage)) + "'");
  }
  Timer timer(d, parasitics, {}, corner);
  if (timer.worst_setup_slack() < 0) {
    const auto ta = timer.annotate();
    auto worst = std::min_element(ta.endpoints.begin(), ta.endpoints.end(),
                                  [](const auto& a, const auto& b) { return a.setup_slack < b.setup_slack; });
    throw Error(ErrorKind::InfeasibleTiming,
                "all-low-Vth design misses timing: worst endpoint '" + worst->net +
                    (worst->cell.empty() ? "" : "' at " + worst->cell) + "' slack " +
                    std::to_string(worst->setup_slack) + " ps");
  }

  struct Candidate {
    std::size_t cell;
    double saving;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < d.cells.size(); ++i) {
    const Cell& c = d.cells[i];
    const CellKind& k = d.kind_of(c);
    if (!is_combinational(k.function) || c.variant != Vth::LowVth) continue;
    const double saving = k.lvt.leak - k.hvt.leak;
    if (saving > 0) candidates.push_back({i, saving});
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.saving != b.saving) return a.saving > b.saving;
    return d.cells[a.cell].id < d.cells[b.cell].id;
  });

  for (const auto& cand : candidates) {
    timer.set_variant(cand.cell, Vth::HighVth);
    if (timer.worst_setup_slack() < 0) timer.set_variant(cand.cell, Vth::LowVth);
  }
  for (std::size_t i = 0; i < d.cells.size(); ++i) d.cells[i].variant = timer.variant(i);
  d.stage = FlowStage::Assigned;
  return d;
}

}  // namespace

Design initialize_low_vth(Design d) {
  if (d.stage != FlowStage::Input && d.stage != FlowStage::AllLow) {
    throw Error(ErrorKind::Contract, "low-Vth initialization expects the input stage");
  }
  for (auto& c : d.cells) {
    if (is_logic(d.kind_of(c).function)) c.variant = Vth::LowVth;
  }
  d.stage = FlowStage::AllLow;
  return d;
}

Design assign_dual_vth(Design d, const ParasiticsMap& parasitics, const DelayCorner& corner) {
  d = greedy_high_vth(std::move(d), parasitics, corner);
  for (auto& c : d.cells) {
    if (c.variant == Vth::LowVth && is_combinational(d.kind_of(c).function)) c.variant = Vth::MtNoVgnd;
  }
  return d;
}

Design dual_vth_only_mode(Design d, const ParasiticsMap& parasitics, const DelayCorner& corner) {
  return greedy_high_vth(std::move(d), parasitics, corner);
}

double dual_vth_leakage(const Design& d) {
  double total = 0.0;
  for (const auto& c : d.cells) {
    const CellKind& k = d.kind_of(c);
    if (is_logic(k.function)) total += k.params(c.variant).leak;
  }
  return total;
}

}  // namespace smt
