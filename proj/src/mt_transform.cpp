#include "smt/mt_transform.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>

#include "smt/errors.hpp"
#include "smt/interconnect.hpp"

namespace smt {

namespace {

SwitchMember member_of(const Design& d, const Cell& c) {
  return {c.id, c.pos, d.kind_of(c).lvt.i_peak};
}

std::vector<SwitchMember> members_of(const Design& d, const std::vector<std::string>& ids) {
  std::vector<SwitchMember> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const Cell* c = d.find_cell(id);
    if (c == nullptr) throw Error(ErrorKind::Reference, "switch member '" + id + "' not in design");
    out.push_back(member_of(d, *c));
  }
  return out;
}

struct ClusterShape {
  Point centre;
  double star_um = 0.0;
};

ClusterShape shape_of(std::span<const SwitchMember> members) {
  std::vector<Point> pts;
  pts.reserve(members.size());
  for (const auto& m : members) pts.push_back(m.pos);
  ClusterShape s;
  s.centre = centroid(pts);
  std::int64_t star = 0;
  for (const auto& p : pts) star += manhattan(p, s.centre);
  s.star_um = to_um(star);
  return s;
}

// Builds the cluster record; nullopt if any limit is violated.
std::optional<SwitchCluster> evaluate(const std::string& id, std::span<const SwitchMember> members,
                                      const Constraints& c, double detour, bool enforce_limits) {
  const ClusterShape shape = shape_of(members);
  const double star = shape.star_um * detour;
  if (enforce_limits) {
    if (static_cast<int>(members.size()) > c.n_cells_max) return std::nullopt;
    if (star > c.l_vgnd_max) return std::nullopt;
  }
  auto sizing = size_switch(members, shape.centre, c, detour);
  if (!sizing) return std::nullopt;
  SwitchCluster cl;
  cl.id = id;
  for (const auto& m : members) cl.members.push_back(m.id);
  std::sort(cl.members.begin(), cl.members.end());
  cl.switch_pos = shape.centre;
  cl.width = sizing->width;
  cl.vgnd_star_len = star;
  cl.vgnd_wire_r = sizing->wire_r;
  cl.v_bounce = sizing->v_bounce;
  cl.i_eff = sizing->i_eff;
  cl.detour = detour;
  return cl;
}

// Cluster ids double as SWITCH instance ids and must not collide with other cells.
class SwitchIds {
 public:
  explicit SwitchIds(const Design& d) {
    for (const auto& c : d.cells) {
      if (d.kind_of(c).function != Function::Switch) taken_.insert(c.id);
    }
  }
  std::string next() {
    for (;;) {
      std::string id = "sw" + std::to_string(counter_++);
      if (taken_.insert(id).second) return id;
    }
  }
  void reserve(const std::string& id) { taken_.insert(id); }

 private:
  std::set<std::string> taken_;
  int counter_ = 0;
};

std::vector<const Cell*> vgnd_cells(const Design& d) {
  std::vector<const Cell*> out;
  for (const auto& c : d.cells) {
    if (c.variant == Vth::MtWithVgnd) out.push_back(&c);
  }
  return out;
}

}  // namespace

std::string_view to_string(StructureStage s) {
  switch (s) {
    case StructureStage::Initial:
      return "initial";
    case StructureStage::Clustered:
      return "clustered";
    case StructureStage::Reoptimized:
      return "reoptimized";
  }
  return "?";
}

std::optional<SwitchSizing> size_switch(std::span<const SwitchMember> members, Point switch_pos,
                                        const Constraints& c, double vgnd_detour) {
  if (members.empty()) throw Error(ErrorKind::Contract, "switch sizing needs at least one member");
  double i_sum = 0.0;
  double i_max = 0.0;
  std::int64_t far = 0;
  for (const auto& m : members) {
    i_sum += m.i_peak;
    i_max = std::max(i_max, m.i_peak);
    far = std::max(far, manhattan(m.pos, switch_pos));
  }
  SwitchSizing s;
  s.i_eff = c.alpha * i_sum;
  s.wire_r = c.r_wire * to_um(far) * vgnd_detour;
  s.v_wire = i_max * 1e-3 * s.wire_r;
  if (s.v_wire >= c.v_bounce_max) return std::nullopt;

  const double i_eff_amp = s.i_eff * 1e-3;
  s.width = std::max(c.w_min, c.r0_switch * i_eff_amp / (c.v_bounce_max - s.v_wire));
  s.v_bounce = i_eff_amp * c.r0_switch / s.width + s.v_wire;
  // Rounding can leave the closed-form width one ulp short of the bound.
  while (s.v_bounce > c.v_bounce_max) {
    s.width = std::nextafter(s.width, INFINITY);
    s.v_bounce = i_eff_amp * c.r0_switch / s.width + s.v_wire;
  }
  return s;
}

bool cluster_within_limits(const SwitchCluster& cl, const Constraints& c) {
  return !cl.members.empty() && static_cast<int>(cl.members.size()) <= c.n_cells_max &&
         cl.vgnd_star_len <= c.l_vgnd_max && cl.v_bounce <= c.v_bounce_max && cl.width >= c.w_min;
}

Design insert_holders(Design d) {
  if (d.stage != FlowStage::Assigned && d.stage != FlowStage::HoldersInserted) {
    throw Error(ErrorKind::Contract, "holder insertion expects the assigned stage");
  }
  const CellKind* holder = d.library.find_function(Function::Holder);
  if (holder == nullptr) throw Error(ErrorKind::Characterization, "library has no HOLDER kind");

  std::erase_if(d.cells, [&](const Cell& c) { return d.kind_of(c).function == Function::Holder; });

  const Netlist nl(d);
  std::vector<Cell> added;
  const bool any_mt = std::any_of(d.cells.begin(), d.cells.end(), [](const Cell& c) { return is_mt(c.variant); });
  if (any_mt && d.mte_net.empty()) {
    throw Error(ErrorKind::Contract, "design has MT-cells but declares no MTE port");
  }
  for (const auto& net : nl.nets()) {
    if (net.driver < 0 || net.mte_tree) continue;
    const Cell& drv = d.cells[static_cast<std::size_t>(net.driver)];
    if (drv.variant != Vth::MtNoVgnd && drv.variant != Vth::MtWithVgnd) continue;
    const bool needs_holder = std::any_of(net.sinks.begin(), net.sinks.end(), [&](const SinkRef& s) {
      return s.cell < 0 || !is_mt(d.cells[static_cast<std::size_t>(s.cell)].variant);
    });
    if (!needs_holder) continue;
    Cell h;
    h.id = "hold_" + net.id;
    h.kind = holder->name;
    h.variant = Vth::HighVth;
    h.pos = drv.pos;
    h.pins[holder->inputs[0]] = net.id;
    h.pins[holder->inputs[1]] = d.mte_net;
    added.push_back(std::move(h));
  }
  for (auto& h : added) {
    h.id = unique_cell_id(d, h.id);
    d.cells.push_back(std::move(h));
  }
  d.stage = FlowStage::HoldersInserted;
  return d;
}

std::pair<Design, SwitchStructure> insert_initial_switch(Design d) {
  if (d.stage != FlowStage::HoldersInserted) {
    throw Error(ErrorKind::Contract, "switch insertion expects holders to be inserted");
  }
  for (auto& c : d.cells) {
    if (c.variant == Vth::MtNoVgnd) c.variant = Vth::MtWithVgnd;
  }
  d.stage = FlowStage::SwitchInserted;

  SwitchStructure ss;
  ss.stage = StructureStage::Initial;
  std::vector<SwitchMember> members;
  for (const Cell* c : vgnd_cells(d)) members.push_back(member_of(d, *c));
  if (members.empty()) return {apply_switch_structure(std::move(d), ss), ss};

  SwitchIds ids(d);
  const std::string id = ids.next();
  if (auto cl = evaluate(id, members, d.constraints, 1.0, false)) {
    ss.clusters.push_back(*cl);
  } else {
    // VGND wire alone exceeds the bounce limit; keep the pre-optimization
    // snapshot at minimum width, clustering will split it.
    SwitchCluster snap;
    snap.id = id;
    for (const auto& m : members) snap.members.push_back(m.id);
    std::sort(snap.members.begin(), snap.members.end());
    const ClusterShape shape = shape_of(members);
    snap.switch_pos = shape.centre;
    snap.vgnd_star_len = shape.star_um;
    double i_sum = 0.0;
    double i_max = 0.0;
    std::int64_t far = 0;
    for (const auto& m : members) {
      i_sum += m.i_peak;
      i_max = std::max(i_max, m.i_peak);
      far = std::max(far, manhattan(m.pos, shape.centre));
    }
    const auto& c = d.constraints;
    snap.i_eff = c.alpha * i_sum;
    snap.vgnd_wire_r = c.r_wire * to_um(far);
    snap.width = c.w_min;
    snap.v_bounce = snap.i_eff * 1e-3 * c.r0_switch / snap.width + i_max * 1e-3 * snap.vgnd_wire_r;
    ss.clusters.push_back(std::move(snap));
  }
  return {apply_switch_structure(std::move(d), ss), ss};
}

SwitchStructure cluster_switches(const Design& d, const SwitchStructure& ss) {
  if (ss.stage != StructureStage::Initial) {
    throw Error(ErrorKind::Contract, "clustering expects the initial switch structure");
  }
  std::vector<SwitchMember> cells;
  for (const Cell* c : vgnd_cells(d)) cells.push_back(member_of(d, *c));
  std::sort(cells.begin(), cells.end(), [&](const SwitchMember& a, const SwitchMember& b) {
    const auto ma = morton_code(a.pos, d.die);
    const auto mb = morton_code(b.pos, d.die);
    if (ma != mb) return ma < mb;
    return a.id < b.id;
  });

  const Constraints& c = d.constraints;
  SwitchIds ids(d);
  SwitchStructure out;
  out.stage = StructureStage::Clustered;
  std::vector<SwitchMember> open;
  std::optional<SwitchCluster> open_cluster;
  auto close = [&] {
    if (!open_cluster) return;
    open_cluster->id = ids.next();
    out.clusters.push_back(std::move(*open_cluster));
    open_cluster.reset();
    open.clear();
  };
  for (const auto& cell : cells) {
    open.push_back(cell);
    if (auto grown = evaluate("", open, c, 1.0, true)) {
      open_cluster = std::move(grown);
      continue;
    }
    open.pop_back();
    close();
    open.push_back(cell);
    auto alone = evaluate("", open, c, 1.0, true);
    if (!alone) {
      throw Error(ErrorKind::InfeasibleClustering,
                  "MT-cell '" + cell.id + "' cannot meet the bounce limit even on its own switch");
    }
    open_cluster = std::move(alone);
  }
  close();
  return out;
}

SwitchStructure reoptimize_switches(const Design& d, const SwitchStructure& ss, std::uint64_t seed,
                                    double max_detour) {
  if (ss.stage != StructureStage::Clustered) {
    throw Error(ErrorKind::Contract, "re-optimization expects a clustered switch structure");
  }
  const Constraints& c = d.constraints;
  SwitchIds ids(d);
  for (const auto& cl : ss.clusters) ids.reserve(cl.id);

  struct Work {
    std::string id;
    std::vector<SwitchMember> members;
  };
  std::deque<Work> queue;
  for (const auto& cl : ss.clusters) queue.push_back({cl.id, members_of(d, cl.members)});

  SwitchStructure out;
  out.stage = StructureStage::Reoptimized;
  while (!queue.empty()) {
    Work w = std::move(queue.front());
    queue.pop_front();
    const double detour = detour_factor("vgnd:" + w.id, seed, max_detour);
    Work overflow;
    for (;;) {
      if (auto cl = evaluate(w.id, w.members, c, detour, true)) {
        out.clusters.push_back(std::move(*cl));
        break;
      }
      if (w.members.size() == 1) {
        throw Error(ErrorKind::InfeasibleClustering,
                    "MT-cell '" + w.members.front().id + "' cannot meet the bounce limit after routing");
      }
      const Point centre = shape_of(w.members).centre;
      auto far = std::max_element(w.members.begin(), w.members.end(),
                                  [&](const SwitchMember& a, const SwitchMember& b) {
                                    const auto da = manhattan(a.pos, centre);
                                    const auto db = manhattan(b.pos, centre);
                                    if (da != db) return da < db;
                                    return a.id > b.id;  // prefer the smaller id on ties
                                  });
      overflow.members.push_back(*far);
      w.members.erase(far);
    }
    if (!overflow.members.empty()) {
      overflow.id = ids.next();
      queue.push_back(std::move(overflow));
    }
  }
  return out;
}

Design apply_switch_structure(Design d, const SwitchStructure& ss) {
  const CellKind* sw = d.library.find_function(Function::Switch);
  if (sw == nullptr && !ss.clusters.empty()) {
    throw Error(ErrorKind::Characterization, "library has no SWITCH kind");
  }
  if (d.mte_net.empty() && !ss.clusters.empty()) {
    throw Error(ErrorKind::Contract, "switches need an MTE port");
  }
  std::erase_if(d.cells, [&](const Cell& c) { return d.kind_of(c).function == Function::Switch; });
  std::unordered_map<std::string, std::string> owner;
  for (const auto& cl : ss.clusters) {
    for (const auto& m : cl.members) owner[m] = cl.id;
  }
  for (auto& c : d.cells) {
    if (c.variant != Vth::MtWithVgnd) continue;
    auto it = owner.find(c.id);
    c.vgnd = it == owner.end() ? std::string() : it->second;
  }
  for (const auto& cl : ss.clusters) {
    Cell s;
    s.id = cl.id;
    s.kind = sw->name;
    s.variant = Vth::HighVth;
    s.pos = cl.switch_pos;
    s.width = cl.width;
    s.pins[sw->inputs[0]] = d.mte_net;
    d.cells.push_back(std::move(s));
  }
  switch (ss.stage) {
    case StructureStage::Initial:
      d.stage = std::max(d.stage, FlowStage::SwitchInserted);
      break;
    case StructureStage::Clustered:
      d.stage = std::max(d.stage, FlowStage::Clustered);
      break;
    case StructureStage::Reoptimized:
      d.stage = std::max(d.stage, FlowStage::Reoptimized);
      break;
  }
  return d;
}

BounceMap cell_bounces(const Design& d, const SwitchStructure& ss) {
  BounceMap out;
  for (const auto& cl : ss.clusters) {
    for (const auto& m : cl.members) out[m] = cl.v_bounce;
  }
  for (const auto& c : d.cells) {
    if (c.variant != Vth::MtBuiltIn || c.width <= 0) continue;
    const double i = d.kind_of(c).lvt.i_peak * 1e-3;
    out[c.id] = i * d.constraints.r0_switch / c.width;
  }
  return out;
}

}  // namespace smt
