#pragma once

// Holder insertion and shared-switch construction for MT-cells.
//
// A cluster of MT-cells ties its VGND ports to one high-Vth switch. Sizing:
//   i_eff = alpha * sum(i_peak)                         [mA]
//   v_w   = max(i_peak) * r_wire * d_far * detour        [V]  (farthest member)
//   width = max(w_min, r0 * i_eff / (v_bounce_max - v_w)) [um]
//   v_bounce = i_eff * r0 / width + v_w                   [V]
// which is infeasible when v_w >= v_bounce_max.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smt/design.hpp"
#include "smt/timing.hpp"

namespace smt {

struct SwitchCluster {
  std::string id;  // also the id of the SWITCH instance
  std::vector<std::string> members;  // sorted
  Point switch_pos;
  double width = 0.0;          // um
  double vgnd_star_len = 0.0;  // um, sum of member-to-switch distances (routed when reoptimized)
  double vgnd_wire_r = 0.0;    // Ohm, worst member-to-switch path
  double v_bounce = 0.0;       // V
  double i_eff = 0.0;          // mA
  double detour = 1.0;         // VGND routing detour applied to the lengths above

  bool operator==(const SwitchCluster&) const = default;
};

enum class StructureStage { Initial, Clustered, Reoptimized };

std::string_view to_string(StructureStage s);

struct SwitchStructure {
  std::vector<SwitchCluster> clusters;
  StructureStage stage = StructureStage::Initial;

  bool operator==(const SwitchStructure&) const = default;
};

struct SwitchMember {
  std::string id;
  Point pos;
  double i_peak = 0.0;  // mA
};

struct SwitchSizing {
  double width = 0.0;
  double v_bounce = 0.0;
  double i_eff = 0.0;
  double v_wire = 0.0;
  double wire_r = 0.0;
};

/// Minimum switch width keeping the bounce within v_bounce_max, or nullopt
/// when the VGND wire alone reaches the limit (the caller must split).
std::optional<SwitchSizing> size_switch(std::span<const SwitchMember> members, Point switch_pos,
                                        const Constraints& c, double vgnd_detour = 1.0);

/// Holders on every net driven by an MT-cell that has at least one non-MT sink
/// (primary outputs count as non-MT); one per net, placed at the driver.
/// Existing holders are replaced.
Design insert_holders(Design d);

/// MT-cells get VGND ports and all tie to a single switch at their centroid.
/// Limits on star length and member count are not enforced at this stage.
std::pair<Design, SwitchStructure> insert_initial_switch(Design d);

/// Greedy clustering in Morton order (ties by id): a cell joins the open
/// cluster while member count, star length and switch sizing stay feasible.
SwitchStructure cluster_switches(const Design& d, const SwitchStructure& ss);

/// Resizes every cluster with routed VGND lengths (star length and worst path
/// scaled by a per-cluster detour). A cluster that no longer fits evicts its
/// member farthest from the centroid into an overflow cluster until it does.
SwitchStructure reoptimize_switches(const Design& d, const SwitchStructure& ss, std::uint64_t seed,
                                    double max_detour);

/// Replaces the design's SWITCH instances with one per cluster and ties the
/// members' VGND ports to them.
Design apply_switch_structure(Design d, const SwitchStructure& ss);

/// Per-cell VGND bounce: cluster bounce for shared-switch members, built-in
/// switch bounce for conventional MT-cells.
BounceMap cell_bounces(const Design& d, const SwitchStructure& ss);

/// True when the cluster meets the bounce, star-length and member-count limits.
bool cluster_within_limits(const SwitchCluster& cl, const Constraints& c);

}  // namespace smt
