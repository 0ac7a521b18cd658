#pragma once

// End-to-end flow for the three comparison modes.
//
//   validate -> all low-Vth -> threshold assignment -> mode-specific MT steps
//   -> post-route extraction -> hold-fix ECO -> final STA -> accounting
//
// Threshold assignment runs under a signoff corner that already includes the
// worst routing detour, the bounce limit on every cell that may become an
// MT-cell and holder loads, so the post-route design keeps non-negative slack.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smt/design.hpp"
#include "smt/interconnect.hpp"
#include "smt/mt_transform.hpp"
#include "smt/timing.hpp"

namespace smt {

enum class Mode { DualVth, ConventionalSmt, ImprovedSmt };

std::string_view to_string(Mode m);        // "dualvth", "conventional", "improved"
std::string_view display_name(Mode m);     // "Dual-Vth", "Con.-SMT", "Imp.-SMT"
std::optional<Mode> parse_mode(std::string_view s);
inline constexpr Mode kAllModes[] = {Mode::DualVth, Mode::ConventionalSmt, Mode::ImprovedSmt};

struct FlowOptions {
  Mode mode = Mode::ImprovedSmt;
  double max_detour = kDefaultMaxDetour;
  int hold_fix_max_iterations = 1000;
  bool record_stage_timings = false;
};

/// Corner used for threshold assignment in `mode`.
DelayCorner signoff_corner(Mode mode, const Constraints& c, double max_detour = kDefaultMaxDetour);

struct ComponentCounts {
  int hvt = 0;  // high-Vth logic cells (hold-fix buffers included)
  int lvt = 0;
  int mt = 0;
  int holders = 0;   // HOLDER instances plus built-in holders
  int switches = 0;  // SWITCH instances plus built-in switches
  int mte_buffers = 0;

  bool operator==(const ComponentCounts&) const = default;
};

struct Accounting {
  double total_area = 0.0;       // um^2
  double standby_leakage = 0.0;  // nA
  ComponentCounts counts;

  bool operator==(const Accounting&) const = default;
};

/// Area, standby leakage and component counts of a finished design.
/// Shared-switch MT-cells leak nothing in standby; switches leak l_sw per um
/// of width; conventional MT-cells carry their built-in switch and holder.
Accounting account(const Design& d);

/// Every MT-cell becomes a conventional MT-cell with its own switch, sized
/// for that cell alone at alpha = 1 with no VGND wire, and its MTE pin bound
/// to the MTE net. Stage moves to SwitchInserted.
Design conventional_smt_mode(Design d);

/// Inserts high-Vth buffers in front of the worst hold-violating endpoint
/// until every endpoint meets hold_min. Parasitics are re-extracted after
/// each insertion. Throws Error(InfeasibleTiming) when the cap is reached.
Design eco_hold_fix(Design d, const BounceMap& bounce, double max_detour, int max_iterations);

struct StageTime {
  std::string stage;
  double ms = 0.0;

  bool operator==(const StageTime&) const = default;
};

struct FlowResult {
  Mode mode = Mode::ImprovedSmt;
  Design design;
  SwitchStructure structure;
  TimingAnnotation timing;
  Accounting accounting;
  bool timing_met = false;
  std::vector<StageTime> stage_times;  // empty unless requested
};

/// Runs the whole flow for one mode. Stage failures are rethrown with the
/// stage name prefixed and their kind preserved. A final setup violation is
/// not thrown; `timing_met` is false instead.
FlowResult run_flow(const Design& input, const FlowOptions& options);

/// All three modes on the same input, in kAllModes order.
std::vector<FlowResult> compare(const Design& input, FlowOptions options);

}  // namespace smt
