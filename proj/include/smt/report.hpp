#pragma once

// Flow reports: JSON (raw values, versioned schema), a text table normalized
// to the Dual-Vth run, an SVG floorplan view and the switch-cluster dump.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smt/flow.hpp"

namespace smt {

inline constexpr std::string_view kReportSchema = "smtflow-report/1";

struct ModeReport {
  Mode mode = Mode::DualVth;
  double total_area = 0.0;
  double standby_leakage = 0.0;
  std::optional<std::int64_t> worst_setup_slack;  // absent when nothing is constrained
  std::optional<std::int64_t> worst_hold_slack;
  bool timing_met = false;
  ComponentCounts counts;
  // Percent of the Dual-Vth run, present when the report holds one.
  std::optional<double> area_pct;
  std::optional<double> leakage_pct;

  bool operator==(const ModeReport&) const = default;
};

struct StageTimingReport {
  Mode mode = Mode::DualVth;
  std::vector<StageTime> stages;

  bool operator==(const StageTimingReport&) const = default;
};

struct FlowReport {
  std::string schema = std::string(kReportSchema);
  std::uint64_t seed = 0;
  std::string config_hash;  // 16 hex digits
  std::vector<ModeReport> modes;
  std::vector<StageTimingReport> stage_timings;  // only when recorded

  bool operator==(const FlowReport&) const = default;
};

/// FNV-1a of the canonical constraints JSON, as 16 lowercase hex digits.
std::string config_hash(const Constraints& c);

FlowReport make_report(const std::vector<FlowResult>& results, const Constraints& c);

nlohmann::json report_to_json(const FlowReport& r);
/// Throws Error(Syntax) on a malformed report.
FlowReport report_from_json(const nlohmann::json& j);
std::string write_report_json(const FlowReport& r);

/// One row per mode: "<name>  <area>% / <leakage>%" with two decimals, or raw
/// values when no Dual-Vth baseline is present.
std::string format_table(const FlowReport& r);

/// Members, positions, widths and bounces of every switch cluster.
nlohmann::json cluster_dump(const Design& d, const SwitchStructure& ss);

/// Cell positions coloured by threshold, cluster hulls, switch locations and
/// the MTE distribution tree.
std::string render_svg(const Design& d, const SwitchStructure& ss);

}  // namespace smt
