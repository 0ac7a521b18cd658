#pragma once

#include "smt/design.hpp"
#include "smt/timing.hpp"

namespace smt {

/// Every logic cell becomes low-Vth; stage moves to AllLow. Idempotent.
Design initialize_low_vth(Design d);

/// Greedy slack-driven replacement. Candidates (low-Vth combinational cells)
/// are visited by descending leakage saving, ties by ascending id; a swap to
/// high-Vth is kept iff worst setup slack stays >= 0 under `corner`. Cells left
/// low-Vth become MT-cells without VGND ports. Stage moves to Assigned.
///
/// Throws Error(InfeasibleTiming) naming the worst endpoint when the all-low
/// design already misses timing under `corner`.
Design assign_dual_vth(Design d, const ParasiticsMap& parasitics, const DelayCorner& corner = {});

/// Same greedy pass; the remaining critical cells stay low-Vth (no MT
/// conversion). Baseline for comparisons.
Design dual_vth_only_mode(Design d, const ParasiticsMap& parasitics, const DelayCorner& corner = {});

/// Sum of per-variant leakage over logic cells, counting MT-cells at their
/// low-Vth leakage (what the cell would leak without a switch).
double dual_vth_leakage(const Design& d);

}  // namespace smt
