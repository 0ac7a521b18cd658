#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "smt/design.hpp"
#include "smt/timing.hpp"

namespace smt {

/// Upper bound of the routing detour: routed length = HPWL * (1 + bound * u).
inline constexpr double kDefaultMaxDetour = 0.25;

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(std::string_view s);

/// 2-D Z-order code of a point relative to the die's lower-left corner.
std::uint64_t morton_code(Point p, const Box& die);

/// Half-perimeter of the bounding box, in nm. Zero for fewer than two points.
std::int64_t hpwl(const std::vector<Point>& pins);

/// Placed pins of a net: its driver cell and every sink cell. Ports carry no
/// position and are skipped.
std::vector<Point> net_pin_positions(const Design& d, const Netlist& nl, int net);

NetParasitics estimate_rc_preroute(const std::vector<Point>& pins, const Constraints& c);

/// Deterministic detour factor in [1, 1 + max_detour). The key is hashed with
/// 64-bit FNV-1a, folded with the seed and finished with the splitmix64 mixer;
/// the top 53 bits give u in [0, 1).
double detour_factor(std::string_view key, std::uint64_t seed, double max_detour = kDefaultMaxDetour);

NetParasitics extract_rc_postroute(const std::vector<Point>& pins, std::string_view net_id,
                                   const Constraints& c, std::uint64_t seed,
                                   double max_detour = kDefaultMaxDetour);

ParasiticsMap estimate_all_preroute(const Design& d);
ParasiticsMap extract_all_postroute(const Design& d, std::uint64_t seed,
                                    double max_detour = kDefaultMaxDetour);

/// Rebuilds the MTE distribution tree. Sinks are switch and holder enable
/// pins plus the MTE pins of conventional MT-cells. Above mte_max_fanout
/// sinks, they are cut in Morton order into ceil(n / fanout) contiguous groups,
/// each driven by a high-Vth MTEBUF at the group centroid; the buffer level is
/// buffered the same way until the root fanout fits. Existing MTE buffers are
/// removed first, so the call is idempotent.
Design buffer_mte(Design d);

}  // namespace smt
