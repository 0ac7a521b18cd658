#pragma once

// Max/min-delay static timing over the combinational network.
//
// Delay model per cell (one value for all input arcs):
//   d = [d0 + r_drive*(c_net + c_pins) + r_net*c_pins] * m
//   m = 1 + k_bounce * v_bounce / v_dd   for MT variants, 1 otherwise
// kOhm * fF = ps; r_net is held in Ohm and converted. Cell delays are rounded
// half up to integer picoseconds before propagation, so all arrival and slack
// arithmetic is exact.
//
// Timing starts at primary inputs and DFF outputs (t = 0) and ends at primary
// outputs and DFF data inputs, where the required time is t_clk. The MTE tree
// is not timed.

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "smt/design.hpp"

namespace smt {

enum class RouteStage { PreRoute, PostRoute };

struct NetParasitics {
  double r_net = 0.0;   // Ohm
  double c_net = 0.0;   // fF
  double length = 0.0;  // um
  RouteStage stage = RouteStage::PreRoute;

  bool operator==(const NetParasitics&) const = default;
};

using ParasiticsMap = std::map<std::string, NetParasitics>;  // by net id

/// Per-cell VGND bounce in volts, keyed by cell id. Cells absent from the map
/// see zero bounce.
using BounceMap = std::map<std::string, double>;

struct Load {
  double c_pins = 0.0;  // fF
  NetParasitics net;
};

/// Throws Error(Characterization) if the variant record is unusable.
double gate_delay(const CellKind& kind, Vth variant, const Load& load, double v_bounce,
                  double k_bounce, double v_dd);

std::int64_t round_ps(double ps);

inline constexpr std::int64_t kUnconstrained = std::numeric_limits<std::int64_t>::max();

/// Pessimistic view used while choosing thresholds, so that later stages
/// (holders, switch bounce, routing detour) cannot push timing negative.
struct DelayCorner {
  double wire_derate = 1.0;        // scales r_net and c_net
  double planned_bounce = 0.0;     // V, applied to every non-high-Vth combinational cell
  bool assume_holders = false;     // holder load on every net driven by a non-high-Vth cell
};

struct NetTiming {
  std::int64_t arrival_max = 0;
  std::int64_t arrival_min = 0;
  std::int64_t required = kUnconstrained;
  std::int64_t slack = kUnconstrained;

  bool operator==(const NetTiming&) const = default;
};

struct EndpointTiming {
  std::string net;
  std::string cell;  // DFF id, empty for a primary output
  std::int64_t arrival_max = 0;
  std::int64_t arrival_min = 0;
  std::int64_t setup_slack = 0;
  std::int64_t hold_slack = 0;

  bool operator==(const EndpointTiming&) const = default;
};

struct TimingAnnotation {
  std::map<std::string, NetTiming> nets;
  std::map<std::string, std::int64_t> cell_delay;
  std::vector<EndpointTiming> endpoints;
  std::int64_t worst_setup_slack = kUnconstrained;
  std::int64_t worst_hold_slack = kUnconstrained;

  bool operator==(const TimingAnnotation&) const = default;
};

/// Incremental timer. Holds a reference to the design (library and
/// connectivity); variants are tracked internally so that callers can try
/// swaps without copying the design.
class Timer {
 public:
  Timer(const Design& d, const ParasiticsMap& parasitics, const BounceMap& bounce,
        const DelayCorner& corner = {});

  std::size_t cell_count() const { return variants_.size(); }
  Vth variant(std::size_t cell) const { return variants_[cell]; }

  /// Changes one cell's variant and re-propagates only the affected cone.
  void set_variant(std::size_t cell, Vth v);

  std::int64_t worst_setup_slack() const;
  std::int64_t worst_hold_slack() const;
  std::int64_t cell_delay(std::size_t cell) const { return delay_[cell]; }

  TimingAnnotation annotate() const;

 private:
  double net_load(int net) const;
  void compute_delay(int cell);
  void propagate(std::vector<int> seeds);

  const Design& design_;
  Netlist netlist_;
  DelayCorner corner_;
  std::int64_t t_clk_ = 0;
  std::int64_t hold_min_ = 0;
  double holder_c_in_ = 0.0;

  std::vector<Vth> variants_;
  std::vector<double> bounce_;
  std::vector<char> timed_;  // combinational cell
  std::vector<NetParasitics> parasitics_;
  std::vector<char> has_holder_;
  std::vector<std::int64_t> delay_;
  std::vector<std::int64_t> arr_max_;
  std::vector<std::int64_t> arr_min_;
  std::vector<int> topo_;
  std::vector<int> topo_pos_;

  struct Endpoint {
    int net;
    int cell;  // -1 for a primary output
  };
  std::vector<Endpoint> endpoints_;
};

TimingAnnotation run_sta(const Design& d, const ParasiticsMap& parasitics,
                         const BounceMap& bounce = {}, const DelayCorner& corner = {});

/// Combinational cells on some path whose endpoint slack is below `margin`.
std::set<std::string> critical_cells(const Design& d, const TimingAnnotation& ta, double margin);

/// Default criticality margin: 5% of the clock period.
double default_critical_margin(const Constraints& c);

}  // namespace smt
