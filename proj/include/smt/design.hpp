#pragma once

// Netlist / placement / library / constraint data model.
//
// A Design is a plain value: every flow stage takes one, transforms it and
// hands back a new one. Connectivity is stored as pin-to-net bindings on the
// cells; the Netlist class builds the indexed driver/sink view on demand.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace smt {

enum class Vth {
  HighVth,
  LowVth,
  MtNoVgnd,    // MT-cell before the switch exists
  MtWithVgnd,  // MT-cell with its VGND port tied to a shared switch
  MtBuiltIn,   // conventional MT-cell: built-in switch and holder
};

bool is_mt(Vth v);
std::string_view to_string(Vth v);
std::optional<Vth> parse_vth(std::string_view s);

enum class Function { Inv, Nand2, Nor2, And2, Buf, Dff, Holder, Switch, MteBuf };

std::string_view to_string(Function f);
std::optional<Function> parse_function(std::string_view s);

/// INV/NAND2/NOR2/AND2/BUF: the cells timed as arcs and eligible for
/// threshold assignment.
bool is_combinational(Function f);

/// Combinational cells plus DFF. Anything that carries a signal.
bool is_logic(Function f);

/// Electrical characterization of one threshold variant.
/// Units: area um^2, leak nA, d0 ps, r_drive kOhm, c_in fF, i_peak mA.
struct Characterization {
  double area = 0.0;
  double leak = 0.0;
  double d0 = 0.0;
  double r_drive = 0.0;
  double c_in = 0.0;
  double i_peak = 0.0;

  bool operator==(const Characterization&) const = default;
};

struct CellKind {
  std::string name;
  Function function = Function::Inv;
  std::vector<std::string> inputs;
  std::string output;  // empty for HOLDER and SWITCH
  Characterization hvt;
  Characterization lvt;

  /// MT variants are built from low-Vth transistors and share its record.
  const Characterization& params(Vth v) const {
    return v == Vth::HighVth ? hvt : lvt;
  }

  bool operator==(const CellKind&) const = default;
};

struct Library {
  std::vector<CellKind> kinds;

  const CellKind* find(std::string_view name) const;
  const CellKind* find_function(Function f) const;

  bool operator==(const Library&) const = default;
};

struct Constraints {
  double t_clk = 1000.0;         // ps
  double hold_min = 0.0;         // ps
  double v_dd = 1.0;             // V
  double v_bounce_max = 0.05;    // V
  double l_vgnd_max = 150.0;     // um, per-cluster VGND star length
  int n_cells_max = 16;          // cells per switch
  double alpha = 0.5;            // simultaneous-switching derating
  double k_bounce = 2.0;         // delay degradation per unit v_bounce/v_dd
  double r0_switch = 2000.0;     // Ohm*um
  double l_sw = 0.8;             // nA/um
  double a_sw = 0.3;             // um^2/um
  double w_min = 0.5;            // um
  double r_wire = 0.4;           // Ohm/um
  double c_wire = 0.15;          // fF/um
  int mte_max_fanout = 16;
  std::uint64_t seed = 1;

  bool operator==(const Constraints&) const = default;
};

/// Integer nanometres.
struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;

  bool operator==(const Point&) const = default;
};

struct Box {
  Point lo;
  Point hi;

  bool contains(Point p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  bool operator==(const Box&) const = default;
};

inline double to_um(std::int64_t nm) { return static_cast<double>(nm) / 1000.0; }
std::int64_t to_nm(double um);

inline std::int64_t manhattan(Point a, Point b) {
  const std::int64_t dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const std::int64_t dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx + dy;
}

/// Arithmetic mean of the points, rounded half up to the nm grid.
Point centroid(const std::vector<Point>& points);

struct Cell {
  std::string id;
  std::string kind;
  Vth variant = Vth::HighVth;
  Point pos;
  std::map<std::string, std::string> pins;  // pin name -> net id
  double width = 0.0;  // um; SWITCH width or MtBuiltIn built-in switch width
  std::string vgnd;    // MtWithVgnd: id of the switch its VGND port ties to

  bool operator==(const Cell&) const = default;
};

enum class FlowStage {
  Input,
  AllLow,
  Assigned,
  HoldersInserted,
  SwitchInserted,
  Clustered,
  Routed,
  Reoptimized,
  Signoff,
};

std::string_view to_string(FlowStage s);
std::optional<FlowStage> parse_flow_stage(std::string_view s);

/// Pin of the conventional MT-cell that takes the MTE signal.
inline constexpr std::string_view kBuiltInMtePin = "MTE";

struct Design {
  int format = 1;
  FlowStage stage = FlowStage::Input;
  Library library;
  Constraints constraints;
  Box die;
  std::vector<Cell> cells;
  std::vector<std::string> nets;
  std::vector<std::string> inputs;   // primary input nets
  std::vector<std::string> outputs;  // primary output nets
  std::string mte_net;

  const Cell* find_cell(std::string_view id) const;
  Cell* find_cell(std::string_view id);
  const CellKind& kind_of(const Cell& c) const;

  bool operator==(const Design&) const = default;
};

/// Sorts every id-keyed collection so that equal structures compare equal.
void canonicalize(Design& d);
bool structurally_equal(Design a, Design b);

/// Returns a net id not present in `d`, derived from `base`.
std::string unique_net_id(const Design& d, const std::string& base);
std::string unique_cell_id(const Design& d, const std::string& base);

// -- indexed connectivity ----------------------------------------------------

struct SinkRef {
  int cell = -1;  // -1: primary output
  std::string pin;
};

struct NetInfo {
  std::string id;
  int driver = -1;  // cell index; -1 when driven by a primary input (or undriven)
  int driver_count = 0;
  bool primary_input = false;
  bool primary_output = false;
  bool mte_tree = false;  // MTE root or driven by an MTEBUF
  std::vector<SinkRef> sinks;
};

/// Driver/sink index over a Design. Tolerates broken references (they are
/// skipped) so that validation can run on it; holds no pointer to the Design
/// except for library kinds, so it must not outlive the Design's library.
class Netlist {
 public:
  explicit Netlist(const Design& d);

  int net_index(std::string_view id) const;   // -1 if absent
  int cell_index(std::string_view id) const;  // -1 if absent

  const std::vector<NetInfo>& nets() const { return nets_; }
  const NetInfo& net(int i) const { return nets_[static_cast<std::size_t>(i)]; }

  const CellKind* kind(int cell) const { return kinds_[static_cast<std::size_t>(cell)]; }
  int output_net(int cell) const { return outputs_[static_cast<std::size_t>(cell)]; }
  /// Net per kind input pin, in kind order (-1 if unbound).
  const std::vector<int>& input_nets(int cell) const {
    return inputs_[static_cast<std::size_t>(cell)];
  }

 private:
  std::vector<NetInfo> nets_;
  std::unordered_map<std::string, int> net_index_;
  std::unordered_map<std::string, int> cell_index_;
  std::vector<const CellKind*> kinds_;
  std::vector<int> outputs_;
  std::vector<std::vector<int>> inputs_;
};

}  // namespace smt
