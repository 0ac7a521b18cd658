#include "smt/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_set>

#include "smt/errors.hpp"

namespace smt {

namespace {

constexpr std::array<std::pair<Vth, std::string_view>, 5> kVthNames{{
    {Vth::HighVth, "hvt"},
    {Vth::LowVth, "lvt"},
    {Vth::MtNoVgnd, "mt"},
    {Vth::MtWithVgnd, "mt_vgnd"},
    {Vth::MtBuiltIn, "mt_builtin"},
}};

constexpr std::array<std::pair<Function, std::string_view>, 9> kFunctionNames{{
    {Function::Inv, "INV"},
    {Function::Nand2, "NAND2"},
    {Function::Nor2, "NOR2"},
    {Function::And2, "AND2"},
    {Function::Buf, "BUF"},
    {Function::Dff, "DFF"},
    {Function::Holder, "HOLDER"},
    {Function::Switch, "SWITCH"},
    {Function::MteBuf, "MTEBUF"},
}};

constexpr std::array<std::pair<FlowStage, std::string_view>, 9> kStageNames{{
    {FlowStage::Input, "input"},
    {FlowStage::AllLow, "all_low"},
    {FlowStage::Assigned, "assigned"},
    {FlowStage::HoldersInserted, "holders_inserted"},
    {FlowStage::SwitchInserted, "switch_inserted"},
    {FlowStage::Clustered, "clustered"},
    {FlowStage::Routed, "routed"},
    {FlowStage::Reoptimized, "reoptimized"},
    {FlowStage::Signoff, "signoff"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table,
                          std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

// floor(num / den) for den > 0
std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

}  // namespace

bool is_mt(Vth v) {
  return v == Vth::MtNoVgnd || v == Vth::MtWithVgnd || v == Vth::MtBuiltIn;
}

std::string_view to_string(Vth v) { return name_of(kVthNames, v); }
std::optional<Vth> parse_vth(std::string_view s) { return value_of(kVthNames, s); }
std::string_view to_string(Function f) { return name_of(kFunctionNames, f); }
std::optional<Function> parse_function(std::string_view s) { return value_of(kFunctionNames, s); }
std::string_view to_string(FlowStage s) { return name_of(kStageNames, s); }
std::optional<FlowStage> parse_flow_stage(std::string_view s) { return value_of(kStageNames, s); }

bool is_combinational(Function f) {
  switch (f) {
    case Function::Inv:
    case Function::Nand2:
    case Function::Nor2:
    case Function::And2:
    case Function::Buf:
      return true;
    default:
      return false;
  }
}

bool is_logic(Function f) { return is_combinational(f) || f == Function::Dff; }

const CellKind* Library::find(std::string_view name) const {
  for (const auto& k : kinds) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

const CellKind* Library::find_function(Function f) const {
  for (const auto& k : kinds) {
    if (k.function == f) return &k;
  }
  return nullptr;
}

std::int64_t to_nm(double um) { return std::llround(um * 1000.0); }

Point centroid(const std::vector<Point>& points) {
  if (points.empty()) return {};
  std::int64_t sx = 0;
  std::int64_t sy = 0;
  for (const auto& p : points) {
    sx += p.x;
    sy += p.y;
  }
  const auto n = static_cast<std::int64_t>(points.size());
  // round half up: floor((2*s + n) / (2*n))
  return {floor_div(2 * sx + n, 2 * n), floor_div(2 * sy + n, 2 * n)};
}

const Cell* Design::find_cell(std::string_view id) const {
  for (const auto& c : cells) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

Cell* Design::find_cell(std::string_view id) {
  for (auto& c : cells) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const CellKind& Design::kind_of(const Cell& c) const {
  const CellKind* k = library.find(c.kind);
  if (k == nullptr) throw Error(ErrorKind::Reference, "unknown cell kind '" + c.kind + "'");
  return *k;
}

void canonicalize(Design& d) {
  std::sort(d.library.kinds.begin(), d.library.kinds.end(),
            [](const CellKind& a, const CellKind& b) { return a.name < b.name; });
  std::sort(d.cells.begin(), d.cells.end(),
            [](const Cell& a, const Cell& b) { return a.id < b.id; });
  std::sort(d.nets.begin(), d.nets.end());
  std::sort(d.inputs.begin(), d.inputs.end());
  std::sort(d.outputs.begin(), d.outputs.end());
}

bool structurally_equal(Design a, Design b) {
  canonicalize(a);
  canonicalize(b);
  return a == b;
}

std::string unique_net_id(const Design& d, const std::string& base) {
  std::unordered_set<std::string_view> taken(d.nets.begin(), d.nets.end());
  if (!taken.contains(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken.contains(candidate)) return candidate;
  }
}

std::string unique_cell_id(const Design& d, const std::string& base) {
  std::unordered_set<std::string_view> taken;
  for (const auto& c : d.cells) taken.insert(c.id);
  if (!taken.contains(base)) return base;
  for (int i = 1;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!taken.contains(candidate)) return candidate;
  }
}

Netlist::Netlist(const Design& d) {
  nets_.reserve(d.nets.size());
  for (const auto& id : d.nets) {
    if (net_index_.contains(id)) continue;
    net_index_.emplace(id, static_cast<int>(nets_.size()));
    NetInfo info;
    info.id = id;
    nets_.push_back(std::move(info));
  }
  for (const auto& id : d.inputs) {
    if (auto i = net_index(id); i >= 0) nets_[static_cast<std::size_t>(i)].primary_input = true;
  }
  for (const auto& id : d.outputs) {
    if (auto i = net_index(id); i >= 0) {
      nets_[static_cast<std::size_t>(i)].primary_output = true;
      nets_[static_cast<std::size_t>(i)].sinks.push_back({-1, id});
    }
  }
  if (auto i = net_index(d.mte_net); i >= 0) nets_[static_cast<std::size_t>(i)].mte_tree = true;

  const auto n = d.cells.size();
  kinds_.assign(n, nullptr);
  outputs_.assign(n, -1);
  inputs_.assign(n, {});
  for (std::size_t ci = 0; ci < n; ++ci) {
    const Cell& c = d.cells[ci];
    cell_index_.emplace(c.id, static_cast<int>(ci));
    const CellKind* k = d.library.find(c.kind);
    kinds_[ci] = k;
    if (k == nullptr) continue;
    inputs_[ci].assign(k->inputs.size(), -1);
    for (std::size_t p = 0; p < k->inputs.size(); ++p) {
      auto it = c.pins.find(k->inputs[p]);
      if (it == c.pins.end()) continue;
      const int ni = net_index(it->second);
      if (ni < 0) continue;
      inputs_[ci][p] = ni;
      nets_[static_cast<std::size_t>(ni)].sinks.push_back({static_cast<int>(ci), k->inputs[p]});
    }
    if (c.variant == Vth::MtBuiltIn) {
      if (auto it = c.pins.find(std::string(kBuiltInMtePin)); it != c.pins.end()) {
        if (const int ni = net_index(it->second); ni >= 0) {
          nets_[static_cast<std::size_t>(ni)].sinks.push_back(
              {static_cast<int>(ci), std::string(kBuiltInMtePin)});
        }
      }
    }
    if (!k->output.empty()) {
      auto it = c.pins.find(k->output);
      if (it == c.pins.end()) continue;
      const int ni = net_index(it->second);
      if (ni < 0) continue;
      outputs_[ci] = ni;
      auto& net = nets_[static_cast<std::size_t>(ni)];
      net.driver_count++;
      if (net.driver < 0) net.driver = static_cast<int>(ci);
      if (k->function == Function::MteBuf) net.mte_tree = true;
    }
  }
}

int Netlist::net_index(std::string_view id) const {
  auto it = net_index_.find(std::string(id));
  return it == net_index_.end() ? -1 : it->second;
}

int Netlist::cell_index(std::string_view id) const {
  auto it = cell_index_.find(std::string(id));
  return it == cell_index_.end() ? -1 : it->second;
}

}  // namespace smt
