#include "smt/interconnect.hpp"

#include <algorithm>
#include <unordered_set>

#include "smt/errors.hpp"

namespace smt {

namespace {

std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x00000000FFFFFFFFull;
  v = (v | (v << 16)) & 0x0000FFFF0000FFFFull;
  v = (v | (v << 8)) & 0x00FF00FF00FF00FFull;
  v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0Full;
  v = (v | (v << 2)) & 0x3333333333333333ull;
  v = (v | (v << 1)) & 0x5555555555555555ull;
  return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t clamp_offset(std::int64_t v) {
  if (v < 0) return 0;
  return std::min<std::uint64_t>(static_cast<std::uint64_t>(v), 0xFFFFFFFFull);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t morton_code(Point p, const Box& die) {
  const std::uint64_t x = clamp_offset(p.x - die.lo.x);
  const std::uint64_t y = clamp_offset(p.y - die.lo.y);
  return spread_bits(x) | (spread_bits(y) << 1);
}

std::int64_t hpwl(const std::vector<Point>& pins) {
  if (pins.size() < 2) return 0;
  auto [xmin, xmax] = std::minmax_element(pins.begin(), pins.end(),
                                          [](const Point& a, const Point& b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(pins.begin(), pins.end(),
                                          [](const Point& a, const Point& b) { return a.y < b.y; });
  return (xmax->x - xmin->x) + (ymax->y - ymin->y);
}

std::vector<Point> net_pin_positions(const Design& d, const Netlist& nl, int net) {
  const NetInfo& info = nl.net(net);
  std::vector<Point> pins;
  pins.reserve(info.sinks.size() + 1);
  if (info.driver >= 0) pins.push_back(d.cells[static_cast<std::size_t>(info.driver)].pos);
  for (const auto& s : info.sinks) {
    if (s.cell >= 0) pins.push_back(d.cells[static_cast<std::size_t>(s.cell)].pos);
  }
  return pins;
}

NetParasitics estimate_rc_preroute(const std::vector<Point>& pins, const Constraints& c) {
  const double length = to_um(hpwl(pins));
  return {c.r_wire * length, c.c_wire * length, length, RouteStage::PreRoute};
}

double detour_factor(std::string_view key, std::uint64_t seed, double max_detour) {
  const std::uint64_t mixed = splitmix64(seed ^ splitmix64(fnv1a64(key)));
  const double u = static_cast<double>(mixed >> 11) * 0x1.0p-53;
  return 1.0 + max_detour * u;
}

NetParasitics extract_rc_postroute(const std::vector<Point>& pins, std::string_view net_id,
                                   const Constraints& c, std::uint64_t seed, double max_detour) {
  const double length = to_um(hpwl(pins)) * detour_factor(net_id, seed, max_detour);
  return {c.r_wire * length, c.c_wire * length, length, RouteStage::PostRoute};
}

ParasiticsMap estimate_all_preroute(const Design& d) {
  const Netlist nl(d);
  ParasiticsMap out;
  for (int i = 0; i < static_cast<int>(nl.nets().size()); ++i) {
    out.emplace(nl.net(i).id, estimate_rc_preroute(net_pin_positions(d, nl, i), d.constraints));
  }
  return out;
}

ParasiticsMap extract_all_postroute(const Design& d, std::uint64_t seed, double max_detour) {
  const Netlist nl(d);
  ParasiticsMap out;
  for (int i = 0; i < static_cast<int>(nl.nets().size()); ++i) {
    out.emplace(nl.net(i).id, extract_rc_postroute(net_pin_positions(d, nl, i), nl.net(i).id,
                                                   d.constraints, seed, max_detour));
  }
  return out;
}

Design buffer_mte(Design d) {
  const int fanout = d.constraints.mte_max_fanout;
  if (fanout < 2) throw Error(ErrorKind::Contract, "mte_max_fanout must be at least 2");

  // Strip the previous tree: every pin on a buffer-driven net goes back to the root.
  std::unordered_set<std::string> buffer_nets;
  std::vector<Cell> kept;
  for (auto& c : d.cells) {
    if (d.kind_of(c).function == Function::MteBuf) {
      buffer_nets.insert(c.pins.at(d.kind_of(c).output));
    } else {
      kept.push_back(std::move(c));
    }
  }
  d.cells = std::move(kept);
  std::erase_if(d.nets, [&](const std::string& n) { return buffer_nets.contains(n); });
  for (auto& c : d.cells) {
    for (auto& [pin, net] : c.pins) {
      if (buffer_nets.contains(net)) net = d.mte_net;
    }
  }

  struct Node {
    std::size_t cell;
    std::string pin;
  };
  std::vector<Node> level;
  for (std::size_t i = 0; i < d.cells.size(); ++i) {
    const Cell& c = d.cells[i];
    const CellKind& k = d.kind_of(c);
    if (k.function == Function::Holder) level.push_back({i, k.inputs[1]});
    else if (k.function == Function::Switch) level.push_back({i, k.inputs[0]});
    else if (c.variant == Vth::MtBuiltIn) level.push_back({i, std::string(kBuiltInMtePin)});
  }
  if (!level.empty() && d.mte_net.empty()) {
    throw Error(ErrorKind::Contract, "design has MT enable pins but declares no MTE port");
  }
  for (const auto& n : level) d.cells[n.cell].pins[n.pin] = d.mte_net;
  if (static_cast<int>(level.size()) <= fanout) return d;

  const CellKind* buf_kind = d.library.find_function(Function::MteBuf);
  if (buf_kind == nullptr) throw Error(ErrorKind::Characterization, "library has no MTEBUF kind");

  for (int depth = 0; static_cast<int>(level.size()) > fanout; ++depth) {
    std::sort(level.begin(), level.end(), [&](const Node& a, const Node& b) {
      const Cell& ca = d.cells[a.cell];
      const Cell& cb = d.cells[b.cell];
      const auto ma = morton_code(ca.pos, d.die);
      const auto mb = morton_code(cb.pos, d.die);
      if (ma != mb) return ma < mb;
      return ca.id < cb.id;
    });
    const std::size_t n = level.size();
    const std::size_t groups = (n + static_cast<std::size_t>(fanout) - 1) / static_cast<std::size_t>(fanout);
    std::vector<Node> next;
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t begin = g * n / groups;
      const std::size_t end = (g + 1) * n / groups;
      std::vector<Point> pts;
      for (std::size_t i = begin; i < end; ++i) pts.push_back(d.cells[level[i].cell].pos);

      const std::string suffix = std::to_string(depth) + "_" + std::to_string(g);
      const std::string net = unique_net_id(d, "mte_l" + suffix);
      d.nets.push_back(net);
      Cell buf;
      buf.id = unique_cell_id(d, "mtebuf_l" + suffix);
      buf.kind = buf_kind->name;
      buf.variant = Vth::HighVth;
      buf.pos = centroid(pts);
      buf.pins[buf_kind->inputs[0]] = d.mte_net;
      buf.pins[buf_kind->output] = net;
      for (std::size_t i = begin; i < end; ++i) d.cells[level[i].cell].pins[level[i].pin] = net;
      d.cells.push_back(std::move(buf));
      next.push_back({d.cells.size() - 1, buf_kind->inputs[0]});
    }
    level = std::move(next);
  }
  return d;
}

}  // namespace smt
