#include "smt/report.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "smt/design_io.hpp"
#include "smt/errors.hpp"
#include "smt/interconnect.hpp"

namespace smt {

using nlohmann::json;

namespace {

std::optional<std::int64_t> slack_or_none(std::int64_t s) {
  if (s == kUnconstrained) return std::nullopt;
  return s;
}

json optional_json(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json counts_to_json(const ComponentCounts& c) {
  return json{{"hvt", c.hvt},         {"lvt", c.lvt},           {"mt", c.mt},
              {"holders", c.holders}, {"switches", c.switches}, {"mte_buffers", c.mte_buffers}};
}

ComponentCounts counts_from_json(const json& j) {
  ComponentCounts c;
  c.hvt = j.at("hvt").get<int>();
  c.lvt = j.at("lvt").get<int>();
  c.mt = j.at("mt").get<int>();
  c.holders = j.at("holders").get<int>();
  c.switches = j.at("switches").get<int>();
  c.mte_buffers = j.at("mte_buffers").get<int>();
  return c;
}

Mode mode_from_json(const json& j) {
  const auto m = parse_mode(j.get<std::string>());
  if (!m) throw Error(ErrorKind::Syntax, "unknown mode '" + j.get<std::string>() + "' in report");
  return *m;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string config_hash(const Constraints& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(constraints_to_json(c).dump())));
  return buf;
}

FlowReport make_report(const std::vector<FlowResult>& results, const Constraints& c) {
  FlowReport r;
  r.seed = c.seed;
  r.config_hash = config_hash(c);
  const FlowResult* base = nullptr;
  for (const auto& res : results) {
    if (res.mode == Mode::DualVth) base = &res;
  }
  for (const auto& res : results) {
    ModeReport m;
    m.mode = res.mode;
    m.total_area = res.accounting.total_area;
    m.standby_leakage = res.accounting.standby_leakage;
    m.worst_setup_slack = slack_or_none(res.timing.worst_setup_slack);
    m.worst_hold_slack = slack_or_none(res.timing.worst_hold_slack);
    m.timing_met = res.timing_met;
    m.counts = res.accounting.counts;
    if (base != nullptr) {
      const Accounting& b = base->accounting;
      if (b.total_area > 0) m.area_pct = 100.0 * m.total_area / b.total_area;
      if (b.standby_leakage > 0) m.leakage_pct = 100.0 * m.standby_leakage / b.standby_leakage;
    }
    r.modes.push_back(m);
    if (!res.stage_times.empty()) r.stage_timings.push_back({res.mode, res.stage_times});
  }
  return r;
}

json report_to_json(const FlowReport& r) {
  json modes = json::array();
  for (const auto& m : r.modes) {
    modes.push_back(json{{"mode", std::string(to_string(m.mode))},
                         {"total_area", m.total_area},
                         {"standby_leakage", m.standby_leakage},
                         {"worst_setup_slack", optional_json(m.worst_setup_slack)},
                         {"worst_hold_slack", optional_json(m.worst_hold_slack)},
                         {"timing_met", m.timing_met},
                         {"counts", counts_to_json(m.counts)},
                         {"area_pct", optional_json(m.area_pct)},
                         {"leakage_pct", optional_json(m.leakage_pct)}});
  }
  json out{{"schema", r.schema}, {"seed", r.seed}, {"config_hash", r.config_hash}, {"modes", modes}};
  if (!r.stage_timings.empty()) {
    json timings = json::array();
    for (const auto& t : r.stage_timings) {
      json stages = json::array();
      for (const auto& s : t.stages) stages.push_back(json{{"stage", s.stage}, {"ms", s.ms}});
      timings.push_back(json{{"mode", std::string(to_string(t.mode))}, {"stages", stages}});
    }
    out["stage_timings"] = timings;
  }
  return out;
}

FlowReport report_from_json(const json& j) {
  try {
    FlowReport r;
    r.schema = j.at("schema").get<std::string>();
    if (r.schema != kReportSchema) throw Error(ErrorKind::Syntax, "unsupported report schema '" + r.schema + "'");
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& jm : j.at("modes")) {
      ModeReport m;
      m.mode = mode_from_json(jm.at("mode"));
      m.total_area = jm.at("total_area").get<double>();
      m.standby_leakage = jm.at("standby_leakage").get<double>();
      m.worst_setup_slack = optional_from<std::int64_t>(jm, "worst_setup_slack");
      m.worst_hold_slack = optional_from<std::int64_t>(jm, "worst_hold_slack");
      m.timing_met = jm.at("timing_met").get<bool>();
      m.counts = counts_from_json(jm.at("counts"));
      m.area_pct = optional_from<double>(jm, "area_pct");
      m.leakage_pct = optional_from<double>(jm, "leakage_pct");
      r.modes.push_back(m);
    }
    if (j.contains("stage_timings")) {
      for (const auto& jt : j.at("stage_timings")) {
        StageTimingReport t;
        t.mode = mode_from_json(jt.at("mode"));
        for (const auto& js : jt.at("stages")) {
          t.stages.push_back({js.at("stage").get<std::string>(), js.at("ms").get<double>()});
        }
        r.stage_timings.push_back(std::move(t));
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed report: ") + e.what());
  }
}

std::string write_report_json(const FlowReport& r) { return report_to_json(r).dump(2) + "\n"; }

std::string format_table(const FlowReport& r) {
  std::ostringstream os;
  const bool normalized = std::all_of(r.modes.begin(), r.modes.end(),
                                      [](const ModeReport& m) { return m.area_pct && m.leakage_pct; });
  os << std::left << std::setw(10) << "Mode" << (normalized ? "Area / Leakage" : "Area [um^2] / Leakage [nA]")
     << "\n";
  for (const auto& m : r.modes) {
    os << std::left << std::setw(10) << display_name(m.mode);
    if (normalized) {
      os << fixed2(*m.area_pct) << "% / " << fixed2(*m.leakage_pct) << "%";
    } else {
      os << fixed2(m.total_area) << " / " << fixed2(m.standby_leakage);
    }
    os << "\n";
  }
  return os.str();
}

json cluster_dump(const Design& d, const SwitchStructure& ss) {
  json clusters = json::array();
  for (const auto& cl : ss.clusters) {
    json members = json::array();
    for (const auto& id : cl.members) {
      const Cell* c = d.find_cell(id);
      json m{{"id", id}};
      if (c != nullptr) {
        m["x"] = to_um(c->pos.x);
        m["y"] = to_um(c->pos.y);
      }
      members.push_back(m);
    }
    clusters.push_back(json{{"id", cl.id},
                            {"members", members},
                            {"switch", json{{"x", to_um(cl.switch_pos.x)}, {"y", to_um(cl.switch_pos.y)}}},
                            {"width", cl.width},
                            {"v_bounce", cl.v_bounce},
                            {"i_eff", cl.i_eff},
                            {"vgnd_star_len", cl.vgnd_star_len},
                            {"vgnd_wire_r", cl.vgnd_wire_r},
                            {"detour", cl.detour}});
  }
  return json{{"stage", std::string(to_string(ss.stage))}, {"clusters", clusters}};
}

namespace {

std::int64_t cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

const char* fill_of(Vth v) {
  switch (v) {
    case Vth::HighVth:
      return "#4a78b5";
    case Vth::LowVth:
      return "#d9534f";
    case Vth::MtNoVgnd:
    case Vth::MtWithVgnd:
    case Vth::MtBuiltIn:
      return "#f0ad4e";
  }
  return "#999999";
}

}  // namespace

std::string render_svg(const Design& d, const SwitchStructure& ss) {
  const double scale = 4.0;  // px per um
  const double margin = 10.0;
  auto px = [&](std::int64_t v, std::int64_t lo) { return margin + scale * to_um(v - lo); };
  const double w = 2 * margin + scale * to_um(d.die.hi.x - d.die.lo.x);
  const double h = 2 * margin + scale * to_um(d.die.hi.y - d.die.lo.y);
  // SVG y grows downwards; flip so the die's lower edge is at the bottom.
  auto X = [&](Point p) { return px(p.x, d.die.lo.x); };
  auto Y = [&](Point p) { return h - px(p.y, d.die.lo.y); };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w - 2 * margin << "\" height=\""
     << h - 2 * margin << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (const auto& cl : ss.clusters) {
    std::vector<Point> pts;
    for (const auto& id : cl.members) {
      if (const Cell* c = d.find_cell(id)) pts.push_back(c->pos);
    }
    pts.push_back(cl.switch_pos);
    os << "<polygon class=\"cluster\" data-id=\"" << cl.id << "\" points=\"";
    for (const Point& p : convex_hull(pts)) os << X(p) << "," << Y(p) << " ";
    os << "\" fill=\"#f0ad4e\" fill-opacity=\"0.15\" stroke=\"#c77c0e\"/>\n";
  }

  const Netlist nl(d);
  for (const auto& net : nl.nets()) {
    if (!net.mte_tree && net.id != d.mte_net) continue;
    if (net.driver < 0) continue;  // the root port has no placed driver
    const Point from = d.cells[static_cast<std::size_t>(net.driver)].pos;
    for (const auto& s : net.sinks) {
      if (s.cell < 0) continue;
      const Point to = d.cells[static_cast<std::size_t>(s.cell)].pos;
      os << "<line class=\"mte\" x1=\"" << X(from) << "\" y1=\"" << Y(from) << "\" x2=\"" << X(to)
         << "\" y2=\"" << Y(to) << "\" stroke=\"#5cb85c\" stroke-width=\"0.5\"/>\n";
    }
  }

  for (const auto& c : d.cells) {
    const Function f = d.kind_of(c).function;
    if (f == Function::Switch) {
      os << "<rect class=\"switch\" data-id=\"" << c.id << "\" x=\"" << X(c.pos) - 3 << "\" y=\"" << Y(c.pos) - 3
         << "\" width=\"6\" height=\"6\" fill=\"#222\"/>\n";
    } else if (f == Function::Holder) {
      os << "<circle class=\"holder\" data-id=\"" << c.id << "\" cx=\"" << X(c.pos) << "\" cy=\"" << Y(c.pos)
         << "\" r=\"1.5\" fill=\"none\" stroke=\"#8e44ad\"/>\n";
    } else if (f == Function::MteBuf) {
      os << "<circle class=\"mtebuf\" data-id=\"" << c.id << "\" cx=\"" << X(c.pos) << "\" cy=\"" << Y(c.pos)
         << "\" r=\"2.5\" fill=\"#5cb85c\"/>\n";
    } else {
      os << "<rect class=\"cell\" data-id=\"" << c.id << "\" x=\"" << X(c.pos) - 1.5 << "\" y=\"" << Y(c.pos) - 1.5
         << "\" width=\"3\" height=\"3\" fill=\"" << fill_of(c.variant) << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace smt
