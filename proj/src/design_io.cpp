#include "smt/design_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "smt/errors.hpp"
#include "smt/validate.hpp"

namespace smt {

using nlohmann::json;

namespace {

std::string location(std::string_view text, std::size_t byte) {
  // nlohmann reports the 1-based offset of the last character read.
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Syntax, "design file: " + where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number()) schema_error(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) schema_error(where, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) schema_error(where, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) schema_error(where, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) schema_error(where, "unknown field '" + it.key() + "'");
  }
}

json characterization_to_json(const Characterization& c) {
  return json{{"area", c.area}, {"leak", c.leak},     {"d0", c.d0},
              {"r_drive", c.r_drive}, {"c_in", c.c_in}, {"i_peak", c.i_peak}};
}

Characterization characterization_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"area", "leak", "d0", "r_drive", "c_in", "i_peak"}, where);
  Characterization c;
  c.area = number(j, "area", where);
  c.leak = number(j, "leak", where);
  c.d0 = number(j, "d0", where);
  c.r_drive = number(j, "r_drive", where);
  c.c_in = number(j, "c_in", where);
  c.i_peak = number(j, "i_peak", where);
  return c;
}

Design design_from_json(const json& root) {
  const std::string top = "top level";
  if (!root.is_object()) schema_error(top, "expected an object");
  reject_unknown(root, {"format", "flow_stage", "die", "constraints", "library", "ports", "nets", "cells"}, top);

  Design d;
  const json& fmt = member(root, "format", top);
  if (!fmt.is_number_integer() || fmt.get<int>() != 1) schema_error(top, "unsupported format (expected 1)");
  d.format = 1;

  const auto stage_name = string_field(root, "flow_stage", top);
  auto stage = parse_flow_stage(stage_name);
  if (!stage) schema_error(top, "unknown flow_stage '" + stage_name + "'");
  d.stage = *stage;

  const json& die = member(root, "die", top);
  reject_unknown(die, {"x0", "y0", "x1", "y1"}, "die");
  d.die.lo = {to_nm(number(die, "x0", "die")), to_nm(number(die, "y0", "die"))};
  d.die.hi = {to_nm(number(die, "x1", "die")), to_nm(number(die, "y1", "die"))};

  apply_constraints_json(d.constraints, member(root, "constraints", top));

  const json& lib = member(root, "library", top);
  if (!lib.is_array()) schema_error("library", "expected an array of cell kinds");
  for (const auto& jk : lib) {
    const std::string where = "library kind";
    reject_unknown(jk, {"name", "function", "inputs", "output", "hvt", "lvt"}, where);
    CellKind k;
    k.name = string_field(jk, "name", where);
    const std::string fn = string_field(jk, "function", "library kind '" + k.name + "'");
    auto f = parse_function(fn);
    if (!f) schema_error("library kind '" + k.name + "'", "unknown function '" + fn + "'");
    k.function = *f;
    k.inputs = string_list(member(jk, "inputs", where), "library kind '" + k.name + "' inputs");
    k.output = string_field(jk, "output", where);
    k.hvt = characterization_from_json(member(jk, "hvt", where), "library kind '" + k.name + "' hvt");
    k.lvt = characterization_from_json(member(jk, "lvt", where), "library kind '" + k.name + "' lvt");
    d.library.kinds.push_back(std::move(k));
  }

  const json& ports = member(root, "ports", top);
  reject_unknown(ports, {"inputs", "outputs", "mte"}, "ports");
  d.inputs = string_list(member(ports, "inputs", "ports"), "ports.inputs");
  d.outputs = string_list(member(ports, "outputs", "ports"), "ports.outputs");
  if (ports.contains("mte")) d.mte_net = string_field(ports, "mte", "ports");

  d.nets = string_list(member(root, "nets", top), "nets");

  const json& cells = member(root, "cells", top);
  if (!cells.is_array()) schema_error("cells", "expected an array");
  for (const auto& jc : cells) {
    const std::string where = "cell";
    reject_unknown(jc, {"id", "kind", "variant", "x", "y", "pins", "width", "vgnd"}, where);
    Cell c;
    c.id = string_field(jc, "id", where);
    const std::string cw = "cell '" + c.id + "'";
    c.kind = string_field(jc, "kind", cw);
    const std::string vn = string_field(jc, "variant", cw);
    auto v = parse_vth(vn);
    if (!v) schema_error(cw, "unknown variant '" + vn + "'");
    c.variant = *v;
    c.pos = {to_nm(number(jc, "x", cw)), to_nm(number(jc, "y", cw))};
    const json& pins = member(jc, "pins", cw);
    if (!pins.is_object()) schema_error(cw, "pins must be an object");
    for (auto it = pins.begin(); it != pins.end(); ++it) {
      if (!it->is_string()) schema_error(cw, "pin '" + it.key() + "' must name a net");
      c.pins.emplace(it.key(), it->get<std::string>());
    }
    if (jc.contains("width")) c.width = number(jc, "width", cw);
    if (jc.contains("vgnd")) c.vgnd = string_field(jc, "vgnd", cw);
    d.cells.push_back(std::move(c));
  }
  return d;
}

json design_to_json(Design d) {
  canonicalize(d);
  json root;
  root["format"] = d.format;
  root["flow_stage"] = std::string(to_string(d.stage));
  root["die"] = json{{"x0", to_um(d.die.lo.x)}, {"y0", to_um(d.die.lo.y)},
                     {"x1", to_um(d.die.hi.x)}, {"y1", to_um(d.die.hi.y)}};
  root["constraints"] = constraints_to_json(d.constraints);
  json lib = json::array();
  for (const auto& k : d.library.kinds) {
    lib.push_back(json{{"name", k.name},
                       {"function", std::string(to_string(k.function))},
                       {"inputs", k.inputs},
                       {"output", k.output},
                       {"hvt", characterization_to_json(k.hvt)},
                       {"lvt", characterization_to_json(k.lvt)}});
  }
  root["library"] = std::move(lib);
  root["ports"] = json{{"inputs", d.inputs}, {"outputs", d.outputs}};
  if (!d.mte_net.empty()) root["ports"]["mte"] = d.mte_net;
  root["nets"] = d.nets;
  json cells = json::array();
  for (const auto& c : d.cells) {
    json jc{{"id", c.id},
            {"kind", c.kind},
            {"variant", std::string(to_string(c.variant))},
            {"x", to_um(c.pos.x)},
            {"y", to_um(c.pos.y)},
            {"pins", c.pins}};
    if (c.width != 0.0) jc["width"] = c.width;
    if (!c.vgnd.empty()) jc["vgnd"] = c.vgnd;
    cells.push_back(std::move(jc));
  }
  root["cells"] = std::move(cells);
  return root;
}

}  // namespace

json constraints_to_json(const Constraints& c) {
  return json{{"t_clk", c.t_clk},
              {"hold_min", c.hold_min},
              {"v_dd", c.v_dd},
              {"v_bounce_max", c.v_bounce_max},
              {"l_vgnd_max", c.l_vgnd_max},
              {"n_cells_max", c.n_cells_max},
              {"alpha", c.alpha},
              {"k_bounce", c.k_bounce},
              {"r0_switch", c.r0_switch},
              {"l_sw", c.l_sw},
              {"a_sw", c.a_sw},
              {"w_min", c.w_min},
              {"r_wire", c.r_wire},
              {"c_wire", c.c_wire},
              {"mte_max_fanout", c.mte_max_fanout},
              {"seed", c.seed}};
}

void apply_constraints_json(Constraints& c, const json& j) {
  const std::string where = "constraints";
  if (!j.is_object()) schema_error(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& v = *it;
    auto real = [&](double& field) {
      if (!v.is_number()) schema_error(where, "field '" + key + "' must be a number");
      field = v.get<double>();
    };
    auto integer = [&](int& field) {
      if (!v.is_number_integer()) schema_error(where, "field '" + key + "' must be an integer");
      field = v.get<int>();
    };
    if (key == "t_clk") real(c.t_clk);
    else if (key == "hold_min") real(c.hold_min);
    else if (key == "v_dd") real(c.v_dd);
    else if (key == "v_bounce_max") real(c.v_bounce_max);
    else if (key == "l_vgnd_max") real(c.l_vgnd_max);
    else if (key == "n_cells_max") integer(c.n_cells_max);
    else if (key == "alpha") real(c.alpha);
    else if (key == "k_bounce") real(c.k_bounce);
    else if (key == "r0_switch") real(c.r0_switch);
    else if (key == "l_sw") real(c.l_sw);
    else if (key == "a_sw") real(c.a_sw);
    else if (key == "w_min") real(c.w_min);
    else if (key == "r_wire") real(c.r_wire);
    else if (key == "c_wire") real(c.c_wire);
    else if (key == "mte_max_fanout") integer(c.mte_max_fanout);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) schema_error(where, "field 'seed' must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else {
      schema_error(where, "unknown field '" + key + "'");
    }
  }
}

Design parse_design(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax,
                "design file: syntax error at " + location(text, e.byte) + ": " + e.what());
  }
  Design d = design_from_json(root);

  const auto diags = validate(d);
  for (const auto& diag : diags) {
    if (diag.rule == "duplicate-id") {
      throw Error(ErrorKind::Duplicate, "design file: duplicate id '" + diag.entity + "'");
    }
  }
  for (const auto& diag : diags) {
    if (diag.rule == "unresolved-reference") {
      throw Error(ErrorKind::Reference,
                  "design file: unresolved reference '" + diag.entity + "': " + diag.message);
    }
  }
  if (!diags.empty()) {
    throw Error(ErrorKind::Validation, "design file: invalid design\n" + format_diagnostics(diags));
  }
  return d;
}

std::string write_design(const Design& d) {
  require_valid(d);
  return design_to_json(d).dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

Design read_design_file(const std::filesystem::path& path) {
  return parse_design(read_text_file(path));
}

}  // namespace smt
