#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into the timing engine or the flow; the oracles recompute everything
// from the Design value directly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "smt/default_library.hpp"
#include "smt/design.hpp"
#include "smt/timing.hpp"

namespace smt::test {

/// Builds a design cell by cell; nets are collected from pins and ports.
class Builder {
 public:
  Builder() {
    d_.library = default_library();
    d_.die = {{0, 0}, {to_nm(1000.0), to_nm(1000.0)}};
    d_.mte_net = "mte";
    inputs_.insert("mte");
  }

  Builder& pi(const std::string& n) {
    inputs_.insert(n);
    return *this;
  }
  Builder& po(const std::string& n) {
    outputs_.insert(n);
    return *this;
  }
  Builder& cell(const std::string& id, const std::string& kind, Vth v, double x_um, double y_um,
                std::map<std::string, std::string> pins) {
    Cell c;
    c.id = id;
    c.kind = kind;
    c.variant = v;
    c.pos = {to_nm(x_um), to_nm(y_um)};
    c.pins = std::move(pins);
    d_.cells.push_back(std::move(c));
    return *this;
  }
  Builder& stage(FlowStage s) {
    d_.stage = s;
    return *this;
  }
  Builder& t_clk(double t) {
    d_.constraints.t_clk = t;
    return *this;
  }
  Constraints& constraints() { return d_.constraints; }
  Library& library() { return d_.library; }

  Design build() const {
    Design d = d_;
    std::set<std::string> nets(inputs_.begin(), inputs_.end());
    nets.insert(outputs_.begin(), outputs_.end());
    for (const auto& c : d.cells) {
      for (const auto& [pin, net] : c.pins) nets.insert(net);
    }
    d.nets.assign(nets.begin(), nets.end());
    d.inputs.assign(inputs_.begin(), inputs_.end());
    d.outputs.assign(outputs_.begin(), outputs_.end());
    canonicalize(d);
    return d;
  }

 private:
  Design d_;
  std::set<std::string> inputs_;
  std::set<std::string> outputs_;
};

/// Library whose delays are load independent: d0 only, r_drive = 0.
inline Library ideal_library(double inv_d0 = 60.0, double buf_d0 = 50.0) {
  Library lib = default_library();
  for (auto& k : lib.kinds) {
    if (k.function == Function::Inv) {
      k.lvt.d0 = inv_d0;
      k.hvt.d0 = inv_d0 * 1.4;
    } else if (k.function == Function::Buf) {
      k.lvt.d0 = buf_d0;
      k.hvt.d0 = buf_d0 * 1.4;
    }
    k.lvt.r_drive = 0.0;
    k.hvt.r_drive = 0.0;
  }
  return lib;
}

/// Parasitics with zero wire on every net of `d`.
inline ParasiticsMap zero_wires(const Design& d) {
  ParasiticsMap m;
  for (const auto& n : d.nets) m[n] = NetParasitics{};
  return m;
}

struct RandomDagOptions {
  int n_cells = 8;
  double dff_rate = 0.0;
  double die_um = 100.0;
  int max_inputs = 3;
};

/// Random acyclic design. Cells read primary inputs, flip-flop outputs or
/// earlier cells; unread outputs become primary outputs.
inline Design random_dag(std::uint64_t seed, const RandomDagOptions& o) {
  std::mt19937_64 rng(seed);
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  static const char* kComb[] = {"INV", "BUF", "NAND2", "NOR2", "AND2"};

  Builder b;
  std::vector<std::string> sources;
  const int n_pi = 1 + static_cast<int>(below(static_cast<std::size_t>(o.max_inputs)));
  for (int i = 0; i < n_pi; ++i) sources.push_back("pi" + std::to_string(i));
  std::map<std::string, int> reads;
  for (int i = 0; i < o.n_cells; ++i) {
    const bool dff = unit() < o.dff_rate;
    const std::string kind = dff ? "DFF" : kComb[below(5)];
    const std::string id = "c" + std::to_string(i);
    const std::string out = "n" + std::to_string(i);
    std::map<std::string, std::string> pins;
    const bool two = kind == "NAND2" || kind == "NOR2" || kind == "AND2";
    const std::string a = sources[below(sources.size())];
    if (dff) {
      pins["D"] = a;
      pins["Q"] = out;
    } else {
      pins["A"] = a;
      if (two) pins["B"] = sources[below(sources.size())];
      pins["Y"] = out;
    }
    for (const auto& [pin, net] : pins) {
      if (net != out) ++reads[net];
    }
    b.cell(id, kind, Vth::LowVth, unit() * o.die_um, unit() * o.die_um, pins);
    sources.push_back(out);
  }
  for (int i = 0; i < n_pi; ++i) {
    const std::string n = "pi" + std::to_string(i);
    if (reads[n] > 0) b.pi(n);
  }
  for (int i = 0; i < o.n_cells; ++i) {
    const std::string n = "n" + std::to_string(i);
    if (reads[n] == 0) b.po(n);
  }
  Design d = b.build();
  d.stage = FlowStage::AllLow;
  return d;
}

// -- independent timing oracle ------------------------------------------------

inline const CellKind& kind_of(const Design& d, const Cell& c) { return *d.library.find(c.kind); }

inline std::string output_net(const Design& d, const Cell& c) {
  const CellKind& k = kind_of(d, c);
  return k.output.empty() ? std::string() : c.pins.at(k.output);
}

/// Pin capacitance hanging on `net`, as the delay model defines it.
inline double pin_load(const Design& d, const std::string& net, const std::map<std::string, Vth>& variants) {
  const CellKind* holder = d.library.find_function(Function::Holder);
  double c = 0.0;
  for (const auto& cell : d.cells) {
    const CellKind& k = kind_of(d, cell);
    const Vth v = variants.at(cell.id);
    for (const auto& [pin, n] : cell.pins) {
      if (n != net) continue;
      if (k.function == Function::Holder && pin == k.inputs[0]) c += k.hvt.c_in;
      if (is_logic(k.function) && pin != k.output && pin != kBuiltInMtePin) c += k.params(v).c_in;
    }
    if (v == Vth::MtBuiltIn && output_net(d, cell) == net && holder != nullptr) c += holder->hvt.c_in;
  }
  return c;
}

/// Oracle cell delays: the closed-form model evaluated from scratch.
inline std::map<std::string, std::int64_t> oracle_delays(const Design& d, const ParasiticsMap& par,
                                                          const BounceMap& bounce,
                                                          const std::map<std::string, Vth>& variants) {
  std::map<std::string, std::int64_t> out;
  for (const auto& cell : d.cells) {
    const CellKind& k = kind_of(d, cell);
    if (!is_combinational(k.function)) continue;
    const Vth v = variants.at(cell.id);
    const Characterization& p = k.params(v);
    const std::string net = output_net(d, cell);
    const NetParasitics& w = par.at(net);
    const double cp = pin_load(d, net, variants);
    double m = 1.0;
    if (v == Vth::MtNoVgnd || v == Vth::MtWithVgnd || v == Vth::MtBuiltIn) {
      auto it = bounce.find(cell.id);
      const double vb = it == bounce.end() ? 0.0 : it->second;
      m = 1.0 + d.constraints.k_bounce * vb / d.constraints.v_dd;
    }
    const double ps = (p.d0 + p.r_drive * (w.c_net + cp) + w.r_net / 1000.0 * cp) * m;
    out[cell.id] = static_cast<std::int64_t>(std::floor(ps + 0.5));
  }
  return out;
}

inline std::map<std::string, Vth> variants_of(const Design& d) {
  std::map<std::string, Vth> v;
  for (const auto& c : d.cells) v[c.id] = c.variant;
  return v;
}

struct PathBounds {
  std::int64_t max = 0;
  std::int64_t min = 0;
};

/// Enumerates every start-to-endpoint path explicitly (no memoization) and
/// returns the extreme path delays per endpoint net.
inline std::map<std::string, PathBounds> enumerate_paths(const Design& d,
                                                         const std::map<std::string, std::int64_t>& delay) {
  std::map<std::string, const Cell*> driver;
  for (const auto& c : d.cells) {
    const std::string out = output_net(d, c);
    if (!out.empty()) driver[out] = &c;
  }
  std::vector<std::int64_t> sums;
  std::function<void(const std::string&, std::int64_t)> walk = [&](const std::string& net, std::int64_t acc) {
    auto it = driver.find(net);
    if (it == driver.end() || !is_combinational(kind_of(d, *it->second).function)) {
      sums.push_back(acc);  // reached a primary input or a flip-flop output
      return;
    }
    const Cell& c = *it->second;
    const CellKind& k = kind_of(d, c);
    for (const auto& in : k.inputs) walk(c.pins.at(in), acc + delay.at(c.id));
  };
  std::set<std::string> endpoints(d.outputs.begin(), d.outputs.end());
  for (const auto& c : d.cells) {
    if (kind_of(d, c).function == Function::Dff) endpoints.insert(c.pins.at("D"));
  }
  std::map<std::string, PathBounds> out;
  for (const auto& ep : endpoints) {
    sums.clear();
    walk(ep, 0);
    out[ep] = {*std::max_element(sums.begin(), sums.end()), *std::min_element(sums.begin(), sums.end())};
  }
  return out;
}

/// Worst setup slack by path enumeration.
inline std::int64_t oracle_worst_slack(const Design& d, const ParasiticsMap& par, const BounceMap& bounce,
                                       const std::map<std::string, Vth>& variants) {
  const auto paths = enumerate_paths(d, oracle_delays(d, par, bounce, variants));
  std::int64_t worst = kUnconstrained;
  const auto t_clk = static_cast<std::int64_t>(std::floor(d.constraints.t_clk + 0.5));
  for (const auto& [ep, b] : paths) worst = std::min(worst, t_clk - b.max);
  return worst;
}

/// Standby leakage summed from the final netlist alone.
inline double oracle_leakage(const Design& d) {
  double total = 0.0;
  const CellKind* holder = d.library.find_function(Function::Holder);
  for (const auto& c : d.cells) {
    const CellKind& k = kind_of(d, c);
    if (k.function == Function::Switch) {
      total += d.constraints.l_sw * c.width;
    } else if (c.variant == Vth::MtBuiltIn) {
      total += d.constraints.l_sw * c.width + holder->hvt.leak;
    } else if (c.variant == Vth::MtWithVgnd || c.variant == Vth::MtNoVgnd) {
      // cut off by the shared switch in standby
    } else {
      total += k.params(c.variant).leak;
    }
  }
  return total;
}

inline double oracle_area(const Design& d) {
  double total = 0.0;
  const CellKind* holder = d.library.find_function(Function::Holder);
  for (const auto& c : d.cells) {
    const CellKind& k = kind_of(d, c);
    if (k.function == Function::Switch) {
      total += d.constraints.a_sw * c.width;
    } else if (c.variant == Vth::MtBuiltIn) {
      total += k.lvt.area + d.constraints.a_sw * c.width + holder->hvt.area;
    } else {
      total += k.params(c.variant).area;
    }
  }
  return total;
}

}  // namespace smt::test
