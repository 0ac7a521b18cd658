#include "smt/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "smt/default_library.hpp"
#include "smt/errors.hpp"
#include "smt/flow.hpp"
#include "smt/interconnect.hpp"
#include "smt/timing.hpp"

namespace smt {

namespace {

// Range reductions on the raw engine output so that sequences do not depend
// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::size_t>(wide >> 64);
  }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct Slot {
  std::string net;
  int layer;
  int row;
};

}  // namespace

Design generate_benchmark(const BenchParams& p) {
  if (p.n_cells < 1) throw Error(ErrorKind::Validation, "benchmark needs at least one cell");
  if (p.n_layers < 1) throw Error(ErrorKind::Validation, "benchmark needs at least one layer");
  if (!(p.tightness > 0.0 && p.tightness <= 1.0)) {
    throw Error(ErrorKind::Validation, "tightness must lie in (0, 1]");
  }
  if (!(p.column_pitch > 0.0) || !(p.row_pitch > 0.0)) {
    throw Error(ErrorKind::Validation, "placement pitches must be positive");
  }

  Rng rng(p.seed);
  Design d;
  d.library = default_library();
  d.constraints.seed = p.seed;
  d.mte_net = "mte";

  const int layers = std::min(p.n_layers, p.n_cells);
  std::vector<int> per_layer(static_cast<std::size_t>(layers), p.n_cells / layers);
  for (int i = 0; i < p.n_cells % layers; ++i) ++per_layer[static_cast<std::size_t>(i)];

  // One primary input per first-layer row plus one; unused ones are dropped below.
  std::vector<Slot> pis;
  for (int r = 0; r < per_layer[0] + 1; ++r) pis.push_back({"pi" + std::to_string(r), -1, r});

  std::vector<std::vector<Slot>> outs(static_cast<std::size_t>(layers));
  std::map<std::string, int> fanout;
  const std::int64_t dx = to_nm(p.column_pitch);
  const std::int64_t dy = to_nm(p.row_pitch);
  int serial = 0;

  // Row r of a layer reads rows r and r+1 of the previous one, so every net
  // has about the same fanout; a small share of inputs is re-drawn from a
  // wider window or from any earlier layer to vary the path depths.
  auto pick_source = [&](int layer, int row, int offset) -> const Slot& {
    const std::vector<Slot>& prev = layer == 0 ? pis : outs[static_cast<std::size_t>(layer - 1)];
    const int n = static_cast<int>(prev.size());
    if (layer > 0 && rng.unit() < p.long_hop_rate) {
      if (rng.unit() < 0.3) return pis[rng.below(pis.size())];
      const auto& src = outs[rng.below(static_cast<std::size_t>(layer))];
      return src[rng.below(src.size())];
    }
    int r = row + offset;
    if (rng.unit() < p.jitter) r += static_cast<int>(rng.below(7)) - 3;
    return prev[static_cast<std::size_t>(std::clamp(r, 0, n - 1))];
  };

  static constexpr const char* kKinds[] = {"INV", "NAND2", "NOR2", "AND2"};
  for (int layer = 0; layer < layers; ++layer) {
    const char* layer_kind = kKinds[rng.below(4)];
    for (int row = 0; row < per_layer[static_cast<std::size_t>(layer)]; ++row) {
      Cell c;
      c.id = "u" + std::to_string(serial);
      c.variant = Vth::LowVth;
      c.pos = {dx * layer, dy * row};
      const std::string out = "n" + std::to_string(serial);
      ++serial;

      std::string kind = rng.unit() < p.jitter ? kKinds[rng.below(4)] : layer_kind;
      if (p.n_cells == 1) kind = "INV";
      const std::string a = pick_source(layer, row, 0).net;
      std::string b;
      if (kind != "INV") {
        b = pick_source(layer, row, 1).net;
        if (b == a) b = pick_source(layer, row, -1).net;
        if (b == a) kind = "INV";
      }
      c.kind = kind;
      c.pins["A"] = a;
      ++fanout[a];
      if (kind != "INV") {
        c.pins["B"] = b;
        ++fanout[b];
      }
      c.pins["Y"] = out;
      d.nets.push_back(out);
      outs[static_cast<std::size_t>(layer)].push_back({out, layer, row});
      d.cells.push_back(std::move(c));
    }
  }

  for (const auto& pi : pis) {
    if (fanout[pi.net] == 0) continue;
    d.inputs.push_back(pi.net);
    d.nets.push_back(pi.net);
  }
  d.inputs.push_back(d.mte_net);
  d.nets.push_back(d.mte_net);
  for (const auto& layer : outs) {
    for (const auto& s : layer) {
      if (fanout[s.net] == 0) d.outputs.push_back(s.net);
    }
  }

  int max_row = 0;
  for (int n : per_layer) max_row = std::max(max_row, n - 1);
  d.die = {{0, 0}, {dx * layers, dy * (max_row + 1)}};

  const DelayCorner corner = signoff_corner(Mode::ImprovedSmt, d.constraints);
  const auto ta = run_sta(d, estimate_all_preroute(d), {}, corner);
  std::int64_t critical = 0;
  for (const auto& ep : ta.endpoints) critical = std::max(critical, ep.arrival_max);
  d.constraints.t_clk = std::ceil(static_cast<double>(critical) / p.tightness);
  canonicalize(d);
  return d;
}

}  // namespace smt
