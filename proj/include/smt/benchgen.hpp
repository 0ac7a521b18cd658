#pragma once

// Seeded random benchmark circuits: a layered DAG of INV/NAND2/NOR2/AND2
// cells placed column-per-layer on a grid, with the clock period derived from
// the all-low-Vth critical delay.

#include <cstdint>

#include "smt/design.hpp"

namespace smt {

struct BenchParams {
  int n_cells = 100;
  int n_layers = 10;
  std::uint64_t seed = 1;
  double tightness = 0.9;  // (0, 1]; t_clk = critical delay / tightness
  double column_pitch = 8.0;  // um between layers
  double row_pitch = 2.0;     // um between cells of one layer
  double long_hop_rate = 0.02;  // share of inputs taken from any earlier layer or port
  double jitter = 0.1;  // share of cells with a random kind, and of inputs from a wider window
};

/// Throws Error(Validation) for out-of-range parameters. The critical delay
/// is measured on the all-low-Vth design with pre-route wires under the
/// improved-flow signoff corner, so tightness 1.0 leaves exactly zero slack
/// there.
Design generate_benchmark(const BenchParams& p);

}  // namespace smt
