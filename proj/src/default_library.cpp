#include "smt/default_library.hpp"

namespace smt {

namespace {

constexpr double kLeakRatio = 20.0;
constexpr double kDelayRatio = 1.4;
constexpr double kDriveRatio = 2.6;
constexpr double kCurrentRatio = 0.7;

// Builds the high-Vth record from the low-Vth one.
CellKind dual(std::string name, Function f, std::vector<std::string> inputs, std::string output,
              Characterization lvt) {
  Characterization hvt = lvt;
  hvt.leak = lvt.leak / kLeakRatio;
  hvt.d0 = lvt.d0 * kDelayRatio;
  hvt.r_drive = lvt.r_drive * kDriveRatio;
  hvt.i_peak = lvt.i_peak * kCurrentRatio;
  return CellKind{std::move(name), f, std::move(inputs), std::move(output), hvt, lvt};
}

}  // namespace

Library default_library() {
  Library lib;
  //                                                    area  leak   d0  r_drv c_in i_peak
  lib.kinds.push_back(dual("INV", Function::Inv, {"A"}, "Y", {1.0, 20.0, 10.0, 2.0, 1.5, 0.08}));
  lib.kinds.push_back(dual("BUF", Function::Buf, {"A"}, "Y", {1.4, 30.0, 18.0, 1.6, 1.4, 0.10}));
  lib.kinds.push_back(dual("NAND2", Function::Nand2, {"A", "B"}, "Y", {1.4, 28.0, 14.0, 2.4, 1.8, 0.10}));
  lib.kinds.push_back(dual("NOR2", Function::Nor2, {"A", "B"}, "Y", {1.4, 32.0, 17.0, 3.0, 2.0, 0.11}));
  lib.kinds.push_back(dual("AND2", Function::And2, {"A", "B"}, "Y", {1.8, 36.0, 24.0, 2.0, 1.7, 0.12}));
  lib.kinds.push_back(dual("DFF", Function::Dff, {"D"}, "Q", {5.0, 80.0, 60.0, 2.0, 1.6, 0.20}));
  lib.kinds.push_back(dual("MTEBUF", Function::MteBuf, {"A"}, "Y", {1.4, 30.0, 18.0, 1.6, 1.4, 0.10}));

  // Keeper: high-Vth only in practice; both records kept for uniformity.
  const Characterization holder{0.4, 0.05, 0.0, 0.0, 0.6, 0.0};
  lib.kinds.push_back(CellKind{"HOLDER", Function::Holder, {"A", "E"}, "", holder, holder});

  // Switch area and leakage scale with width (a_sw, l_sw); the record is a placeholder.
  const Characterization sw{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  lib.kinds.push_back(CellKind{"SWITCH", Function::Switch, {"E"}, "", sw, sw});
  return lib;
}

}  // namespace smt
