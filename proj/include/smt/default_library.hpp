#pragma once

#include "smt/design.hpp"

namespace smt {

/// Shipped characterization. Low-Vth leaks 20x high-Vth; high-Vth intrinsic
/// delay is 1.4x low-Vth. Holder, switch and MTE-buffer entries are sized only
/// to keep the relative overheads of the three design styles plausible.
Library default_library();

}  // namespace smt
