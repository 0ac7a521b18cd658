#pragma once

#include <string>
#include <vector>

#include "smt/design.hpp"

namespace smt {

struct Diagnostic {
  std::string rule;    // e.g. "combinational-cycle", "dangling-net"
  std::string entity;  // offending id(s)
  std::string message;
};

/// Empty iff every data-model invariant holds and the combinational logic is
/// acyclic.
std::vector<Diagnostic> validate(const Design& d);

/// Throws Error(Validation) listing the diagnostics when `validate` is non-empty.
void require_valid(const Design& d);

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

}  // namespace smt
