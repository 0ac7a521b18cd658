#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "smt/design.hpp"
#include <json.hpp>

namespace smt {

/// Parses and validates a design file (format 1). Throws Error with kind
/// Syntax (with line:column), Reference, Duplicate or Validation.
Design parse_design(std::string_view text);

/// Canonical serialization: entities sorted by id, keys sorted, two-space
/// indentation, trailing newline. Throws Error(Validation) on an invalid design.
std::string write_design(const Design& d);

Design read_design_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

nlohmann::json constraints_to_json(const Constraints& c);
/// Overrides the fields present in `j`; unknown keys are rejected.
void apply_constraints_json(Constraints& c, const nlohmann::json& j);

}  // namespace smt
