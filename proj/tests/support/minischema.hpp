#pragma once

// Small structural validator for the shipped schema files. Supports the
// subset those schemas use: type, properties, required, items, enum,
// additionalProperties (boolean), plus integer minima.

#include <string>
#include <vector>

#include "scver/json_io.hpp"

namespace scver::testing {

// Returns a list of violations; empty means the instance validates.
std::vector<std::string> validate_against_schema(const Json& schema, const Json& instance);

Json load_schema(const std::string& name);  // from SCVER_SCHEMA_DIR

}  // namespace scver::testing
