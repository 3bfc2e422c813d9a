#pragma once

#include <string>

#include "scver/config.hpp"
#include "scver/design.hpp"
#include "scver/explorer.hpp"

// Vendored single-header nlohmann/json.
#include "json.hpp"

namespace scver {

using Json = nlohmann::ordered_json;

Json value_to_json(const ScalarType& type, Value v);
Value value_from_json(const ScalarType& type, const Json& j, const std::string& what);

Json config_to_json(const RunConfig& config);
Json observation_to_json(const ElaboratedDesign& design, const Observation& obs);
Json choice_to_json(const ElaboratedDesign& design, const SchedChoice& choice);
SchedChoice choice_from_json(const ElaboratedDesign& design, const Json& j);
Json trace_to_json(const ElaboratedDesign& design, const Trace& trace);
Trace trace_from_json(const ElaboratedDesign& design, const Json& j);
Json verdict_to_json(const ElaboratedDesign& design, const Verdict& verdict,
                     const RunConfig& config);

Json stub_to_json(const StubAutomaton& stub);
StubAutomaton stub_from_json(const Json& j);

std::string read_file(const std::string& path);           // Error(Infra) on failure
void write_file(const std::string& path, const std::string& content);
Json parse_json_file(const std::string& path);            // Error(Usage) on bad JSON

}  // namespace scver
