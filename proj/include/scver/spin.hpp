#pragma once

#include <string>

#include "scver/config.hpp"
#include "scver/design.hpp"
#include "scver/explorer.hpp"

namespace scver {

// Outcome of running the external SPIN toolchain against the internal
// engine on one property. Toolchain problems (missing binary, compile
// failure) raise Error(Infra) and never masquerade as a verdict.
struct CrosscheckReport {
  std::string property;
  VerdictStatus internal_status = VerdictStatus::Pass;
  std::string internal_message;
  std::string spin_verdict;  // "pass" | "violation"
  bool comparable = false;   // false when the internal verdict is a bound verdict
  bool agree = false;
  std::string spin_output;   // tail of the verifier output
};

// Emits the Promela model into scratch_dir, runs spin + the generated
// verifier there, and compares the result against the internal check of
// the named property. scratch_dir is created if missing; one call at a
// time per directory.
CrosscheckReport spin_crosscheck(const ast::DesignAst& ast, const ElaboratedDesign& design,
                                 const std::string& source_text, const RunConfig& config,
                                 const std::string& property_name,
                                 const std::string& scratch_dir);

}  // namespace scver
