#pragma once

#include <string>

#include "scver/design.hpp"
#include "scver/kernel.hpp"

namespace scver {

// Identifier mangling for emitted Promela: '_' escapes to '_0' inside each
// segment, segments join with '__'. Injective, so distinct source paths
// never collide ("a_b.c" vs "a.b_c").
std::string mangle_segment(const std::string& segment);
std::string mangle_path(const std::string& dotted);

// Emits a self-contained Promela model: global state, one proctype per
// process, a scheduler proctype encoding the evaluation/update/delta/time
// phase machine with a baton variable, and one named ltl block per
// property. Deterministic: byte-identical output for identical input.
// The horizon bounds are compiled in so internal and external checks
// verify the same bounded system.
std::string emit_promela(const ElaboratedDesign& design, const Limits& limits, EnvPolicy env,
                         const std::string& source_sha256);

}  // namespace scver
