#pragma once

#include <string_view>

#include "scver/ast.hpp"

namespace scver {

// Parses SCL source text into a design AST. Range checks and name resolution
// happen later, in elaboration; this stage is purely syntactic.
ast::DesignAst parse(std::string_view source);

// Parses standalone property text (the grammar of ltl/invariant bodies).
// The whole input must be consumed.
ast::PropExprPtr parse_property_expr(std::string_view text);

}  // namespace scver
