#pragma once

#include <string>

#include "scver/ast.hpp"

namespace scver {

// Renders an AST back to SCL source. parse(pretty_print(parse(s))) is
// structurally identical to parse(s).
std::string pretty_print(const ast::DesignAst& design);
std::string pretty_print(const ast::Expr& expr);
std::string pretty_print(const ast::PropExpr& prop);

}  // namespace scver
