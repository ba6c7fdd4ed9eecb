#pragma once

#include <string>

#include "almac/ast.hpp"

namespace almac {

// Prints a module back to parseable source. print(parse(print(parse(s))))
// is a fixpoint, which the round-trip tests rely on.
std::string pretty_print(const Module& module);
std::string pretty_print(const Expr& expr);
std::string pretty_print(const Stmt& stmt);

} // namespace almac
