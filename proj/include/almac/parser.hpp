#pragma once

#include "almac/ast.hpp"
#include "almac/token.hpp"

namespace almac {

// Parses a token sequence into a module AST. Throws CompileError (Parse)
// with an expected-token diagnosis on malformed input.
Module parse(const std::vector<Token>& tokens);

// Convenience: tokenize + parse.
Module parse_source(const std::string& source);

} // namespace almac
