#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "almac/ast.hpp"

namespace almac {

// Fully checked program: the annotated AST plus symbol storage. Symbols are
// stable (deque) so AST nodes can point into them.
struct CheckedProgram {
    Module module;
    std::deque<Symbol> symbols;
    std::vector<const Symbol*> globals; // global variables, declaration order
    int global_slots = 0;
};

// Resolves names and types, verifies the typing discipline, marks constraint
// occurrences, validates unknown positions and computes choice-leak flags.
// Throws CompileError (Sema) on violations.
CheckedProgram check_semantics(Module module);

// Convenience: parse + check.
CheckedProgram check_source(const std::string& source);

} // namespace almac
