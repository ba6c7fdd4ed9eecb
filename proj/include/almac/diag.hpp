#pragma once

#include <stdexcept>
#include <string>

namespace almac {

struct SourceLoc {
    int line = 0;
    int column = 0;

    std::string str() const {
        return std::to_string(line) + ":" + std::to_string(column);
    }
};

// Lexical, syntax and semantic errors share one exception type; the phase
// only matters for diagnostics. All of them map to CLI exit code 3.
class CompileError : public std::runtime_error {
public:
    enum class Phase { Lex, Parse, Sema };

    CompileError(Phase phase, SourceLoc loc, const std::string& msg)
        : std::runtime_error(loc.str() + ": " + phase_name(phase) + ": " + msg),
          phase(phase), loc(loc) {}

    static const char* phase_name(Phase p) {
        switch (p) {
        case Phase::Lex: return "lexical error";
        case Phase::Parse: return "syntax error";
        default: return "semantic error";
        }
    }

    Phase phase;
    SourceLoc loc;
};

// Aborts the run (CLI exit code 2). Never caught by backtracking: failures
// are values, errors are exceptions.
class RuntimeError : public std::runtime_error {
public:
    RuntimeError(SourceLoc loc, const std::string& msg)
        : std::runtime_error(loc.str() + ": runtime error: " + msg), loc(loc) {}

    SourceLoc loc;
};

} // namespace almac
