#pragma once

#include <string>

#include "helpers.hpp"

namespace testutil {

// Random programs over a fixed set of globals, used by the restoration
// property suites: a deterministic prefix establishes state, then a block of
// junk (assignments, tells, SOME, EITHER, INDOMAIN) runs and is forced to
// fail, and the machine state afterwards must equal the state before.
class ProgramGen {
public:
    explicit ProgramGen(uint64_t seed) : rng_(seed) {}

    // Program A: prefix only, succeed. Program B: prefix, then junk wrapped
    // so every path fails back to a TRUE branch.
    struct Pair {
        std::string plain;
        std::string with_junk;
    };

    Pair generate() {
        std::string prefix = gen_prefix();
        std::string junk = gen_stmts(3 + static_cast<int>(rng_.range(0, 3)), 2);
        Pair p;
        p.plain = header() + prefix + "  TRUE\n" + footer();
        p.with_junk = header() + prefix +
                      "  EITHER\n" + junk +
                      "    ;FALSE\n"
                      "  ORELSE TRUE END\n" +
                      footer();
        return p;
    }

private:
    static std::string header() {
        return "MODULE R;\n"
               "VAR v1, v2, v3 : INTEGER;\n"
               "    u1, u2, u3, u4 : CONSTRAINED [1..4];\n"
               "    r1, r2 : CONSTRAINED REAL;\n"
               "    i : INTEGER;\n"
               "BEGIN\n";
    }
    static std::string footer() { return "END R.\n"; }

    std::string var() { return "v" + std::to_string(rng_.range(1, 3)); }
    std::string unk() { return "u" + std::to_string(rng_.range(1, 4)); }
    std::string lit() { return std::to_string(rng_.range(-3, 6)); }

    std::string int_expr() {
        switch (rng_.range(0, 3)) {
        case 0: return lit();
        case 1: return var();
        case 2: return var() + " + " + lit();
        default: return var() + " * " + std::to_string(rng_.range(-2, 3));
        }
    }

    std::string gen_prefix() {
        std::string out;
        out += "  v1 := " + lit() + ";\n";
        out += "  v2 := " + lit() + ";\n";
        out += "  v3 := " + lit() + ";\n";
        int extra = static_cast<int>(rng_.range(0, 3));
        for (int i = 0; i < extra; ++i)
            out += "  " + simple_stmt() + ";\n";
        return out;
    }

    // deterministic-ish statements: assignments and tells
    std::string simple_stmt() {
        switch (rng_.range(0, 5)) {
        case 0: return var() + " := " + int_expr();
        case 1: return unk() + " <> " + std::to_string(rng_.range(1, 4));
        case 2: return unk() + " <= " + std::to_string(rng_.range(1, 4));
        case 3: return unk() + " = " + unk() + " + " +
                       std::to_string(rng_.range(-1, 1));
        case 4: return "r1 = " + std::to_string(rng_.range(0, 9)) + ".5";
        default: return "r2 = r1 + " + std::to_string(rng_.range(0, 3)) + ".25";
        }
    }

    std::string gen_stmt(int depth) {
        if (depth > 0) {
            switch (rng_.range(0, 7)) {
            case 0: {
                std::string body = gen_stmts(static_cast<int>(rng_.range(1, 2)),
                                             depth - 1);
                return "    SOME i := 1 TO 2 DO\n" + body + "    TRUE END";
            }
            case 1: {
                std::string b1 = gen_stmts(1, depth - 1);
                std::string b2 = gen_stmts(1, depth - 1);
                return "    EITHER\n" + b1 + "    TRUE ORELSE\n" + b2 +
                       "    TRUE END";
            }
            case 2:
                return "    INDOMAIN(" + unk() + ")";
            default:
                break;
            }
        }
        return "    " + simple_stmt();
    }

    std::string gen_stmts(int n, int depth) {
        std::string out;
        for (int i = 0; i < n; ++i) out += gen_stmt(depth) + ";\n";
        return out;
    }

    Rng rng_;
};

} // namespace testutil
