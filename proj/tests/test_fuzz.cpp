#include <doctest.h>

#include "helpers.hpp"

using namespace almac;
using testutil::run_program;
using testutil::succeeded;

namespace {

// Random programs over the full statement repertoire (bounded loops and
// ranges only, no error paths): choice constructs, committed FORALL bodies,
// COMMIT, NOT, tells over finite and real unknowns.
class FullGen {
public:
    explicit FullGen(uint64_t seed) : rng_(seed) {}

    struct Pair {
        std::string plain;     // prefix only
        std::string with_junk; // prefix + failing junk + probe
    };

    Pair generate() {
        std::string prefix =
            "  v1 := " + lit() + ";\n  v2 := " + lit() + ";\n  v3 := " + lit() +
            ";\n";
        std::string junk = stmts(static_cast<int>(rng_.range(2, 4)), 3);
        Pair p;
        p.plain = header() + prefix + "  TRUE\n" + footer();
        p.with_junk = header() + prefix + "  EITHER\n" + junk +
                      "    ;FALSE\n  ORELSE TRUE END\n" + footer();
        return p;
    }

    std::string standalone() {
        return header() +
               "  v1 := " + lit() + ";\n  v2 := " + lit() + ";\n  v3 := " +
               lit() + ";\n" + stmts(static_cast<int>(rng_.range(2, 5)), 3) +
               "  TRUE\n" + footer();
    }

private:
    static std::string header() {
        return "MODULE F;\n"
               "VAR v1, v2, v3 : INTEGER;\n"
               "    u1, u2, u3, u4 : CONSTRAINED [1..4];\n"
               "    r1, r2 : CONSTRAINED REAL;\n"
               "    i, j : INTEGER;\n"
               "BEGIN\n";
    }
    static std::string footer() { return "END F.\n"; }

    std::string var() { return "v" + std::to_string(rng_.range(1, 3)); }
    std::string unk() { return "u" + std::to_string(rng_.range(1, 4)); }
    std::string lit() { return std::to_string(rng_.range(-3, 6)); }

    std::string simple() {
        switch (rng_.range(0, 6)) {
        case 0: return var() + " := " + var() + " + " + lit();
        case 1: return var() + " := " + lit();
        case 2: return unk() + " <> " + std::to_string(rng_.range(1, 4));
        case 3: return unk() + " <= " + std::to_string(rng_.range(1, 4));
        case 4: return unk() + " = " + unk() + " + " +
                       std::to_string(rng_.range(-1, 1));
        case 5: return "r1 = " + std::to_string(rng_.range(0, 9)) + ".25";
        default: return "r2 = r1 + " + std::to_string(rng_.range(0, 3)) + ".5";
        }
    }

    std::string stmt(int depth) {
        if (depth > 0) {
            switch (rng_.range(0, 9)) {
            case 0:
                return "SOME i := 1 TO 2 DO\n" + stmts(1, depth - 1) +
                       "    TRUE END";
            case 1:
                return "EITHER\n" + stmts(1, depth - 1) + "    TRUE ORELSE\n" +
                       stmts(1, depth - 1) + "    TRUE END";
            case 2: return "INDOMAIN(" + unk() + ")";
            case 3:
                return "FORALL SOME j := 1 TO 2 DO TRUE END DO\n" +
                       stmts(1, depth - 1) + "    TRUE END";
            case 4:
                return "COMMIT\n" + stmts(1, depth - 1) + "    TRUE END";
            case 5: return "NOT " + simple();
            case 6:
                return "FOR i := 1 TO 2 DO\n" + stmts(1, depth - 1) +
                       "    TRUE END";
            default:
                break;
            }
        }
        return simple();
    }

    std::string stmts(int n, int depth) {
        std::string out;
        for (int k = 0; k < n; ++k) out += "    " + stmt(depth) + ";\n";
        return out;
    }

    testutil::Rng rng_;
};

} // namespace

TEST_CASE("random full-language programs run deterministically") {
    FullGen gen(31337);
    for (int iter = 0; iter < 150; ++iter) {
        std::string src = gen.standalone();
        CAPTURE(src);
        almac::RunOptions opts;
        opts.mode = almac::RunMode::All;
        opts.max_solutions = 50;
        opts.dump_store = true;
        opts.trace = true;
        auto a = run_program(src, opts);
        auto b = run_program(src, opts);
        REQUIRE(a.out == b.out);
        REQUIRE(a.trace == b.trace);
        REQUIRE(a.result.solutions == b.result.solutions);
    }
}

TEST_CASE("restoration exactness holds with FORALL, COMMIT and NOT junk") {
    FullGen gen(987654321);
    int compared = 0;
    for (int iter = 0; iter < 250; ++iter) {
        auto pair = gen.generate();
        CAPTURE(pair.with_junk);
        std::string fp_a, fp_b;
        auto a = run_program(pair.plain, {}, [&](Interp&, Machine& m) {
            fp_a = m.fingerprint();
        });
        auto b = run_program(pair.with_junk, {}, [&](Interp&, Machine& m) {
            fp_b = m.fingerprint();
        });
        REQUIRE(succeeded(a) == succeeded(b));
        if (succeeded(a)) {
            REQUIRE(fp_a == fp_b);
            ++compared;
        }
    }
    CHECK(compared > 150);
}
