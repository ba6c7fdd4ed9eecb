#include <doctest.h>

#include "helpers.hpp"

using namespace almac;
using testutil::run_program;
using testutil::succeeded;

namespace {

std::string mod(const std::string& decls, const std::string& body) {
    return "MODULE M;\n" + decls + "\nBEGIN\n" + body + "\nEND M.";
}

} // namespace

TEST_CASE("boolean unknowns: bare occurrences and labeling") {
    std::string decls = "VAR b, c : CONSTRAINED BOOLEAN;";
    // a bare boolean unknown in test position is the constraint b = TRUE
    almac::RunOptions dump;
    dump.dump_store = true;
    auto rc = run_program(mod(decls, "b"), dump);
    REQUIRE(succeeded(rc));
    CHECK(rc.out.find("b : BOOLEAN = TRUE") != std::string::npos);

    // statement-level NOT sandboxes: the tell `c` is consistent, so NOT fails
    rc = run_program(mod(decls, "NOT c"), dump);
    CHECK_FALSE(succeeded(rc));

    // telling the complement is written as an equality (or NOT inside a
    // condition, where the relation is inverted)
    rc = run_program(mod(decls, "c = FALSE"), dump);
    REQUIRE(succeeded(rc));
    CHECK(rc.out.find("c : BOOLEAN = FALSE") != std::string::npos);

    rc = run_program(
        mod(decls, "IF NOT (b = TRUE) THEN TRUE ELSE FALSE END"), dump);
    REQUIRE(succeeded(rc)); // told b <> TRUE, i.e. b = FALSE
    CHECK(rc.out.find("b : BOOLEAN = FALSE") != std::string::npos);

    almac::RunOptions count;
    count.mode = almac::RunMode::Count;
    rc = run_program(mod(decls, "b <> c; INDOMAIN(b); INDOMAIN(c)"), count);
    CHECK(rc.result.solutions == 2);
}

TEST_CASE("enumeration unknowns: constraints, labeling, at-most") {
    std::string decls =
        "TYPE Colour = (blue, green, red);\n"
        "VAR x, y, z : CONSTRAINED Colour;";
    almac::RunOptions count;
    count.mode = almac::RunMode::Count;
    auto rc = run_program(
        mod(decls, "x <> blue; INDOMAIN(x)"), count);
    CHECK(rc.result.solutions == 2);

    // at most one member may be green
    std::string atmost =
        "TYPE Colour = (blue, green, red);\n"
        "TYPE Trio = ARRAY [1..3] OF CONSTRAINED Colour;\n"
        "VAR A : Trio;";
    rc = run_program(mod(atmost, "AT_MOST(1, A, green); INDOMAIN(A)"), count);
    int oracle = 0;
    testutil::enumerate({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}},
                        [&](const std::vector<int64_t>& v) {
                            int greens = 0;
                            for (int64_t c : v)
                                if (c == 1) ++greens;
                            if (greens <= 1) ++oracle;
                        });
    CHECK(rc.result.solutions == oracle);
}

TEST_CASE("suspended subscripts over real unknown arrays") {
    std::string decls =
        "VAR Y : ARRAY [1..3] OF CONSTRAINED REAL;\n"
        "    C : CONSTRAINED [1..3];";
    almac::RunOptions opts;
    opts.trace = true;
    // Y[C] stays symbolic until C is determined, then solves as a real
    // equation
    auto rc = run_program(
        mod(decls, "Y[C] = 2.5; C = 2; Y[2] = 2.5"), opts);
    REQUIRE(succeeded(rc));
    CHECK(rc.trace.find("TELL Y[C] = 2.5 -> ok") != std::string::npos);

    // contradiction after resolution
    rc = run_program(mod(decls, "Y[C] = 2.5; Y[3] = 7.0; C = 3"), opts);
    CHECK_FALSE(succeeded(rc));
}

TEST_CASE("an out-of-range resolved subscript is a runtime error") {
    std::string decls =
        "VAR Y : ARRAY [1..3] OF CONSTRAINED [1..9];\n"
        "    C : CONSTRAINED [1..8];";
    CHECK_THROWS_AS(run_program(mod(decls, "Y[C] <> 4; C = 7")), RuntimeError);
}

TEST_CASE("real unknowns flow through generalized-equality-style constraints") {
    std::string decls = "VAR r, s : CONSTRAINED REAL;";
    // r pinned transitively through s
    auto rc = run_program(mod(decls, "r = s + 1.5; s = 2.0; WRITE(r)"));
    REQUIRE(succeeded(rc));
    CHECK(rc.out == "3.500000");
}
