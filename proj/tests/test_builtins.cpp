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

TEST_CASE("KNOWN distinguishes fresh variables and determined unknowns") {
    std::string decls = "VAR x : INTEGER; u : CONSTRAINED [1..5];";
    auto rc = run_program(mod(decls,
                              "IF KNOWN(x) THEN WRITE(1) ELSE WRITE(0) END;\n"
                              "x := 3;\n"
                              "IF KNOWN(x) THEN WRITE(1) ELSE WRITE(0) END;\n"
                              "IF KNOWN(u) THEN WRITE(1) ELSE WRITE(0) END;\n"
                              "u = 3;\n"
                              "IF KNOWN(u) THEN WRITE(1) ELSE WRITE(0) END"));
    REQUIRE(succeeded(rc));
    CHECK(rc.out == "0101");
}

TEST_CASE("INDOMAIN enumerates the domain at call time, in order") {
    std::string decls = "VAR u : CONSTRAINED [1..5];";
    std::string body =
        "u <> 1; u <> 3; u <> 4;\n" // domain is {2,5}
        "INDOMAIN(u)";
    almac::RunOptions opts;
    opts.mode = almac::RunMode::All;
    std::vector<int64_t> seen;
    auto rc = run_program(mod(decls, body), opts,
                          [&](almac::Interp& in, almac::Machine& m) {
                              const Value* u = in.global_cell("u");
                              seen.push_back(*m.store.determined_ordinal(u->unknown_id()));
                          });
    CHECK(rc.result.solutions == 2);
    CHECK(seen == std::vector<int64_t>{2, 5});

    opts.value_order = almac::ValueOrder::Descending;
    seen.clear();
    run_program(mod(decls, body), opts,
                [&](almac::Interp& in, almac::Machine& m) {
                    const Value* u = in.global_cell("u");
                    seen.push_back(*m.store.determined_ordinal(u->unknown_id()));
                });
    CHECK(seen == std::vector<int64_t>{5, 2});
}

TEST_CASE("INDOMAIN over an aggregate is nested labeling") {
    std::string decls = "VAR A : ARRAY [1..2] OF CONSTRAINED [1..2];";
    almac::RunOptions opts;
    opts.mode = almac::RunMode::Count;
    auto rc = run_program(mod(decls, "INDOMAIN(A)"), opts);
    CHECK(rc.result.solutions == 4);

    rc = run_program(mod(decls, "A[1] <> A[2]; INDOMAIN(A)"), opts);
    CHECK(rc.result.solutions == 2);

    // an empty list labels nothing and succeeds
    std::string ldecl = "VAR l : LIST OF CONSTRAINED [1..2];";
    rc = run_program(mod(ldecl, "Empty(l); INDOMAIN(l)"), opts);
    CHECK(rc.result.solutions == 1);
}

TEST_CASE("first-fail labels the smallest domain first") {
    std::string decls =
        "VAR a : CONSTRAINED [1..3]; b : CONSTRAINED [1..2];\n"
        "    L : LIST OF CONSTRAINED [1..3];";
    std::string body = "Empty(L); Insert(L, a); Insert(L, b); INDOMAIN(L)";
    almac::RunOptions opts;
    opts.mode = almac::RunMode::All;
    std::vector<std::pair<int64_t, int64_t>> textual, firstfail;
    auto grab = [&](std::vector<std::pair<int64_t, int64_t>>& out) {
        return [&out](almac::Interp& in, almac::Machine& m) {
            out.emplace_back(
                *m.store.determined_ordinal(in.global_cell("a")->unknown_id()),
                *m.store.determined_ordinal(in.global_cell("b")->unknown_id()));
        };
    };
    run_program(mod(decls, body), opts, grab(textual));
    opts.label_order = almac::LabelOrder::FirstFail;
    run_program(mod(decls, body), opts, grab(firstfail));

    REQUIRE(textual.size() == 6);
    REQUIRE(firstfail.size() == 6);
    // same solution set either way
    auto sorted = [](std::vector<std::pair<int64_t, int64_t>> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    CHECK(sorted(textual) == sorted(firstfail));
    // textual labels a first; first-fail labels b (smaller domain) first
    CHECK(textual[1] == std::pair<int64_t, int64_t>{1, 2});
    CHECK(firstfail[1] == std::pair<int64_t, int64_t>{2, 1});
}

TEST_CASE("lists keep insertion order and restore on backtracking") {
    std::string decls =
        "VAR u1, u2, u3 : CONSTRAINED [1..9];\n"
        "    L : LIST OF CONSTRAINED [1..9];";
    // Sum over the list pins u1+u2+u3 = 24 so all become 8... use distinct
    std::string body =
        "Empty(L); Insert(L, u1); Insert(L, u2); Insert(L, u3);\n"
        "Sum(L, '=', 27)";
    almac::RunOptions dump;
    dump.dump_store = true;
    auto rc = run_program(mod(decls, body), dump);
    REQUIRE(succeeded(rc));
    // all three forced to 9
    CHECK(rc.out.find("u1 : [1..9] = 9") != std::string::npos);
    CHECK(rc.out.find("u3 : [1..9] = 9") != std::string::npos);

    // Insert then backtrack past it restores the list
    std::string body2 =
        "Empty(L); Insert(L, u1);\n"
        "EITHER Insert(L, u2); FALSE ORELSE TRUE END;\n"
        "Sum(L, '=', 9)"; // only u1 in the list
    rc = run_program(mod(decls, body2), dump);
    REQUIRE(succeeded(rc));
    CHECK(rc.out.find("u1 : [1..9] = 9") != std::string::npos);
    CHECK(rc.out.find("u2 : [1..9] = {1..9}") != std::string::npos);
}

TEST_CASE("a list can be reused after its constraint was told") {
    std::string decls =
        "VAR u1, u2 : CONSTRAINED [1..9];\n"
        "    L : LIST OF CONSTRAINED [1..9];";
    std::string body =
        "Empty(L); Insert(L, u1); Sum(L, '=', 4);\n"
        "Empty(L); Insert(L, u2); Sum(L, '=', 7);\n"
        "u1 = 4; u2 = 7";
    CHECK(succeeded(run_program(mod(decls, body))));
}

TEST_CASE("diagonal sum through a list (oracle checked)") {
    std::string decls =
        "VAR A : ARRAY [1..2],[1..2] OF CONSTRAINED [1..3];\n"
        "    L : LIST OF CONSTRAINED [1..3];\n"
        "    i : INTEGER;";
    std::string body =
        "Empty(L);\n"
        "FOR i := 1 TO 2 DO Insert(L, A[i,i]) END;\n"
        "Sum(L, '=', 6)";
    // oracle: over the 9 diagonal pairs only (3,3) sums to 6
    int support = 0;
    testutil::enumerate({{1, 2, 3}, {1, 2, 3}},
                        [&](const std::vector<int64_t>& v) {
                            if (v[0] + v[1] == 6) ++support;
                        });
    REQUIRE(support == 1);
    almac::RunOptions dump;
    dump.dump_store = true;
    auto rc = run_program(mod(decls, body), dump);
    REQUIRE(succeeded(rc));
    CHECK(rc.out.find("A[1,1] : [1..3] = 3") != std::string::npos);
    CHECK(rc.out.find("A[2,2] : [1..3] = 3") != std::string::npos);
}

TEST_CASE("Sum over the empty list is a ground check") {
    std::string decls = "VAR L : LIST OF CONSTRAINED [1..3];";
    CHECK(succeeded(run_program(mod(decls, "Empty(L); Sum(L, '=', 0)"))));
    CHECK_FALSE(succeeded(run_program(mod(decls, "Empty(L); Sum(L, '=', 1)"))));
}

TEST_CASE("ALL_DIFFERENT singleton and conflicting cases") {
    std::string one = "VAR A : ARRAY [1..1] OF CONSTRAINED [1..3];";
    CHECK(succeeded(run_program(mod(one, "ALL_DIFFERENT(A)"))));

    std::string two = "VAR A : ARRAY [1..2] OF CONSTRAINED [1..3];";
    CHECK_FALSE(succeeded(
        run_program(mod(two, "A[1] = 2; A[2] = 2; ALL_DIFFERENT(A)"))));
}

TEST_CASE("AT_MOST bounds: immediate failure and trivial satisfaction") {
    std::string decls = "VAR A : ARRAY [1..3] OF CONSTRAINED [1..3];";
    CHECK_FALSE(
        succeeded(run_program(mod(decls, "A[1] = 2; AT_MOST(0, A, 2)"))));
    almac::RunOptions count;
    count.mode = almac::RunMode::Count;
    auto rc = run_program(mod(decls, "AT_MOST(3, A, 1); INDOMAIN(A)"), count);
    CHECK(rc.result.solutions == 27); // k >= length constrains nothing
}

TEST_CASE("region-style cumulative limit over a list") {
    std::string decls =
        "VAR X : ARRAY [1..3] OF CONSTRAINED [1..3];\n"
        "    L : LIST OF CONSTRAINED [1..3];\n"
        "    i, k : INTEGER;";
    std::string body =
        "FOR k := 1 TO 3 DO\n"
        "  Empty(L);\n"
        "  FOR i := 1 TO 3 DO Insert(L, X[i]) END;\n"
        "  AT_MOST(1, L, k)\n"
        "END;\n"
        "INDOMAIN(X)";
    almac::RunOptions count;
    count.mode = almac::RunMode::Count;
    auto rc = run_program(mod(decls, body), count);
    // oracle: assignments of 3 cells to 3 values with no value repeated
    int oracle = 0;
    testutil::enumerate({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}},
                        [&](const std::vector<int64_t>& v) {
                            int cnt[4] = {0, 0, 0, 0};
                            for (int64_t x : v) cnt[x]++;
                            if (cnt[1] <= 1 && cnt[2] <= 1 && cnt[3] <= 1)
                                ++oracle;
                        });
    CHECK(rc.result.solutions == oracle);
    CHECK(oracle == 6);
}

TEST_CASE("WRITE formats every scalar kind and the dash") {
    std::string decls =
        "TYPE C = (red, blue);\n"
        "VAR x : INTEGER; b : BOOLEAN; r : REAL; c : C; u : INTEGER;";
    auto rc = run_program(
        mod(decls, "x := -3; b := TRUE; r := 1.5; c := blue;\n"
                   "WRITE(x); WRITE(\" \"); WRITE(b); WRITE(\" \");\n"
                   "WRITE(r); WRITE(\" \"); WRITE(c); WRITE(\" \"); WRITE(u);\n"
                   "WRITELN"));
    REQUIRE(succeeded(rc));
    CHECK(rc.out == "-3 TRUE 1.500000 blue -\n");
}
