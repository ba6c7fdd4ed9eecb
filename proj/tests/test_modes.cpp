#include <doctest.h>

#include "helpers.hpp"

using namespace almac;
using testutil::run_program;

namespace {

const std::string kEnum =
    "MODULE M;\nVAR i : INTEGER;\nBEGIN\n"
    "SOME i := 1 TO 3 DO TRUE END; WRITE(i)\nEND M.";

} // namespace

TEST_CASE("first mode stops at the first success") {
    auto rc = run_program(kEnum);
    CHECK(rc.result.solutions == 1);
    CHECK(rc.out == "1");
}

TEST_CASE("all mode prints one separator per solution and re-runs output") {
    almac::RunOptions opts;
    opts.mode = almac::RunMode::All;
    auto rc = run_program(kEnum, opts);
    CHECK(rc.result.solutions == 3);
    CHECK(rc.out ==
          "1--- solution 1 ---\n"
          "2--- solution 2 ---\n"
          "3--- solution 3 ---\n");
}

TEST_CASE("max-solutions caps the enumeration") {
    almac::RunOptions opts;
    opts.mode = almac::RunMode::Count;
    opts.max_solutions = 2;
    auto rc = run_program(kEnum, opts);
    CHECK(rc.result.solutions == 2);
}

TEST_CASE("runs are deterministic byte for byte") {
    almac::RunOptions opts;
    opts.mode = almac::RunMode::All;
    opts.dump_store = true;
    std::string src =
        "MODULE M;\nVAR u : CONSTRAINED [1..3]; v : CONSTRAINED [1..3];\n"
        "BEGIN u <> v; INDOMAIN(u); INDOMAIN(v); WRITE(u); WRITE(v)\nEND M.";
    auto a = run_program(src, opts);
    auto b = run_program(src, opts);
    CHECK(a.out == b.out);
    CHECK(a.result.solutions == 6);
}

TEST_CASE("trace reports choices, backtracking and commits") {
    almac::RunOptions opts;
    opts.trace = true;
    auto rc = run_program(
        "MODULE M;\nVAR x : INTEGER;\nBEGIN\n"
        "COMMIT EITHER x := 1; FALSE ORELSE x := 2 END END\nEND M.",
        opts);
    REQUIRE(testutil::succeeded(rc));
    CHECK(rc.trace.find("CHOICE 1 @4:8") != std::string::npos);
    CHECK(rc.trace.find("BACKTRACK 1") != std::string::npos);
    CHECK(rc.trace.find("COMMIT 1-1") != std::string::npos);
}

TEST_CASE("tell trace lines show the evaluated form and the result") {
    almac::RunOptions opts;
    opts.trace = true;
    auto rc = run_program(
        "MODULE M;\nVAR u : CONSTRAINED [1..8]; i : INTEGER;\nBEGIN\n"
        "i := 2; u <= i; u = 9 - 7\nEND M.",
        opts);
    REQUIRE(testutil::succeeded(rc));
    CHECK(rc.trace.find("TELL u <= 2 -> ok") != std::string::npos);
    CHECK(rc.trace.find("TELL u = 2 -> ok") != std::string::npos);

    rc = run_program(
        "MODULE M;\nVAR u : CONSTRAINED [1..8];\nBEGIN\n"
        "u = 3; u = 4\nEND M.",
        opts);
    CHECK_FALSE(testutil::succeeded(rc));
    CHECK(rc.trace.find("TELL u = 4 -> fail") != std::string::npos);
}

TEST_CASE("store dumps list unknowns before active constraints") {
    almac::RunOptions opts;
    opts.dump_store = true;
    auto rc = run_program(
        "MODULE M;\nVAR u : CONSTRAINED [1..8]; w : CONSTRAINED [1..8];\n"
        "BEGIN u - w >= 2 END M.",
        opts);
    REQUIRE(testutil::succeeded(rc));
    size_t u_pos = rc.out.find("u : [1..8]");
    size_t w_pos = rc.out.find("w : [1..8]");
    size_t c_pos = rc.out.find("u - w >= 2");
    REQUIRE(u_pos != std::string::npos);
    REQUIRE(w_pos != std::string::npos);
    REQUIRE(c_pos != std::string::npos);
    CHECK(u_pos < w_pos);
    CHECK(w_pos < c_pos);
}
