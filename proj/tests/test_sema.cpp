#include <doctest.h>

#include "helpers.hpp"

using namespace almac;

namespace {

// Wraps a body (and optional declarations) into a module around the standard
// declarations from the discussion of constrained types.
std::string wrap(const std::string& decls, const std::string& body) {
    return "MODULE M;\nCONST N = 8;\n"
           "TYPE Board = ARRAY [1..N] OF CONSTRAINED [1..N];\n"
           "     Colour = (blue, green, red, yellow);\n"
           "     Info = RECORD co : Colour; No : CONSTRAINED INTEGER; END;\n"
           "VAR i, j : INTEGER;\n"
           "    a : ARRAY [1..N] OF INTEGER;\n"
           "    C : CONSTRAINED [1..N];\n"
           "    X, Y : Board;\n"
           "    Z : Info;\n" +
           decls + "\nBEGIN\n" + body + "\nEND M.";
}

bool sema_ok(const std::string& src) {
    check_source(src);
    return true;
}

std::string sema_error(const std::string& src) {
    try {
        check_source(src);
    } catch (const CompileError& e) {
        REQUIRE(e.phase == CompileError::Phase::Sema);
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("assignments to unknowns are illegal, constraints on them legal") {
    CHECK(sema_error(wrap("", "C := 1")) != "");
    CHECK(sema_error(wrap("", "X[1] := 0")) != "");
    CHECK(sema_ok(wrap("", "C = 1")));
    CHECK(sema_ok(wrap("", "X[1] = 0")));

    // the constraint flag is set on the checked expression
    CheckedProgram p = check_source(wrap("", "C = 1"));
    const auto& s = std::get<ExprS>(p.module.body[0]->node);
    CHECK(s.expr->is_constraint);

    CheckedProgram q = check_source(wrap("", "i = 1"));
    const auto& t = std::get<ExprS>(q.module.body[0]->node);
    CHECK_FALSE(t.expr->is_constraint);
}

TEST_CASE("unknowns may appear on assignment right sides") {
    CHECK(sema_ok(wrap("", "i := X[1] + X[2]")));
    CHECK(sema_ok(wrap("", "i := Y[X[2]]")));
}

TEST_CASE("unknowns are rejected outside constraints, right sides and args") {
    CHECK(sema_error(wrap("", "a[X[1]] := 0")) != "");           // target index
    CHECK(sema_error(wrap("", "WHILE X[1] > 0 DO i := 1 END")) != "");
    CHECK(sema_error(wrap("", "FOR i := X[1] TO 3 DO TRUE END")) != "");
    CHECK(sema_error(wrap("", "FOR C := 1 TO 3 DO TRUE END")) != "");
}

TEST_CASE("constrained types exist only at the outer level") {
    std::string src =
        "MODULE M;\n"
        "PROCEDURE P();\n"
        "VAR u : CONSTRAINED [1..3];\n"
        "BEGIN TRUE END P;\n"
        "BEGIN P() END M.";
    CHECK(sema_error(src) != "");

    // lists of unknowns are references, so they are fine locally
    std::string list_src =
        "MODULE M;\n"
        "VAR u : CONSTRAINED [1..3];\n"
        "PROCEDURE P();\n"
        "VAR l : LIST OF CONSTRAINED [1..3];\n"
        "BEGIN Empty(l); Insert(l, u) END P;\n"
        "BEGIN P() END M.";
    CHECK(sema_ok(list_src));
}

TEST_CASE("constrained formals must be VAR parameters") {
    std::string src =
        "MODULE M;\n"
        "TYPE B = ARRAY [1..3] OF CONSTRAINED [1..3];\n"
        "VAR X : B;\n"
        "PROCEDURE P(A : B);\n"
        "BEGIN TRUE END P;\n"
        "BEGIN P(X) END M.";
    CHECK(sema_error(src) != "");
    std::string ok_src =
        "MODULE M;\n"
        "TYPE B = ARRAY [1..3] OF CONSTRAINED [1..3];\n"
        "VAR X : B;\n"
        "PROCEDURE P(VAR A : B);\n"
        "BEGIN A[1] = 2 END P;\n"
        "BEGIN P(X) END M.";
    CHECK(sema_ok(ok_src));
}

TEST_CASE("selecting a plain field of a record with unknown fields is not a "
          "constraint") {
    CheckedProgram p = check_source(wrap("", "IF Z.co = blue THEN i := 1 END"));
    const auto& ifs = std::get<IfS>(p.module.body[0]->node);
    CHECK_FALSE(ifs.arms[0].cond->is_constraint);

    CheckedProgram q = check_source(wrap("", "Z.No = 3"));
    const auto& s = std::get<ExprS>(q.module.body[0]->node);
    CHECK(s.expr->is_constraint);
}

TEST_CASE("AND/OR cannot combine constraints") {
    CHECK(sema_error(wrap("", "X[1] > 0 AND X[2] > 0")) != "");
    CHECK(sema_error(wrap("", "X[1] - X[2] >= 1 OR X[2] - X[1] >= 1")) != "");
    CHECK(sema_ok(wrap("", "i > 0 AND j > 0")));
}

TEST_CASE("nonlinear constraints are rejected") {
    CHECK(sema_error(wrap("", "X[1] * X[2] = 4")) != "");
    CHECK(sema_error(wrap("", "X[1] DIV 2 = 1")) != "");
    CHECK(sema_error(wrap("", "abs(X[1] - X[2]) >= 1")) != "");
    CHECK(sema_ok(wrap("", "2 * X[1] = 4")));
    CHECK(sema_ok(wrap("", "X[1] <> X[2] + j - i")));
}

TEST_CASE("real constraints only support equality") {
    std::string decls = "VAR r : CONSTRAINED REAL;\n";
    CHECK(sema_ok(wrap(decls, "r = 2.5")));
    CHECK(sema_error(wrap(decls, "r >= 2.5")) != "");
}

TEST_CASE("unknown subscripts only over arrays holding unknowns") {
    CHECK(sema_ok(wrap("", "Y[X[1]] <> Y[8]")));
    CHECK(sema_error(wrap("", "a[X[1]] <> X[2]")) != "");
}

TEST_CASE("KNOWN applies to simple variables and unknowns") {
    CHECK(sema_ok(wrap("", "IF KNOWN(Z.No) THEN i := 1 END")));
    CHECK(sema_ok(wrap("", "IF KNOWN(i) THEN i := 1 END")));
    CHECK(sema_error(wrap("", "IF KNOWN(Z) THEN i := 1 END")) != "");
    CHECK(sema_error(wrap("", "IF KNOWN(3+i) THEN i := 1 END")) != "");
}

TEST_CASE("INDOMAIN needs a finite base type") {
    CHECK(sema_ok(wrap("", "INDOMAIN(C)")));
    CHECK(sema_ok(wrap("", "INDOMAIN(X)")));
    // plain CONSTRAINED INTEGER is not finite
    CHECK(sema_error(wrap("", "INDOMAIN(Z.No)")) != "");
    std::string decls = "VAR r : CONSTRAINED REAL;\n";
    CHECK(sema_error(wrap(decls, "INDOMAIN(r)")) != "");
}

TEST_CASE("list element types must be constrained simple types") {
    CHECK(sema_error("MODULE M; VAR l : LIST OF INTEGER; BEGIN END M.") != "");
    CHECK(sema_ok("MODULE M; VAR l : LIST OF CONSTRAINED INTEGER;"
                  " BEGIN Empty(l) END M."));
}

TEST_CASE("Sum relation selector is checked") {
    std::string decls = "VAR l : LIST OF CONSTRAINED [1..4];\n";
    CHECK(sema_ok(wrap(decls, "Sum(l, '=', 4)")));
    CHECK(sema_error(wrap(decls, "Sum(l, '<', 4)")) != "");
}

TEST_CASE("strong typing: enums, booleans, subranges") {
    CHECK(sema_error(wrap("", "i := blue")) != "");
    CHECK(sema_error(wrap("", "i := TRUE")) != "");
    CHECK(sema_ok(wrap("", "Z.co := blue")));
    CHECK(sema_error(wrap("", "Z.co := 1")) != "");
    CHECK(sema_error(wrap("", "IF i THEN j := 1 END")) != "");
    CHECK(sema_error(wrap("", "i := j < 3")) != ""); // bool into int
}

TEST_CASE("WHILE conditions must not contain unknowns") {
    CHECK(sema_error(wrap("", "WHILE C > 0 DO i := 1 END")) != "");
    CHECK(sema_ok(wrap("", "WHILE i > 0 DO i := i - 1 END")));
}

TEST_CASE("every checked expression carries a static type") {
    CheckedProgram p = check_source(wrap("", "i := X[1] + 2"));
    const auto& assign = std::get<AssignS>(p.module.body[0]->node);
    REQUIRE(assign.rhs->type != nullptr);
    CHECK(assign.rhs->type->is_integer_class());
    const auto& add = std::get<BinE>(assign.rhs->node);
    REQUIRE(add.lhs->type != nullptr);
    CHECK(add.lhs->type->constrained);
}

TEST_CASE("procedure call argument checking") {
    std::string common =
        "MODULE M;\n"
        "VAR g : INTEGER;\n"
        "PROCEDURE P(x : INTEGER; VAR y : INTEGER);\n"
        "BEGIN y := x END P;\n";
    CHECK(sema_ok(common + "BEGIN P(1, g) END M."));
    CHECK(sema_error(common + "BEGIN P(1, 2) END M.") != "");  // VAR needs cell
    CHECK(sema_error(common + "BEGIN P(1) END M.") != "");     // arity
    CHECK(sema_error(common + "BEGIN P(TRUE, g) END M.") != ""); // type
}

TEST_CASE("reserved built-in names cannot be redeclared") {
    CHECK(sema_error("MODULE M; VAR WRITE : INTEGER; BEGIN END M.") != "");
    CHECK(sema_error("MODULE M; CONST Sum = 3; BEGIN END M.") != "");
}

TEST_CASE("the whole corpus passes checking") {
    const char* files[] = {
        "ordered.a0",   "queens8.a0",        "queens8_alldiff.a0",
        "jobshop.a0",   "jobshop_shortest.a0", "freq_backtrack.a0",
        "freq_constraint.a0", "freq_large.a0", "laplace.a0", "region.a0",
    };
    for (const char* f : files) {
        CAPTURE(f);
        std::string src =
            testutil::read_file(std::string(ALMAC_CORPUS_DIR) + "/" + f);
        CHECK_NOTHROW(check_source(src));
    }
}

TEST_CASE("choice-leak annotation spans procedure calls") {
    std::string src =
        "MODULE M;\n"
        "VAR x : INTEGER;\n"
        "PROCEDURE Choose();\n"
        "BEGIN EITHER x := 1 ORELSE x := 2 END END Choose;\n"
        "PROCEDURE Wrap();\n"
        "BEGIN Choose() END Wrap;\n"
        "BEGIN Wrap(); x := x + 1 END M.";
    CheckedProgram p = check_source(src);
    CHECK(p.module.body[0]->leaks_choice);     // Wrap() call
    CHECK_FALSE(p.module.body[1]->leaks_choice);

    // contained constructs do not leak
    CheckedProgram q = check_source(wrap(
        "", "COMMIT EITHER TRUE ORELSE TRUE END END;\n"
            "FORALL SOME i := 1 TO 2 DO TRUE END DO j := j END;\n"
            "NOT (i = 1)"));
    for (const auto& s : q.module.body) CHECK_FALSE(s->leaks_choice);
}
