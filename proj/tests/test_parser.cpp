#include <doctest.h>

#include "helpers.hpp"

using namespace almac;

namespace {

Module parse_ok(const std::string& src) { return parse_source(src); }

const Stmt& only_stmt(const Module& m) {
    REQUIRE(m.body.size() == 1);
    return *m.body[0];
}

} // namespace

TEST_CASE("minimal module") {
    Module m = parse_ok("MODULE M; BEGIN END M.");
    CHECK(m.name == "M");
    CHECK(m.body.empty());
    CHECK(m.decls.empty());
}

TEST_CASE("quantified boolean expression on the right side of an assignment") {
    Module m = parse_ok(
        "MODULE M; VAR ordered : BOOLEAN; i, n : INTEGER;\n"
        "VAR a : ARRAY [1..9] OF INTEGER;\n"
        "BEGIN ordered := FOR i := 1 TO n-1 DO a[i] <= a[i+1] END END M.");
    const auto& assign = std::get<AssignS>(only_stmt(m).node);
    const auto* q = std::get_if<QuantE>(&assign.rhs->node);
    REQUIRE(q != nullptr);
    CHECK_FALSE(q->existential);
    CHECK(q->var == "i");
    CHECK(q->body.size() == 1);
}

TEST_CASE("EITHER with branches parses into a choice node") {
    Module m = parse_ok(
        "MODULE M; VAR x : INTEGER; BEGIN "
        "EITHER x = 1 ORELSE x = 2 END END M.");
    const auto& e = std::get<EitherS>(only_stmt(m).node);
    REQUIRE(e.branches.size() == 2);
    CHECK(e.branches[0].size() == 1);
    CHECK(e.branches[1].size() == 1);
}

TEST_CASE("relations bind tighter than AND and OR") {
    Module m = parse_ok(
        "MODULE M; VAR i, n : INTEGER; b : BOOLEAN; BEGIN "
        "b := i < n AND i > 0 END M.");
    const auto& assign = std::get<AssignS>(only_stmt(m).node);
    const auto* b = std::get_if<BinE>(&assign.rhs->node);
    REQUIRE(b != nullptr);
    CHECK(b->op == BinOp::And);
    CHECK(std::get<BinE>(b->lhs->node).op == BinOp::Lt);
    CHECK(std::get<BinE>(b->rhs->node).op == BinOp::Gt);
}

TEST_CASE("statement-level NOT takes the whole relation") {
    Module m = parse_ok("MODULE M; VAR x : INTEGER; BEGIN NOT x = 1 END M.");
    const auto& n = std::get<NotS>(only_stmt(m).node);
    const auto& inner = std::get<ExprS>(n.body->node);
    CHECK(std::get<BinE>(inner.expr->node).op == BinOp::Eq);
}

TEST_CASE("multi-dimensional indexing and record selectors") {
    Module m = parse_ok(
        "MODULE M; BEGIN gantt[job[i].task[j].processor,h] = i END M.");
    const auto& s = std::get<ExprS>(only_stmt(m).node);
    const auto& eq = std::get<BinE>(s.expr->node);
    const auto* ix = std::get_if<IndexE>(&eq.lhs->node);
    REQUIRE(ix != nullptr);
    CHECK(ix->indices.size() == 2);
}

TEST_CASE("declaration sections in any order, procedures with modes") {
    Module m = parse_ok(
        "MODULE M;\n"
        "CONST N = 3;\n"
        "TYPE T = ARRAY [1..N] OF INTEGER;\n"
        "VAR a : T;\n"
        "PROCEDURE P(x : INTEGER; VAR y : T; MIX z : INTEGER);\n"
        "VAR l : INTEGER;\n"
        "BEGIN l := x END P;\n"
        "CONST K = 4;\n"
        "BEGIN P(K, a, a[1]) END M.");
    int procs = 0, consts = 0;
    for (const auto& d : m.decls) {
        if (std::holds_alternative<ProcDecl>(d)) procs++;
        if (std::holds_alternative<ConstDecl>(d)) consts++;
    }
    CHECK(procs == 1);
    CHECK(consts == 2);
    const auto* p = std::get_if<ProcDecl>(&m.decls[3]);
    REQUIRE(p != nullptr);
    CHECK(p->params[0].mode == ParamMode::Value);
    CHECK(p->params[1].mode == ParamMode::Var);
    CHECK(p->params[2].mode == ParamMode::Mix);
}

TEST_CASE("syntax errors name the expected token and location") {
    try {
        parse_source("MODULE M; BEGIN x := END M.");
        FAIL("expected a syntax error");
    } catch (const CompileError& e) {
        CHECK(e.phase == CompileError::Phase::Parse);
        CHECK(std::string(e.what()).find("expected expression") !=
              std::string::npos);
    }
    CHECK_THROWS_AS(parse_source("MODULE M; BEGIN END Wrong."), CompileError);
    CHECK_THROWS_AS(parse_source("MODULE M; BEGIN EITHER TRUE END END M."),
                    CompileError);
}

TEST_CASE("pretty printing reaches a fixpoint on the corpus") {
    const char* files[] = {
        "ordered.a0",   "queens8.a0",        "queens8_alldiff.a0",
        "jobshop.a0",   "jobshop_shortest.a0", "freq_backtrack.a0",
        "freq_constraint.a0", "freq_large.a0", "laplace.a0", "region.a0",
    };
    for (const char* f : files) {
        CAPTURE(f);
        std::string src =
            testutil::read_file(std::string(ALMAC_CORPUS_DIR) + "/" + f);
        REQUIRE(!src.empty());
        std::string once = pretty_print(parse_source(src));
        std::string twice = pretty_print(parse_source(once));
        CHECK(once == twice);
    }
}

TEST_CASE("pretty printing round-trips the tricky constructs") {
    std::string src =
        "MODULE M;\n"
        "TYPE C = (red, blue);\n"
        "     R = RECORD co : C; No : CONSTRAINED INTEGER; END;\n"
        "VAR x : INTEGER; l : LIST OF CONSTRAINED [1..4];\n"
        "BEGIN\n"
        "  FORALL SOME x := 1 TO 3 DO TRUE END DO x := x END;\n"
        "  COMMIT EITHER TRUE ORELSE FALSE END END;\n"
        "  NOT (x = 1);\n"
        "  IF x = 1 THEN x := 2 ELSIF x = 2 THEN x := 3 ELSE x := 4 END;\n"
        "  WHILE x > 0 DO x := x - 1 END\n"
        "END M.";
    std::string once = pretty_print(parse_source(src));
    std::string twice = pretty_print(parse_source(once));
    CHECK(once == twice);
}
