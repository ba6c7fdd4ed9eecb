#include <doctest.h>

#include "almac/token.hpp"

using namespace almac;

TEST_CASE("assignment statement lexes into its parts") {
    auto toks = tokenize("i := 1;");
    REQUIRE(toks.size() == 5);
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[0].lexeme == "i");
    CHECK(toks[1].sym == Sym::Assign);
    CHECK(toks[2].kind == TokenKind::IntLit);
    CHECK(toks[2].int_val == 1);
    CHECK(toks[3].sym == Sym::Semi);
    CHECK(toks[4].kind == TokenKind::Eof);
}

TEST_CASE("comments are discarded and may nest") {
    auto toks = tokenize("(* c *)BEGIN");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].sym == Sym::KwBEGIN);

    toks = tokenize("(* a (* nested *) b *) END");
    REQUIRE(toks.size() == 2);
    CHECK(toks[0].sym == Sym::KwEND);
}

TEST_CASE("constrained subrange lexes as keyword, brackets and range dots") {
    auto toks = tokenize("CONSTRAINED [1..N]");
    REQUIRE(toks.size() == 7);
    CHECK(toks[0].sym == Sym::KwCONSTRAINED);
    CHECK(toks[0].kind == TokenKind::Keyword);
    CHECK(toks[1].sym == Sym::LBracket);
    CHECK(toks[1].kind == TokenKind::Punct);
    CHECK(toks[2].int_val == 1);
    CHECK(toks[3].sym == Sym::DotDot);
    CHECK(toks[3].kind == TokenKind::Op);
    CHECK(toks[4].lexeme == "N");
    CHECK(toks[5].sym == Sym::RBracket);
}

TEST_CASE("line and column point at the first character of the lexeme") {
    auto toks = tokenize("ab\n  cd");
    CHECK(toks[0].loc.line == 1);
    CHECK(toks[0].loc.column == 1);
    CHECK(toks[1].loc.line == 2);
    CHECK(toks[1].loc.column == 3);
}

TEST_CASE("real literals versus integer ranges") {
    auto toks = tokenize("2.5 1..3");
    CHECK(toks[0].kind == TokenKind::RealLit);
    CHECK(toks[0].real_val == doctest::Approx(2.5));
    CHECK(toks[1].kind == TokenKind::IntLit);
    CHECK(toks[2].sym == Sym::DotDot);
    CHECK(toks[3].kind == TokenKind::IntLit);
}

TEST_CASE("string literals with either quote") {
    auto toks = tokenize("'=' \"ab\"");
    CHECK(toks[0].kind == TokenKind::StringLit);
    CHECK(toks[0].lexeme == "=");
    CHECK(toks[1].lexeme == "ab");
}

TEST_CASE("lexical errors carry a location") {
    CHECK_THROWS_AS(tokenize("(* open"), CompileError);
    CHECK_THROWS_AS(tokenize("'unterminated"), CompileError);
    CHECK_THROWS_AS(tokenize("a ? b"), CompileError);
    try {
        tokenize("\n  ?");
    } catch (const CompileError& e) {
        CHECK(e.loc.line == 2);
        CHECK(e.loc.column == 3);
        CHECK(e.phase == CompileError::Phase::Lex);
    }
}

TEST_CASE("keywords are case sensitive") {
    auto toks = tokenize("begin BEGIN");
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[1].kind == TokenKind::Keyword);
}
