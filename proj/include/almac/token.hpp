#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "almac/diag.hpp"

namespace almac {

enum class TokenKind : uint8_t {
    Keyword,
    Ident,
    IntLit,
    RealLit,
    StringLit,
    Op,
    Punct,
    Eof,
};

// Flat symbol enum so the parser can match on integers instead of lexemes.
enum class Sym : uint8_t {
    // keywords
    KwMODULE, KwBEGIN, KwEND, KwCONST, KwTYPE, KwVAR, KwPROCEDURE,
    KwIF, KwTHEN, KwELSIF, KwELSE, KwWHILE, KwDO, KwFOR, KwTO,
    KwSOME, KwEITHER, KwORELSE, KwFORALL, KwCOMMIT, KwNOT,
    KwAND, KwOR, KwDIV, KwMOD,
    KwARRAY, KwOF, KwRECORD, KwCONSTRAINED, KwLIST,
    KwMIX, KwTRUE, KwFALSE,
    // operators
    Assign, Eq, Neq, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, DotDot,
    // punctuation
    LParen, RParen, LBracket, RBracket, Comma, Semi, Colon, Dot,
    // misc
    Ident, IntLit, RealLit, StringLit, Eof,
};

struct Token {
    TokenKind kind = TokenKind::Eof;
    Sym sym = Sym::Eof;
    std::string lexeme;
    SourceLoc loc;
    int64_t int_val = 0;
    double real_val = 0.0;
};

// Tokenizes a full source text. Comments (* ... *) nest and are discarded.
// The returned sequence always ends with an Eof token. Throws CompileError
// on unterminated comments/strings and illegal characters.
std::vector<Token> tokenize(const std::string& source);

} // namespace almac
