#include "almac/token.hpp"

#include <cctype>
#include <unordered_map>

namespace almac {

namespace {

const std::unordered_map<std::string, Sym>& keyword_table() {
    static const std::unordered_map<std::string, Sym> table = {
        {"MODULE", Sym::KwMODULE}, {"BEGIN", Sym::KwBEGIN}, {"END", Sym::KwEND},
        {"CONST", Sym::KwCONST}, {"TYPE", Sym::KwTYPE}, {"VAR", Sym::KwVAR},
        {"PROCEDURE", Sym::KwPROCEDURE}, {"IF", Sym::KwIF}, {"THEN", Sym::KwTHEN},
        {"ELSIF", Sym::KwELSIF}, {"ELSE", Sym::KwELSE}, {"WHILE", Sym::KwWHILE},
        {"DO", Sym::KwDO}, {"FOR", Sym::KwFOR}, {"TO", Sym::KwTO},
        {"SOME", Sym::KwSOME}, {"EITHER", Sym::KwEITHER}, {"ORELSE", Sym::KwORELSE},
        {"FORALL", Sym::KwFORALL}, {"COMMIT", Sym::KwCOMMIT}, {"NOT", Sym::KwNOT},
        {"AND", Sym::KwAND}, {"OR", Sym::KwOR}, {"DIV", Sym::KwDIV}, {"MOD", Sym::KwMOD},
        {"ARRAY", Sym::KwARRAY}, {"OF", Sym::KwOF}, {"RECORD", Sym::KwRECORD},
        {"CONSTRAINED", Sym::KwCONSTRAINED}, {"LIST", Sym::KwLIST},
        {"MIX", Sym::KwMIX}, {"TRUE", Sym::KwTRUE}, {"FALSE", Sym::KwFALSE},
    };
    return table;
}

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_blank_and_comments();
            if (at_end()) {
                out.push_back(make(TokenKind::Eof, Sym::Eof, loc_, ""));
                return out;
            }
            out.push_back(next_token());
        }
    }

private:
    bool at_end() const { return pos_ >= src_.size(); }
    char peek(size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            loc_.line++;
            loc_.column = 1;
        } else {
            loc_.column++;
        }
        return c;
    }

    [[noreturn]] void fail(SourceLoc at, const std::string& msg) const {
        throw CompileError(CompileError::Phase::Lex, at, msg);
    }

    void skip_blank_and_comments() {
        for (;;) {
            while (!at_end() && std::isspace(static_cast<unsigned char>(peek())))
                advance();
            if (peek() == '(' && peek(1) == '*') {
                SourceLoc start = loc_;
                advance();
                advance();
                int depth = 1;
                while (depth > 0) {
                    if (at_end()) fail(start, "unterminated comment");
                    if (peek() == '(' && peek(1) == '*') {
                        advance(); advance(); depth++;
                    } else if (peek() == '*' && peek(1) == ')') {
                        advance(); advance(); depth--;
                    } else {
                        advance();
                    }
                }
                continue;
            }
            return;
        }
    }

    static Token make(TokenKind kind, Sym sym, SourceLoc loc, std::string lexeme) {
        Token t;
        t.kind = kind;
        t.sym = sym;
        t.loc = loc;
        t.lexeme = std::move(lexeme);
        return t;
    }

    Token next_token() {
        SourceLoc start = loc_;
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return ident_or_keyword(start);
        if (std::isdigit(static_cast<unsigned char>(c)))
            return number(start);
        if (c == '\'' || c == '"')
            return string_lit(start);
        return op_or_punct(start);
    }

    Token ident_or_keyword(SourceLoc start) {
        std::string text;
        while (!at_end() &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            text += advance();
        auto it = keyword_table().find(text);
        if (it != keyword_table().end())
            return make(TokenKind::Keyword, it->second, start, std::move(text));
        return make(TokenKind::Ident, Sym::Ident, start, std::move(text));
    }

    Token number(SourceLoc start) {
        std::string text;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
            text += advance();
        // "1." starts a real literal, "1.." is an integer followed by a range.
        if (peek() == '.' && peek(1) != '.') {
            text += advance();
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail(loc_, "digit expected after decimal point");
            while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                text += advance();
            Token t = make(TokenKind::RealLit, Sym::RealLit, start, text);
            t.real_val = std::stod(text);
            return t;
        }
        Token t = make(TokenKind::IntLit, Sym::IntLit, start, text);
        try {
            t.int_val = std::stoll(text);
        } catch (const std::out_of_range&) {
            fail(start, "integer literal out of range");
        }
        return t;
    }

    Token string_lit(SourceLoc start) {
        char quote = advance();
        std::string text;
        for (;;) {
            if (at_end() || peek() == '\n')
                fail(start, "unterminated string literal");
            char c = advance();
            if (c == quote) break;
            text += c;
        }
        Token t = make(TokenKind::StringLit, Sym::StringLit, start, text);
        return t;
    }

    Token op_or_punct(SourceLoc start) {
        char c = advance();
        switch (c) {
        case ':':
            if (peek() == '=') { advance(); return make(TokenKind::Op, Sym::Assign, start, ":="); }
            return make(TokenKind::Punct, Sym::Colon, start, ":");
        case '=': return make(TokenKind::Op, Sym::Eq, start, "=");
        case '<':
            if (peek() == '>') { advance(); return make(TokenKind::Op, Sym::Neq, start, "<>"); }
            if (peek() == '=') { advance(); return make(TokenKind::Op, Sym::Le, start, "<="); }
            return make(TokenKind::Op, Sym::Lt, start, "<");
        case '>':
            if (peek() == '=') { advance(); return make(TokenKind::Op, Sym::Ge, start, ">="); }
            return make(TokenKind::Op, Sym::Gt, start, ">");
        case '+': return make(TokenKind::Op, Sym::Plus, start, "+");
        case '-': return make(TokenKind::Op, Sym::Minus, start, "-");
        case '*': return make(TokenKind::Op, Sym::Star, start, "*");
        case '/': return make(TokenKind::Op, Sym::Slash, start, "/");
        case '.':
            if (peek() == '.') { advance(); return make(TokenKind::Op, Sym::DotDot, start, ".."); }
            return make(TokenKind::Punct, Sym::Dot, start, ".");
        case '(': return make(TokenKind::Punct, Sym::LParen, start, "(");
        case ')': return make(TokenKind::Punct, Sym::RParen, start, ")");
        case '[': return make(TokenKind::Punct, Sym::LBracket, start, "[");
        case ']': return make(TokenKind::Punct, Sym::RBracket, start, "]");
        case ',': return make(TokenKind::Punct, Sym::Comma, start, ",");
        case ';': return make(TokenKind::Punct, Sym::Semi, start, ";");
        default:
            fail(start, std::string("illegal character '") + c + "'");
        }
    }

    const std::string& src_;
    size_t pos_ = 0;
    SourceLoc loc_{1, 1};
};

} // namespace

std::vector<Token> tokenize(const std::string& source) {
    return Lexer(source).run();
}

} // namespace almac
