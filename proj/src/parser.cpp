#include "almac/parser.hpp"

#include <utility>

namespace almac {

bool is_relation(BinOp op) {
    switch (op) {
    case BinOp::Eq: case BinOp::Neq: case BinOp::Lt:
    case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
        return true;
    default:
        return false;
    }
}

const char* binop_text(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::RealDiv: return "/";
    case BinOp::IntDiv: return "DIV";
    case BinOp::Mod: return "MOD";
    case BinOp::And: return "AND";
    case BinOp::Or: return "OR";
    case BinOp::Eq: return "=";
    case BinOp::Neq: return "<>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    }
    return "?";
}

namespace {

class Parser {
public:
    explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

    Module run() {
        Module m;
        m.loc = cur().loc;
        expect(Sym::KwMODULE, "MODULE");
        m.name = expect_ident("module name");
        expect(Sym::Semi, ";");
        parse_decl_sections(m.decls, /*allow_procs=*/true);
        expect(Sym::KwBEGIN, "BEGIN");
        m.body = parse_stmts();
        expect(Sym::KwEND, "END");
        std::string closer = expect_ident("module name after END");
        if (closer != m.name)
            fail(prev().loc, "END name '" + closer + "' does not match module '" +
                                 m.name + "'");
        expect(Sym::Dot, ".");
        if (cur().sym != Sym::Eof)
            fail(cur().loc, "text after end of module");
        return m;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& prev() const { return toks_[pos_ ? pos_ - 1 : 0]; }
    const Token& peek(size_t n = 1) const {
        size_t i = pos_ + n;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(Sym s) const { return cur().sym == s; }
    bool accept(Sym s) {
        if (!at(s)) return false;
        ++pos_;
        return true;
    }
    const Token& take() { return toks_[pos_++]; }

    [[noreturn]] void fail(SourceLoc loc, const std::string& msg) const {
        throw CompileError(CompileError::Phase::Parse, loc, msg);
    }

    void expect(Sym s, const char* what) {
        if (!accept(s))
            fail(cur().loc, std::string("expected ") + what + ", found '" +
                                describe(cur()) + "'");
    }

    std::string expect_ident(const char* what) {
        if (!at(Sym::Ident))
            fail(cur().loc, std::string("expected ") + what + ", found '" +
                                describe(cur()) + "'");
        return take().lexeme;
    }

    static std::string describe(const Token& t) {
        return t.kind == TokenKind::Eof ? "end of input" : t.lexeme;
    }

    // --- declarations -----------------------------------------------------

    void parse_decl_sections(std::vector<Decl>& out, bool allow_procs) {
        for (;;) {
            if (accept(Sym::KwCONST)) {
                while (at(Sym::Ident)) out.push_back(parse_const_decl());
            } else if (accept(Sym::KwTYPE)) {
                while (at(Sym::Ident)) out.push_back(parse_type_decl());
            } else if (accept(Sym::KwVAR)) {
                while (at(Sym::Ident)) out.push_back(parse_var_decl());
            } else if (at(Sym::KwPROCEDURE)) {
                if (!allow_procs)
                    fail(cur().loc, "nested procedures are not supported");
                out.push_back(parse_proc_decl());
            } else {
                return;
            }
        }
    }

    ConstDecl parse_const_decl() {
        ConstDecl d;
        d.loc = cur().loc;
        d.name = expect_ident("constant name");
        expect(Sym::Eq, "=");
        d.value = parse_expr();
        expect(Sym::Semi, ";");
        return d;
    }

    TypeDecl parse_type_decl() {
        TypeDecl d;
        d.loc = cur().loc;
        d.name = expect_ident("type name");
        expect(Sym::Eq, "=");
        d.type = parse_type_expr();
        expect(Sym::Semi, ";");
        return d;
    }

    VarDecl parse_var_decl() {
        VarDecl d;
        d.loc = cur().loc;
        d.names.push_back(expect_ident("variable name"));
        while (accept(Sym::Comma)) d.names.push_back(expect_ident("variable name"));
        expect(Sym::Colon, ":");
        d.type = parse_type_expr();
        expect(Sym::Semi, ";");
        return d;
    }

    ProcDecl parse_proc_decl() {
        ProcDecl p;
        p.loc = cur().loc;
        expect(Sym::KwPROCEDURE, "PROCEDURE");
        p.name = expect_ident("procedure name");
        if (accept(Sym::LParen)) {
            if (!at(Sym::RParen)) {
                p.params.push_back(parse_param_group());
                while (accept(Sym::Semi)) p.params.push_back(parse_param_group());
            }
            expect(Sym::RParen, ")");
        }
        expect(Sym::Semi, ";");
        for (;;) {
            if (accept(Sym::KwCONST)) {
                while (at(Sym::Ident)) p.consts.push_back(parse_const_decl());
            } else if (accept(Sym::KwVAR)) {
                while (at(Sym::Ident)) p.vars.push_back(parse_var_decl());
            } else {
                break;
            }
        }
        expect(Sym::KwBEGIN, "BEGIN");
        p.body = parse_stmts();
        expect(Sym::KwEND, "END");
        std::string closer = expect_ident("procedure name after END");
        if (closer != p.name)
            fail(prev().loc, "END name '" + closer + "' does not match procedure '" +
                                 p.name + "'");
        expect(Sym::Semi, ";");
        return p;
    }

    Param parse_param_group() {
        Param g;
        g.loc = cur().loc;
        g.mode = ParamMode::Value;
        if (accept(Sym::KwVAR)) g.mode = ParamMode::Var;
        else if (accept(Sym::KwMIX)) g.mode = ParamMode::Mix;
        g.names.push_back(expect_ident("parameter name"));
        while (accept(Sym::Comma)) g.names.push_back(expect_ident("parameter name"));
        expect(Sym::Colon, ":");
        g.type = parse_type_expr();
        return g;
    }

    // --- types -------------------------------------------------------------

    TypeExprPtr parse_type_expr() {
        auto te = std::make_unique<TypeExpr>();
        te->loc = cur().loc;
        if (accept(Sym::KwCONSTRAINED)) {
            ConstrainedTE c;
            c.base = parse_type_expr();
            te->node = std::move(c);
            return te;
        }
        if (accept(Sym::KwARRAY)) {
            ArrayTE a;
            a.dims.push_back(parse_range());
            while (accept(Sym::Comma)) a.dims.push_back(parse_range());
            expect(Sym::KwOF, "OF");
            a.elem = parse_type_expr();
            te->node = std::move(a);
            return te;
        }
        if (accept(Sym::KwRECORD)) {
            RecordTE r;
            while (!at(Sym::KwEND)) {
                RecordFieldTE f;
                f.names.push_back(expect_ident("field name"));
                while (accept(Sym::Comma))
                    f.names.push_back(expect_ident("field name"));
                expect(Sym::Colon, ":");
                f.type = parse_type_expr();
                r.fields.push_back(std::move(f));
                if (!accept(Sym::Semi)) break;
            }
            expect(Sym::KwEND, "END");
            te->node = std::move(r);
            return te;
        }
        if (accept(Sym::KwLIST)) {
            expect(Sym::KwOF, "OF");
            ListTE l;
            l.elem = parse_type_expr();
            te->node = std::move(l);
            return te;
        }
        if (at(Sym::LBracket)) {
            auto [lo, hi] = parse_range();
            SubrangeTE s;
            s.lo = std::move(lo);
            s.hi = std::move(hi);
            te->node = std::move(s);
            return te;
        }
        if (at(Sym::LParen)) {
            take();
            EnumTE e;
            e.members.push_back(expect_ident("enumeration member"));
            while (accept(Sym::Comma))
                e.members.push_back(expect_ident("enumeration member"));
            expect(Sym::RParen, ")");
            te->node = std::move(e);
            return te;
        }
        NamedTE n;
        n.name = expect_ident("type");
        te->node = std::move(n);
        return te;
    }

    std::pair<ExprPtr, ExprPtr> parse_range() {
        expect(Sym::LBracket, "[");
        ExprPtr lo = parse_expr();
        expect(Sym::DotDot, "..");
        ExprPtr hi = parse_expr();
        expect(Sym::RBracket, "]");
        return {std::move(lo), std::move(hi)};
    }

    // --- statements ----------------------------------------------------------

    bool at_stmt_terminator() const {
        switch (cur().sym) {
        case Sym::KwEND: case Sym::KwELSE: case Sym::KwELSIF:
        case Sym::KwORELSE: case Sym::KwDO: case Sym::Eof:
            return true;
        default:
            return false;
        }
    }

    StmtList parse_stmts() {
        StmtList list;
        for (;;) {
            while (accept(Sym::Semi)) {}
            if (at_stmt_terminator()) return list;
            list.push_back(parse_stmt());
            if (!accept(Sym::Semi)) {
                while (accept(Sym::Semi)) {}
                if (!at_stmt_terminator())
                    fail(cur().loc, "expected ';' or end of statement list, found '" +
                                        describe(cur()) + "'");
                return list;
            }
        }
    }

    StmtPtr make_stmt(SourceLoc loc) {
        auto s = std::make_unique<Stmt>();
        s->loc = loc;
        return s;
    }

    StmtPtr parse_stmt() {
        SourceLoc loc = cur().loc;
        switch (cur().sym) {
        case Sym::KwIF: return parse_if();
        case Sym::KwWHILE: return parse_while();
        case Sym::KwFOR: return parse_for(/*existential=*/false);
        case Sym::KwSOME: return parse_for(/*existential=*/true);
        case Sym::KwEITHER: return parse_either();
        case Sym::KwFORALL: return parse_forall();
        case Sym::KwCOMMIT: return parse_commit();
        case Sym::KwNOT: {
            take();
            NotS n;
            n.body = parse_stmt();
            auto s = make_stmt(loc);
            s->node = std::move(n);
            return s;
        }
        default:
            break;
        }
        // Designator-led statement: assignment, call or boolean expression.
        ExprPtr e = parse_expr();
        if (at(Sym::Assign)) {
            if (!std::holds_alternative<NameE>(e->node) &&
                !std::holds_alternative<IndexE>(e->node) &&
                !std::holds_alternative<FieldE>(e->node))
                fail(cur().loc, "left side of ':=' is not a designator");
            take();
            AssignS a;
            a.lhs = std::move(e);
            a.rhs = parse_expr();
            auto s = make_stmt(loc);
            s->node = std::move(a);
            return s;
        }
        if (auto* call = std::get_if<CallE>(&e->node)) {
            CallS c;
            c.name = call->name;
            c.args = std::move(call->args);
            auto s = make_stmt(loc);
            s->node = std::move(c);
            return s;
        }
        ExprS x;
        x.expr = std::move(e);
        auto s = make_stmt(loc);
        s->node = std::move(x);
        return s;
    }

    StmtPtr parse_if() {
        SourceLoc loc = cur().loc;
        expect(Sym::KwIF, "IF");
        IfS node;
        for (;;) {
            IfArm arm;
            arm.cond = parse_expr();
            expect(Sym::KwTHEN, "THEN");
            arm.body = parse_stmts();
            node.arms.push_back(std::move(arm));
            if (!accept(Sym::KwELSIF)) break;
        }
        if (accept(Sym::KwELSE)) node.else_body = parse_stmts();
        expect(Sym::KwEND, "END");
        auto s = make_stmt(loc);
        s->node = std::move(node);
        return s;
    }

    StmtPtr parse_while() {
        SourceLoc loc = cur().loc;
        expect(Sym::KwWHILE, "WHILE");
        WhileS node;
        node.cond = parse_expr();
        expect(Sym::KwDO, "DO");
        node.body = parse_stmts();
        expect(Sym::KwEND, "END");
        auto s = make_stmt(loc);
        s->node = std::move(node);
        return s;
    }

    StmtPtr parse_for(bool existential) {
        SourceLoc loc = cur().loc;
        take(); // FOR or SOME
        ForS node;
        node.existential = existential;
        node.var = expect_ident("index variable");
        expect(Sym::Assign, ":=");
        node.lo = parse_expr();
        expect(Sym::KwTO, "TO");
        node.hi = parse_expr();
        expect(Sym::KwDO, "DO");
        node.body = parse_stmts();
        expect(Sym::KwEND, "END");
        auto s = make_stmt(loc);
        s->node = std::move(node);
        return s;
    }

    StmtPtr parse_either() {
        SourceLoc loc = cur().loc;
        expect(Sym::KwEITHER, "EITHER");
        EitherS node;
        node.branches.push_back(parse_stmts());
        if (!at(Sym::KwORELSE))
            fail(cur().loc, "expected ORELSE, found '" + describe(cur()) + "'");
        while (accept(Sym::KwORELSE)) node.branches.push_back(parse_stmts());
        expect(Sym::KwEND, "END");
        auto s = make_stmt(loc);
        s->node = std::move(node);
        return s;
    }

    StmtPtr parse_forall() {
        SourceLoc loc = cur().loc;
        expect(Sym::KwFORALL, "FORALL");
        ForallS node;
        node.generator = parse_stmts();
        expect(Sym::KwDO, "DO");
        node.body = parse_stmts();
        expect(Sym::KwEND, "END");
        auto s = make_stmt(loc);
        s->node = std::move(node);
        return s;
    }

    StmtPtr parse_commit() {
        SourceLoc loc = cur().loc;
        expect(Sym::KwCOMMIT, "COMMIT");
        CommitS node;
        node.body = parse_stmts();
        expect(Sym::KwEND, "END");
        auto s = make_stmt(loc);
        s->node = std::move(node);
        return s;
    }

    // --- expressions ---------------------------------------------------------
    // Precedence, loosest first: OR, AND, relations, additive, multiplicative,
    // unary. Relations bind tighter than AND/OR and are non-associative.

    ExprPtr make_expr(SourceLoc loc) {
        auto e = std::make_unique<Expr>();
        e->loc = loc;
        return e;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Sym::KwOR)) {
            SourceLoc loc = take().loc;
            BinE b;
            b.op = BinOp::Or;
            b.lhs = std::move(lhs);
            b.rhs = parse_and();
            lhs = make_expr(loc);
            lhs->node = std::move(b);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_rel();
        while (at(Sym::KwAND)) {
            SourceLoc loc = take().loc;
            BinE b;
            b.op = BinOp::And;
            b.lhs = std::move(lhs);
            b.rhs = parse_rel();
            lhs = make_expr(loc);
            lhs->node = std::move(b);
        }
        return lhs;
    }

    ExprPtr parse_rel() {
        ExprPtr lhs = parse_add();
        BinOp op;
        switch (cur().sym) {
        case Sym::Eq: op = BinOp::Eq; break;
        case Sym::Neq: op = BinOp::Neq; break;
        case Sym::Lt: op = BinOp::Lt; break;
        case Sym::Le: op = BinOp::Le; break;
        case Sym::Gt: op = BinOp::Gt; break;
        case Sym::Ge: op = BinOp::Ge; break;
        default: return lhs;
        }
        SourceLoc loc = take().loc;
        BinE b;
        b.op = op;
        b.lhs = std::move(lhs);
        b.rhs = parse_add();
        ExprPtr e = make_expr(loc);
        e->node = std::move(b);
        return e;
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        for (;;) {
            BinOp op;
            if (at(Sym::Plus)) op = BinOp::Add;
            else if (at(Sym::Minus)) op = BinOp::Sub;
            else return lhs;
            SourceLoc loc = take().loc;
            BinE b;
            b.op = op;
            b.lhs = std::move(lhs);
            b.rhs = parse_mul();
            lhs = make_expr(loc);
            lhs->node = std::move(b);
        }
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            BinOp op;
            if (at(Sym::Star)) op = BinOp::Mul;
            else if (at(Sym::Slash)) op = BinOp::RealDiv;
            else if (at(Sym::KwDIV)) op = BinOp::IntDiv;
            else if (at(Sym::KwMOD)) op = BinOp::Mod;
            else return lhs;
            SourceLoc loc = take().loc;
            BinE b;
            b.op = op;
            b.lhs = std::move(lhs);
            b.rhs = parse_unary();
            lhs = make_expr(loc);
            lhs->node = std::move(b);
        }
    }

    ExprPtr parse_unary() {
        SourceLoc loc = cur().loc;
        if (accept(Sym::KwNOT)) {
            UnE u;
            u.op = UnOp::Not;
            u.operand = parse_unary();
            auto e = make_expr(loc);
            e->node = std::move(u);
            return e;
        }
        if (accept(Sym::Minus)) {
            UnE u;
            u.op = UnOp::Neg;
            u.operand = parse_unary();
            auto e = make_expr(loc);
            e->node = std::move(u);
            return e;
        }
        if (accept(Sym::Plus)) {
            UnE u;
            u.op = UnOp::Pos;
            u.operand = parse_unary();
            auto e = make_expr(loc);
            e->node = std::move(u);
            return e;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (at(Sym::LBracket)) {
                SourceLoc loc = take().loc;
                IndexE ix;
                ix.base = std::move(e);
                ix.indices.push_back(parse_expr());
                while (accept(Sym::Comma)) ix.indices.push_back(parse_expr());
                expect(Sym::RBracket, "]");
                e = make_expr(loc);
                e->node = std::move(ix);
            } else if (at(Sym::Dot)) {
                SourceLoc loc = take().loc;
                FieldE f;
                f.base = std::move(e);
                f.field = expect_ident("field name");
                e = make_expr(loc);
                e->node = std::move(f);
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_primary() {
        SourceLoc loc = cur().loc;
        switch (cur().sym) {
        case Sym::IntLit: {
            auto e = make_expr(loc);
            e->node = IntLitE{take().int_val};
            return e;
        }
        case Sym::RealLit: {
            auto e = make_expr(loc);
            e->node = RealLitE{take().real_val};
            return e;
        }
        case Sym::StringLit: {
            auto e = make_expr(loc);
            e->node = StringLitE{take().lexeme};
            return e;
        }
        case Sym::KwTRUE: {
            take();
            auto e = make_expr(loc);
            e->node = BoolLitE{true};
            return e;
        }
        case Sym::KwFALSE: {
            take();
            auto e = make_expr(loc);
            e->node = BoolLitE{false};
            return e;
        }
        case Sym::LParen: {
            take();
            ExprPtr e = parse_expr();
            expect(Sym::RParen, ")");
            return e;
        }
        case Sym::KwFOR:
        case Sym::KwSOME: {
            // quantified boolean expression
            bool existential = cur().sym == Sym::KwSOME;
            take();
            QuantE q;
            q.existential = existential;
            q.var = expect_ident("index variable");
            expect(Sym::Assign, ":=");
            q.lo = parse_expr();
            expect(Sym::KwTO, "TO");
            q.hi = parse_expr();
            expect(Sym::KwDO, "DO");
            q.body = parse_stmts();
            expect(Sym::KwEND, "END");
            auto e = make_expr(loc);
            e->node = std::move(q);
            return e;
        }
        case Sym::Ident: {
            std::string name = take().lexeme;
            if (at(Sym::LParen)) {
                take();
                CallE c;
                c.name = std::move(name);
                if (!at(Sym::RParen)) {
                    c.args.push_back(parse_expr());
                    while (accept(Sym::Comma)) c.args.push_back(parse_expr());
                }
                expect(Sym::RParen, ")");
                auto e = make_expr(loc);
                e->node = std::move(c);
                return e;
            }
            auto e = make_expr(loc);
            e->node = NameE{std::move(name), nullptr};
            return e;
        }
        default:
            fail(loc, "expected expression, found '" + describe(cur()) + "'");
        }
    }

    const std::vector<Token>& toks_;
    size_t pos_ = 0;
};

} // namespace

Module parse(const std::vector<Token>& tokens) {
    return Parser(tokens).run();
}

Module parse_source(const std::string& source) {
    return parse(tokenize(source));
}

} // namespace almac
