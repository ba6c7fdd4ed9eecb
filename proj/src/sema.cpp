#include "almac/sema.hpp"

#include <algorithm>
#include <unordered_map>

#include "almac/parser.hpp"

namespace almac {

namespace {

struct ConstVal {
    enum class K { Int, Real, Bool } k = K::Int;
    int64_t i = 0;
    double r = 0.0;
    bool b = false;
};

class Checker {
public:
    CheckedProgram run(Module m) {
        prog_.module = std::move(m);
        int_t_ = make_integer();
        bool_t_ = make_boolean();
        real_t_ = make_real();
        declare_builtins();
        check_module();
        resolve_leaks();
        return std::move(prog_);
    }

private:
    [[noreturn]] void fail(SourceLoc loc, const std::string& msg) const {
        throw CompileError(CompileError::Phase::Sema, loc, msg);
    }

    Symbol* new_symbol(Symbol::Kind kind, std::string name) {
        prog_.symbols.push_back(Symbol{});
        Symbol& s = prog_.symbols.back();
        s.kind = kind;
        s.name = std::move(name);
        return &s;
    }

    void declare(SourceLoc loc, Symbol* sym) {
        auto& scope = local_scope_ ? *local_scope_ : global_scope_;
        if (scope.count(sym->name))
            fail(loc, "'" + sym->name + "' is already declared");
        if (builtins_.count(sym->name))
            fail(loc, "'" + sym->name + "' is a reserved built-in name");
        scope.emplace(sym->name, sym);
    }

    Symbol* lookup(SourceLoc loc, const std::string& name) {
        if (local_scope_) {
            auto it = local_scope_->find(name);
            if (it != local_scope_->end()) return it->second;
        }
        auto it = global_scope_.find(name);
        if (it != global_scope_.end()) return it->second;
        auto bit = builtins_.find(name);
        if (bit != builtins_.end()) return bit->second;
        fail(loc, "undeclared name '" + name + "'");
    }

    void declare_builtins() {
        auto add = [&](const char* name, Builtin b) {
            Symbol* s = new_symbol(Symbol::Kind::Builtin, name);
            s->builtin = b;
            builtins_.emplace(name, s);
        };
        add("KNOWN", Builtin::Known);
        add("INDOMAIN", Builtin::Indomain);
        add("ALL_DIFFERENT", Builtin::AllDifferent);
        add("AT_MOST", Builtin::AtMost);
        add("Empty", Builtin::ListEmpty);
        add("Insert", Builtin::ListInsert);
        add("Sum", Builtin::Sum);
        add("WRITE", Builtin::Write);
        add("WRITELN", Builtin::WriteLn);
        add("abs", Builtin::Abs);
    }

    // --- constant folding ---------------------------------------------------

    ConstVal fold_const(const Expr& e) {
        if (auto* i = std::get_if<IntLitE>(&e.node)) {
            ConstVal v;
            v.k = ConstVal::K::Int;
            v.i = i->value;
            return v;
        }
        if (auto* r = std::get_if<RealLitE>(&e.node)) {
            ConstVal v;
            v.k = ConstVal::K::Real;
            v.r = r->value;
            return v;
        }
        if (auto* b = std::get_if<BoolLitE>(&e.node)) {
            ConstVal v;
            v.k = ConstVal::K::Bool;
            v.b = b->value;
            return v;
        }
        if (auto* n = std::get_if<NameE>(&e.node)) {
            Symbol* s = lookup(e.loc, n->name);
            if (s->kind != Symbol::Kind::Const)
                fail(e.loc, "'" + n->name + "' is not a constant");
            ConstVal v;
            if (s->type->kind == TypeKind::Real) {
                v.k = ConstVal::K::Real;
                v.r = s->const_real;
            } else if (s->type->kind == TypeKind::Boolean) {
                v.k = ConstVal::K::Bool;
                v.b = s->const_bool;
            } else {
                v.k = ConstVal::K::Int;
                v.i = s->const_int;
            }
            return v;
        }
        if (auto* u = std::get_if<UnE>(&e.node)) {
            ConstVal v = fold_const(*u->operand);
            if (u->op == UnOp::Neg) {
                if (v.k == ConstVal::K::Int) v.i = -v.i;
                else if (v.k == ConstVal::K::Real) v.r = -v.r;
                else fail(e.loc, "cannot negate a boolean constant");
            } else if (u->op == UnOp::Not) {
                if (v.k != ConstVal::K::Bool) fail(e.loc, "NOT needs a boolean");
                v.b = !v.b;
            }
            return v;
        }
        if (auto* b = std::get_if<BinE>(&e.node)) {
            ConstVal l = fold_const(*b->lhs), r = fold_const(*b->rhs);
            if (l.k == ConstVal::K::Int && r.k == ConstVal::K::Int) {
                ConstVal v;
                v.k = ConstVal::K::Int;
                switch (b->op) {
                case BinOp::Add: v.i = l.i + r.i; break;
                case BinOp::Sub: v.i = l.i - r.i; break;
                case BinOp::Mul: v.i = l.i * r.i; break;
                case BinOp::IntDiv:
                    if (r.i == 0) fail(e.loc, "constant division by zero");
                    v.i = l.i / r.i;
                    break;
                case BinOp::Mod:
                    if (r.i == 0) fail(e.loc, "constant division by zero");
                    v.i = l.i % r.i;
                    break;
                default: fail(e.loc, "operator not allowed in constants");
                }
                return v;
            }
            double lr = l.k == ConstVal::K::Real ? l.r : static_cast<double>(l.i);
            double rr = r.k == ConstVal::K::Real ? r.r : static_cast<double>(r.i);
            if (l.k == ConstVal::K::Bool || r.k == ConstVal::K::Bool)
                fail(e.loc, "operator not allowed in constants");
            ConstVal v;
            v.k = ConstVal::K::Real;
            switch (b->op) {
            case BinOp::Add: v.r = lr + rr; break;
            case BinOp::Sub: v.r = lr - rr; break;
            case BinOp::Mul: v.r = lr * rr; break;
            case BinOp::RealDiv:
                if (rr == 0.0) fail(e.loc, "constant division by zero");
                v.r = lr / rr;
                break;
            default: fail(e.loc, "operator not allowed in constants");
            }
            return v;
        }
        fail(e.loc, "expression is not constant");
    }

    int64_t fold_int(const Expr& e) {
        ConstVal v = fold_const(e);
        if (v.k != ConstVal::K::Int) fail(e.loc, "integer constant expected");
        return v.i;
    }

    // --- types ----------------------------------------------------------------

    TypePtr resolve_type(const TypeExpr& te, bool global_level) {
        return std::visit(
            [&](const auto& t) -> TypePtr {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, NamedTE>) {
                    if (t.name == "INTEGER") return int_t_;
                    if (t.name == "BOOLEAN") return bool_t_;
                    if (t.name == "REAL") return real_t_;
                    auto it = types_.find(t.name);
                    if (it == types_.end())
                        fail(te.loc, "unknown type '" + t.name + "'");
                    return it->second;
                } else if constexpr (std::is_same_v<T, EnumTE>) {
                    if (!global_level)
                        fail(te.loc, "enumeration types must be declared at the outer level");
                    auto ty = std::make_shared<Type>();
                    ty->kind = TypeKind::Enum;
                    ty->members = t.members;
                    ty->enum_tag = ty.get();
                    for (size_t i = 0; i < t.members.size(); ++i) {
                        Symbol* s = new_symbol(Symbol::Kind::EnumLit, t.members[i]);
                        s->type = ty;
                        s->enum_index = static_cast<int64_t>(i);
                        declare(te.loc, s);
                    }
                    return ty;
                } else if constexpr (std::is_same_v<T, SubrangeTE>) {
                    auto ty = std::make_shared<Type>();
                    ty->kind = TypeKind::Subrange;
                    ty->lo = fold_int(*t.lo);
                    ty->hi = fold_int(*t.hi);
                    if (ty->lo > ty->hi)
                        fail(te.loc, "empty subrange [" + std::to_string(ty->lo) +
                                         ".." + std::to_string(ty->hi) + "]");
                    return ty;
                } else if constexpr (std::is_same_v<T, ArrayTE>) {
                    TypePtr elem = resolve_type(*t.elem, global_level);
                    TypePtr out = elem;
                    for (size_t d = t.dims.size(); d-- > 0;) {
                        auto ty = std::make_shared<Type>();
                        ty->kind = TypeKind::Array;
                        ty->index_lo = fold_int(*t.dims[d].first);
                        ty->index_hi = fold_int(*t.dims[d].second);
                        if (ty->index_lo > ty->index_hi)
                            fail(te.loc, "empty array index range");
                        ty->elem = out;
                        out = ty;
                    }
                    return out;
                } else if constexpr (std::is_same_v<T, RecordTE>) {
                    auto ty = std::make_shared<Type>();
                    ty->kind = TypeKind::Record;
                    for (const auto& group : t.fields) {
                        TypePtr ft = resolve_type(*group.type, global_level);
                        for (const auto& fname : group.names) {
                            if (ty->field_index(fname) >= 0)
                                fail(te.loc, "duplicate field '" + fname + "'");
                            ty->fields.push_back({fname, ft});
                        }
                    }
                    return ty;
                } else if constexpr (std::is_same_v<T, ListTE>) {
                    TypePtr elem = resolve_type(*t.elem, global_level);
                    if (!elem->constrained || !elem->is_simple())
                        fail(te.loc, "LIST elements must have a constrained simple type");
                    auto ty = std::make_shared<Type>();
                    ty->kind = TypeKind::List;
                    ty->elem = elem;
                    return ty;
                } else { // ConstrainedTE
                    TypePtr base = resolve_type(*t.base, global_level);
                    if (!base->is_simple())
                        fail(te.loc, "CONSTRAINED applies to simple types only");
                    if (base->constrained)
                        fail(te.loc, "type is already constrained");
                    auto ty = std::make_shared<Type>(*base);
                    ty->constrained = true;
                    return ty;
                }
            },
            te.node);
    }

    // --- declarations ------------------------------------------------------------

    void check_module() {
        Module& m = prog_.module;
        for (Decl& d : m.decls) {
            std::visit(
                [&](auto& decl) {
                    using T = std::decay_t<decltype(decl)>;
                    if constexpr (std::is_same_v<T, ConstDecl>) {
                        declare_const(decl);
                    } else if constexpr (std::is_same_v<T, TypeDecl>) {
                        TypePtr ty = resolve_type(*decl.type, true);
                        if (ty->name.empty()) ty->name = decl.name;
                        if (types_.count(decl.name) || global_scope_.count(decl.name))
                            fail(decl.loc, "'" + decl.name + "' is already declared");
                        types_.emplace(decl.name, ty);
                    } else if constexpr (std::is_same_v<T, VarDecl>) {
                        TypePtr ty = resolve_type(*decl.type, true);
                        for (const std::string& name : decl.names) {
                            Symbol* s = new_symbol(Symbol::Kind::Var, name);
                            s->type = ty;
                            s->global = true;
                            s->slot = prog_.global_slots++;
                            declare(decl.loc, s);
                            prog_.globals.push_back(s);
                        }
                    } else {
                        declare_proc_header(decl);
                    }
                },
                d);
        }
        // bodies after all headers so procedures may call forward
        for (Decl& d : m.decls)
            if (auto* p = std::get_if<ProcDecl>(&d)) check_proc_body(*p);

        check_stmts(m.body);
    }

    void declare_const(ConstDecl& decl) {
        ConstVal v = fold_const(*decl.value);
        Symbol* s = new_symbol(Symbol::Kind::Const, decl.name);
        switch (v.k) {
        case ConstVal::K::Int:
            s->type = int_t_;
            s->const_int = v.i;
            break;
        case ConstVal::K::Real:
            s->type = real_t_;
            s->const_real = v.r;
            s->is_real_const = true;
            break;
        case ConstVal::K::Bool:
            s->type = bool_t_;
            s->const_bool = v.b;
            break;
        }
        declare(decl.loc, s);
    }

    void declare_proc_header(ProcDecl& decl) {
        Symbol* ps = new_symbol(Symbol::Kind::Proc, decl.name);
        ps->proc = &decl;
        declare(decl.loc, ps);
        int slot = 0;
        for (Param& group : decl.params) {
            TypePtr ty = resolve_type(*group.type, false);
            if (group.mode != ParamMode::Var && ty->contains_constrained())
                fail(group.loc,
                     "constrained formal parameters must be passed by VAR");
            for (const std::string& name : group.names) {
                Symbol* s = new_symbol(Symbol::Kind::Var, name);
                s->type = ty;
                s->global = false;
                s->slot = slot++;
                s->mode = group.mode;
                s->is_alias = group.mode != ParamMode::Value;
                ps->param_syms.push_back(s);
            }
        }
        ps->frame_slots = slot;
        proc_syms_.emplace(&decl, ps);
    }

    void check_proc_body(ProcDecl& decl) {
        Symbol* ps = proc_syms_.at(&decl);
        std::unordered_map<std::string, Symbol*> scope;
        for (const Symbol* p : ps->param_syms) {
            if (scope.count(p->name))
                fail(decl.loc, "duplicate parameter '" + p->name + "'");
            scope.emplace(p->name, const_cast<Symbol*>(p));
        }
        local_scope_ = &scope;

        int slot = ps->frame_slots;
        for (ConstDecl& c : decl.consts) declare_const(c);
        for (VarDecl& v : decl.vars) {
            TypePtr ty = resolve_type(*v.type, false);
            if (ty->contains_constrained())
                fail(v.loc, "local unknowns are not allowed; constrained types "
                            "can only be introduced at the outer level");
            for (const std::string& name : v.names) {
                Symbol* s = new_symbol(Symbol::Kind::Var, name);
                s->type = ty;
                s->global = false;
                s->slot = slot++;
                ps->local_syms.push_back(s);
                declare(v.loc, s);
            }
        }
        ps->frame_slots = slot;

        check_stmts(decl.body);
        local_scope_ = nullptr;
    }

    // --- expressions -----------------------------------------------------------

    static bool is_designator(const Expr& e) {
        if (std::holds_alternative<NameE>(e.node)) {
            const auto& n = std::get<NameE>(e.node);
            return n.sym && n.sym->kind == Symbol::Kind::Var;
        }
        if (const auto* ix = std::get_if<IndexE>(&e.node))
            return is_designator(*ix->base);
        if (const auto* f = std::get_if<FieldE>(&e.node))
            return is_designator(*f->base);
        return false;
    }

    // Base-kind compatibility for expression operands, ignoring CONSTRAINED.
    static bool operands_compatible(const Type& a, const Type& b) {
        bool a_num = a.is_integer_class() || a.kind == TypeKind::Real;
        bool b_num = b.is_integer_class() || b.kind == TypeKind::Real;
        if (a_num && b_num) return true;
        if (a.kind == TypeKind::Boolean && b.kind == TypeKind::Boolean) return true;
        if (a.kind == TypeKind::Enum && b.kind == TypeKind::Enum)
            return a.enum_tag == b.enum_tag;
        return false;
    }

    static bool chain_index_mentions(const Expr& e) {
        if (const auto* ix = std::get_if<IndexE>(&e.node)) {
            for (const auto& idx : ix->indices)
                if (idx->mentions_unknown) return true;
            return chain_index_mentions(*ix->base);
        }
        if (const auto* f = std::get_if<FieldE>(&e.node))
            return chain_index_mentions(*f->base);
        return false;
    }

    TypePtr check_expr(Expr& e) {
        TypePtr t = check_expr_inner(e);
        e.type = t;
        return t;
    }

    // Positions where unknowns may not occur at all (loop bounds, WHILE
    // conditions handle constraints separately, assignment targets).
    TypePtr check_expr_restricted(Expr& e) {
        TypePtr t = check_expr(e);
        if (e.mentions_unknown)
            fail(e.loc, "unknowns can appear only within constraints, "
                        "assignment right sides or call arguments");
        return t;
    }

    TypePtr check_expr_inner(Expr& e) {
        if (auto* lit = std::get_if<IntLitE>(&e.node)) {
            (void)lit;
            return int_t_;
        }
        if (std::holds_alternative<RealLitE>(e.node)) return real_t_;
        if (std::holds_alternative<BoolLitE>(e.node)) return bool_t_;
        if (std::holds_alternative<StringLitE>(e.node))
            fail(e.loc, "string literals are only allowed as WRITE arguments "
                        "and Sum relation selectors");

        if (auto* n = std::get_if<NameE>(&e.node)) {
            Symbol* s = lookup(e.loc, n->name);
            n->sym = s;
            switch (s->kind) {
            case Symbol::Kind::Var:
                if (s->type->contains_constrained()) e.mentions_unknown = true;
                return s->type;
            case Symbol::Kind::Const:
                return s->type;
            case Symbol::Kind::EnumLit:
                return s->type;
            default:
                fail(e.loc, "'" + n->name + "' cannot be used as a value");
            }
        }

        if (auto* ix = std::get_if<IndexE>(&e.node)) {
            TypePtr base = check_expr(*ix->base);
            TypePtr cur = base;
            for (ExprPtr& idx : ix->indices) {
                if (cur->kind != TypeKind::Array)
                    fail(e.loc, "too many indices (not an array)");
                TypePtr it = check_expr(*idx);
                if (!it->is_integer_class())
                    fail(idx->loc, "array index must be an integer");
                cur = cur->elem;
            }
            // selecting a plain component of a compound that holds unknowns
            // elsewhere does not mention an unknown; index expressions do
            e.mentions_unknown =
                chain_index_mentions(e) || cur->contains_constrained();
            return cur;
        }

        if (auto* f = std::get_if<FieldE>(&e.node)) {
            TypePtr base = check_expr(*f->base);
            if (base->kind != TypeKind::Record)
                fail(e.loc, "'.' selector on a non-record value");
            int idx = base->field_index(f->field);
            if (idx < 0) fail(e.loc, "no field named '" + f->field + "'");
            f->field_index = idx;
            TypePtr ft = base->fields[static_cast<size_t>(idx)].type;
            e.mentions_unknown =
                chain_index_mentions(e) || ft->contains_constrained();
            return ft;
        }

        if (auto* u = std::get_if<UnE>(&e.node)) {
            TypePtr t = check_expr(*u->operand);
            e.mentions_unknown = u->operand->mentions_unknown;
            switch (u->op) {
            case UnOp::Not:
                if (t->kind != TypeKind::Boolean)
                    fail(e.loc, "NOT needs a boolean operand");
                return bool_t_;
            default:
                if (t->is_integer_class()) return int_t_;
                if (t->kind == TypeKind::Real) return real_t_;
                fail(e.loc, "unary +/- needs a numeric operand");
            }
        }

        if (auto* b = std::get_if<BinE>(&e.node)) {
            TypePtr lt = check_expr(*b->lhs);
            TypePtr rt = check_expr(*b->rhs);
            e.mentions_unknown =
                b->lhs->mentions_unknown || b->rhs->mentions_unknown;
            bool l_int = lt->is_integer_class(), r_int = rt->is_integer_class();
            bool l_real = lt->kind == TypeKind::Real, r_real = rt->kind == TypeKind::Real;
            switch (b->op) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul:
                if (l_int && r_int) return int_t_;
                if ((l_real || l_int) && (r_real || r_int)) return real_t_;
                fail(e.loc, "arithmetic needs numeric operands");
            case BinOp::RealDiv:
                if ((l_real || l_int) && (r_real || r_int)) return real_t_;
                fail(e.loc, "'/' needs numeric operands");
            case BinOp::IntDiv:
            case BinOp::Mod:
                if (l_int && r_int) return int_t_;
                fail(e.loc, "DIV/MOD need integer operands");
            case BinOp::And:
            case BinOp::Or:
                if (lt->kind != TypeKind::Boolean || rt->kind != TypeKind::Boolean)
                    fail(e.loc, "AND/OR need boolean operands");
                if (e.mentions_unknown)
                    fail(e.loc, "constraints cannot be combined with AND/OR; "
                                "use ';' or EITHER/ORELSE");
                return bool_t_;
            default: { // relations
                if (lt->kind == TypeKind::Record || lt->kind == TypeKind::Array) {
                    if (b->op != BinOp::Eq && b->op != BinOp::Neq)
                        fail(e.loc, "compound values admit only = and <>");
                    if (!same_type(*lt, *rt))
                        fail(e.loc, "compound comparison needs identical types");
                    if (lt->contains_constrained())
                        fail(e.loc, "constraints must relate simple values");
                    return bool_t_;
                }
                if (!operands_compatible(*lt, *rt))
                    fail(e.loc, "incomparable operand types");
                if (lt->kind == TypeKind::Boolean &&
                    b->op != BinOp::Eq && b->op != BinOp::Neq)
                    fail(e.loc, "booleans admit only = and <>");
                return bool_t_;
            }
            }
        }

        if (auto* c = std::get_if<CallE>(&e.node)) {
            Symbol* s = lookup(e.loc, c->name);
            c->sym = s;
            if (s->kind != Symbol::Kind::Builtin)
                fail(e.loc, "procedure '" + c->name + "' does not return a value");
            switch (s->builtin) {
            case Builtin::Abs: {
                if (c->args.size() != 1) fail(e.loc, "abs takes one argument");
                TypePtr t = check_expr(*c->args[0]);
                if (!t->is_integer_class())
                    fail(e.loc, "abs needs an integer argument");
                e.mentions_unknown = c->args[0]->mentions_unknown;
                return int_t_;
            }
            case Builtin::Known: {
                if (c->args.size() != 1) fail(e.loc, "KNOWN takes one argument");
                TypePtr t = check_expr(*c->args[0]);
                if (!is_designator(*c->args[0]))
                    fail(e.loc, "KNOWN needs a variable or unknown");
                if (!t->is_simple())
                    fail(e.loc, "KNOWN applies to simple-typed variables");
                // KNOWN is a meta test: it never turns the context into a
                // constraint, so the unknown mention stops here.
                e.mentions_unknown = false;
                return bool_t_;
            }
            default:
                fail(e.loc, "'" + c->name + "' cannot be used in an expression");
            }
        }

        if (auto* q = std::get_if<QuantE>(&e.node)) {
            check_index_var(e.loc, q->var, &q->sym);
            check_expr_restricted(*q->lo);
            check_expr_restricted(*q->hi);
            require_int(*q->lo);
            require_int(*q->hi);
            check_stmts(q->body);
            // executed in a sandbox; yields a plain boolean
            e.mentions_unknown = false;
            return bool_t_;
        }

        fail(e.loc, "malformed expression");
    }

    void require_int(const Expr& e) {
        if (!e.type->is_integer_class())
            fail(e.loc, "integer expression expected");
    }

    void check_index_var(SourceLoc loc, const std::string& name,
                         const Symbol** out) {
        Symbol* s = lookup(loc, name);
        if (s->kind != Symbol::Kind::Var)
            fail(loc, "index variable '" + name + "' is not a variable");
        if (!s->type->is_integer_class() || s->type->constrained)
            fail(loc, "index variable '" + name +
                          "' must be a plain integer variable");
        *out = s;
    }

    // --- constraint validation ---------------------------------------------------

    // Checks linearity of an arithmetic side of a constraint.
    void check_linear(const Expr& e) {
        if (!e.mentions_unknown) return; // evaluated to a value at run time
        if (std::holds_alternative<NameE>(e.node) ||
            std::holds_alternative<IndexE>(e.node) ||
            std::holds_alternative<FieldE>(e.node)) {
            if (const auto* ix = std::get_if<IndexE>(&e.node)) {
                // unknown-bearing subscripts suspend; only arrays that hold
                // unknowns can stay symbolic
                TypePtr base = ix->base->type;
                TypePtr cur = base;
                for (const ExprPtr& idx : ix->indices) {
                    if (idx->mentions_unknown && !cur->elem->contains_constrained())
                        fail(idx->loc,
                             "unknown subscript on an array of plain values");
                    check_linear(*idx);
                    cur = cur->elem;
                }
                check_linear(*ix->base);
            } else if (const auto* f = std::get_if<FieldE>(&e.node)) {
                check_linear(*f->base);
            }
            return;
        }
        if (const auto* u = std::get_if<UnE>(&e.node)) {
            if (u->op == UnOp::Not)
                fail(e.loc, "NOT cannot appear inside constraint arithmetic");
            check_linear(*u->operand);
            return;
        }
        if (const auto* b = std::get_if<BinE>(&e.node)) {
            switch (b->op) {
            case BinOp::Add:
            case BinOp::Sub:
                check_linear(*b->lhs);
                check_linear(*b->rhs);
                return;
            case BinOp::Mul:
                if (b->lhs->mentions_unknown && b->rhs->mentions_unknown)
                    fail(e.loc, "nonlinear constraint: product of unknowns");
                check_linear(*b->lhs);
                check_linear(*b->rhs);
                return;
            case BinOp::RealDiv:
                if (b->rhs->mentions_unknown)
                    fail(e.loc, "nonlinear constraint: division by an unknown");
                check_linear(*b->lhs);
                return;
            case BinOp::IntDiv:
            case BinOp::Mod:
                fail(e.loc, "DIV/MOD cannot involve unknowns in a constraint");
            default:
                fail(e.loc, "boolean operator inside constraint arithmetic");
            }
        }
        if (const auto* c = std::get_if<CallE>(&e.node)) {
            if (c->sym->builtin == Builtin::Abs)
                fail(e.loc, "abs cannot be applied to unknowns in a constraint");
            return;
        }
        fail(e.loc, "unsupported constraint form");
    }

    void validate_constraint(Expr& e) {
        if (auto* u = std::get_if<UnE>(&e.node)) {
            if (u->op == UnOp::Not) {
                validate_constraint(*u->operand);
                return;
            }
        }
        if (auto* b = std::get_if<BinE>(&e.node)) {
            if (is_relation(b->op)) {
                bool real_world = b->lhs->type->kind == TypeKind::Real ||
                                  b->rhs->type->kind == TypeKind::Real;
                if (real_world && b->op != BinOp::Eq)
                    fail(e.loc, "real constraints support only '='");
                check_linear(*b->lhs);
                check_linear(*b->rhs);
                return;
            }
            fail(e.loc, "unsupported constraint form");
        }
        // bare boolean unknown (possibly via designator)
        if ((std::holds_alternative<NameE>(e.node) ||
             std::holds_alternative<IndexE>(e.node) ||
             std::holds_alternative<FieldE>(e.node)) &&
            e.type->kind == TypeKind::Boolean && e.type->constrained)
            return;
        fail(e.loc, "unsupported constraint form");
    }

    // Boolean test position (statement, IF condition). Marks constraints.
    void check_test_expr(Expr& e, bool constraints_allowed) {
        TypePtr t = check_expr(e);
        if (t->kind != TypeKind::Boolean)
            fail(e.loc, "boolean expression expected");
        if (e.mentions_unknown) {
            if (!constraints_allowed)
                fail(e.loc, "constraints are not allowed here");
            e.is_constraint = true;
            validate_constraint(e);
        }
    }

    // --- statements ------------------------------------------------------------------

    void check_stmts(StmtList& list) {
        for (StmtPtr& s : list) check_stmt(*s);
    }

    void check_stmt(Stmt& stmt) {
        if (auto* a = std::get_if<AssignS>(&stmt.node)) {
            TypePtr lt = check_expr(*a->lhs);
            if (!is_designator(*a->lhs))
                fail(a->lhs->loc, "assignment target is not a variable");
            if (lt->contains_constrained())
                fail(a->lhs->loc,
                     "illegal assignment: the left side is an unknown or "
                     "contains one; unknowns are constrained, never assigned");
            if (a->lhs->mentions_unknown)
                fail(a->lhs->loc, "unknowns cannot appear in an assignment target");
            TypePtr rt = check_expr(*a->rhs);
            if (!assignable(*lt, *rt))
                fail(a->rhs->loc, "type mismatch in assignment");
            return;
        }
        if (auto* x = std::get_if<ExprS>(&stmt.node)) {
            // a bare procedure name is a parameterless call
            if (auto* n = std::get_if<NameE>(&x->expr->node)) {
                Symbol* s = lookup(x->expr->loc, n->name);
                if (s->kind == Symbol::Kind::Proc ||
                    s->kind == Symbol::Kind::Builtin) {
                    CallS call;
                    call.name = n->name;
                    stmt.node = std::move(call);
                    check_stmt(stmt);
                    return;
                }
            }
            check_test_expr(*x->expr, true);
            return;
        }
        if (auto* c = std::get_if<CallS>(&stmt.node)) {
            check_call(stmt, *c);
            return;
        }
        if (auto* f = std::get_if<IfS>(&stmt.node)) {
            for (IfArm& arm : f->arms) {
                check_test_expr(*arm.cond, true);
                check_stmts(arm.body);
            }
            check_stmts(f->else_body);
            return;
        }
        if (auto* w = std::get_if<WhileS>(&stmt.node)) {
            check_test_expr(*w->cond, false);
            check_stmts(w->body);
            return;
        }
        if (auto* f = std::get_if<ForS>(&stmt.node)) {
            check_index_var(stmt.loc, f->var, &f->sym);
            check_expr_restricted(*f->lo);
            check_expr_restricted(*f->hi);
            require_int(*f->lo);
            require_int(*f->hi);
            check_stmts(f->body);
            return;
        }
        if (auto* e = std::get_if<EitherS>(&stmt.node)) {
            for (StmtList& b : e->branches) check_stmts(b);
            return;
        }
        if (auto* f = std::get_if<ForallS>(&stmt.node)) {
            check_stmts(f->generator);
            check_stmts(f->body);
            return;
        }
        if (auto* c = std::get_if<CommitS>(&stmt.node)) {
            check_stmts(c->body);
            return;
        }
        auto& n = std::get<NotS>(stmt.node);
        check_stmt(*n.body);
    }

    bool assignable(const Type& lhs, const Type& rhs) {
        if (compatible(lhs, rhs)) return true;
        if (lhs.kind == TypeKind::Real && rhs.is_integer_class()) return true;
        // reading a determined constrained value into a plain variable
        if (rhs.constrained) {
            Type plain = rhs;
            plain.constrained = false;
            return assignable(lhs, plain);
        }
        return false;
    }

    void check_call(Stmt& stmt, CallS& c) {
        Symbol* s = lookup(stmt.loc, c.name);
        c.sym = s;
        if (s->kind == Symbol::Kind::Proc) {
            check_proc_call(stmt.loc, c, s);
            return;
        }
        if (s->kind != Symbol::Kind::Builtin)
            fail(stmt.loc, "'" + c.name + "' is not a procedure");
        switch (s->builtin) {
        case Builtin::Known:
        case Builtin::Abs: {
            // value-returning built-in in statement position: re-check the
            // statement as a boolean expression statement
            auto call = std::make_unique<Expr>();
            call->loc = stmt.loc;
            CallE ce;
            ce.name = c.name;
            ce.args = std::move(c.args);
            call->node = std::move(ce);
            ExprS xs;
            xs.expr = std::move(call);
            stmt.node = std::move(xs);
            check_stmt(stmt);
            return;
        }
        case Builtin::Write: {
            if (c.args.empty()) fail(stmt.loc, "WRITE needs an argument");
            for (ExprPtr& a : c.args) check_write_arg(*a);
            return;
        }
        case Builtin::WriteLn: {
            for (ExprPtr& a : c.args) check_write_arg(*a);
            return;
        }
        case Builtin::Indomain: {
            if (c.args.size() != 1) fail(stmt.loc, "INDOMAIN takes one argument");
            TypePtr t = check_expr(*c.args[0]);
            if (!is_designator(*c.args[0]))
                fail(stmt.loc, "INDOMAIN needs an unknown, array or list");
            TypePtr elem = unknown_aggregate_elem(t);
            if (!elem || !elem->is_finite())
                fail(stmt.loc, "INDOMAIN needs unknowns of a finite type "
                               "(BOOLEAN, enumeration or subrange)");
            return;
        }
        case Builtin::AllDifferent: {
            if (c.args.size() != 1)
                fail(stmt.loc, "ALL_DIFFERENT takes one argument");
            TypePtr t = check_expr(*c.args[0]);
            if (!is_designator(*c.args[0]) || !unknown_aggregate_elem(t) ||
                unknown_aggregate_elem(t)->kind == TypeKind::Real)
                fail(stmt.loc, "ALL_DIFFERENT needs an array or list of "
                               "finite-domain unknowns");
            return;
        }
        case Builtin::AtMost: {
            if (c.args.size() != 3)
                fail(stmt.loc, "AT_MOST takes (count, unknowns, value)");
            check_expr(*c.args[0]);
            require_int(*c.args[0]);
            TypePtr t = check_expr(*c.args[1]);
            TypePtr elem =
                is_designator(*c.args[1]) ? unknown_aggregate_elem(t) : nullptr;
            if (!elem || elem->kind == TypeKind::Real)
                fail(stmt.loc, "AT_MOST needs an array or list of finite-domain "
                               "unknowns");
            TypePtr vt = check_expr(*c.args[2]);
            if (!operands_compatible(*elem, *vt) || vt->kind == TypeKind::Real)
                fail(c.args[2]->loc, "AT_MOST value does not match the element type");
            return;
        }
        case Builtin::ListEmpty: {
            if (c.args.size() != 1) fail(stmt.loc, "Empty takes one list");
            TypePtr t = check_expr(*c.args[0]);
            if (!is_designator(*c.args[0]) || t->kind != TypeKind::List)
                fail(stmt.loc, "Empty needs a LIST variable");
            return;
        }
        case Builtin::ListInsert: {
            if (c.args.size() != 2) fail(stmt.loc, "Insert takes (list, unknown)");
            TypePtr lt = check_expr(*c.args[0]);
            if (!is_designator(*c.args[0]) || lt->kind != TypeKind::List)
                fail(stmt.loc, "Insert needs a LIST variable");
            TypePtr ut = check_expr(*c.args[1]);
            if (!is_designator(*c.args[1]) || !ut->constrained)
                fail(c.args[1]->loc, "Insert needs an unknown");
            if (!operands_compatible(*lt->elem, *ut))
                fail(c.args[1]->loc, "element type does not match the list");
            return;
        }
        case Builtin::Sum: {
            if (c.args.size() != 3)
                fail(stmt.loc, "Sum takes (list, relation, bound)");
            TypePtr lt = check_expr(*c.args[0]);
            if (!is_designator(*c.args[0]) || lt->kind != TypeKind::List ||
                !lt->elem->is_integer_class())
                fail(stmt.loc, "Sum needs a LIST of integer unknowns");
            auto* rel = std::get_if<StringLitE>(&c.args[1]->node);
            if (!rel || (rel->value != "=" && rel->value != "<=" &&
                         rel->value != ">="))
                fail(c.args[1]->loc, "Sum relation must be '=', '<=' or '>='");
            check_expr(*c.args[2]);
            require_int(*c.args[2]);
            return;
        }
        }
    }

    void check_write_arg(Expr& e) {
        if (std::holds_alternative<StringLitE>(e.node)) return;
        TypePtr t = check_expr(e);
        if (!t->is_simple())
            fail(e.loc, "WRITE needs a simple-typed value or a string");
    }

    // For INDOMAIN/ALL_DIFFERENT/AT_MOST arguments: the constrained element
    // type of an unknown, an array of unknowns, or a list.
    static TypePtr unknown_aggregate_elem(const TypePtr& t) {
        if (t->constrained) return t;
        if (t->kind == TypeKind::List) return t->elem;
        if (t->kind == TypeKind::Array) {
            TypePtr cur = t;
            while (cur->kind == TypeKind::Array) cur = cur->elem;
            return cur->constrained ? cur : nullptr;
        }
        return nullptr;
    }

    void check_proc_call(SourceLoc loc, CallS& c, Symbol* ps) {
        const auto& params = ps->param_syms;
        if (c.args.size() != params.size())
            fail(loc, "'" + c.name + "' expects " +
                          std::to_string(params.size()) + " argument(s)");
        for (size_t i = 0; i < params.size(); ++i) {
            const Symbol* p = params[i];
            Expr& arg = *c.args[i];
            TypePtr at = check_expr(arg);
            if (p->mode == ParamMode::Value) {
                if (!value_passable(*p->type, *at))
                    fail(arg.loc, "argument type mismatch");
            } else {
                if (!is_designator(arg))
                    fail(arg.loc, p->mode == ParamMode::Var
                                      ? "VAR argument must be a designator"
                                      : "MIX argument must be a designator");
                if (!same_type(*p->type, *at))
                    fail(arg.loc, "VAR/MIX argument type must match exactly");
            }
        }
    }

    bool value_passable(const Type& formal, const Type& actual) {
        if (assignable(formal, actual)) return true;
        // compound actuals containing unknowns are evaluated element-wise
        if (actual.contains_constrained()) {
            if (formal.kind != actual.kind) return false;
            if (actual.kind == TypeKind::Array)
                return formal.index_lo == actual.index_lo &&
                       formal.index_hi == actual.index_hi &&
                       value_passable(*formal.elem, *actual.elem);
            if (actual.kind == TypeKind::Record) {
                if (formal.fields.size() != actual.fields.size()) return false;
                for (size_t i = 0; i < formal.fields.size(); ++i)
                    if (formal.fields[i].name != actual.fields[i].name ||
                        !value_passable(*formal.fields[i].type,
                                        *actual.fields[i].type))
                        return false;
                return true;
            }
            if (actual.is_simple()) {
                Type plain = actual;
                plain.constrained = false;
                return assignable(formal, plain);
            }
        }
        return false;
    }

    // --- choice-leak annotation ---------------------------------------------------

    void resolve_leaks() {
        // fixpoint over the call graph
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& [decl, sym] : proc_syms_) {
                if (sym->proc_leaks_choice) continue;
                bool leaks = false;
                for (const StmtPtr& s : decl->body)
                    leaks |= stmt_leaks(*s);
                if (leaks) {
                    sym->proc_leaks_choice = true;
                    changed = true;
                }
            }
        }
        for (auto& [decl, sym] : proc_syms_)
            annotate(const_cast<ProcDecl*>(decl)->body);
        annotate(prog_.module.body);
    }

    bool stmt_leaks(const Stmt& stmt) {
        return std::visit(
            [&](const auto& n) -> bool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ForS>) {
                    if (n.existential) return true;
                    bool b = false;
                    for (const StmtPtr& s : n.body) b |= stmt_leaks(*s);
                    return b;
                } else if constexpr (std::is_same_v<T, EitherS>) {
                    return true;
                } else if constexpr (std::is_same_v<T, CallS>) {
                    if (n.sym && n.sym->kind == Symbol::Kind::Proc)
                        return n.sym->proc_leaks_choice;
                    return n.sym && n.sym->builtin == Builtin::Indomain;
                } else if constexpr (std::is_same_v<T, IfS>) {
                    bool b = false;
                    for (const IfArm& a : n.arms)
                        for (const StmtPtr& s : a.body) b |= stmt_leaks(*s);
                    for (const StmtPtr& s : n.else_body) b |= stmt_leaks(*s);
                    return b;
                } else if constexpr (std::is_same_v<T, WhileS>) {
                    bool b = false;
                    for (const StmtPtr& s : n.body) b |= stmt_leaks(*s);
                    return b;
                } else {
                    // assignments, expression statements and the contained
                    // constructs (NOT, COMMIT, FORALL) never leave choice
                    // points behind
                    return false;
                }
            },
            stmt.node);
    }

    void annotate(StmtList& list) {
        for (StmtPtr& s : list) annotate_stmt(*s);
    }

    void annotate_stmt(Stmt& stmt) {
        stmt.leaks_choice = stmt_leaks(stmt);
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ForS>) {
                    annotate_expr(*n.lo);
                    annotate_expr(*n.hi);
                    annotate(n.body);
                } else if constexpr (std::is_same_v<T, WhileS>) {
                    annotate_expr(*n.cond);
                    annotate(n.body);
                } else if constexpr (std::is_same_v<T, IfS>) {
                    for (IfArm& a : n.arms) {
                        annotate_expr(*a.cond);
                        annotate(a.body);
                    }
                    annotate(n.else_body);
                } else if constexpr (std::is_same_v<T, EitherS>) {
                    for (StmtList& b : n.branches) annotate(b);
                } else if constexpr (std::is_same_v<T, ForallS>) {
                    annotate(n.generator);
                    annotate(n.body);
                } else if constexpr (std::is_same_v<T, CommitS>) {
                    annotate(n.body);
                } else if constexpr (std::is_same_v<T, NotS>) {
                    annotate_stmt(*n.body);
                } else if constexpr (std::is_same_v<T, ExprS>) {
                    annotate_expr(*n.expr);
                } else if constexpr (std::is_same_v<T, AssignS>) {
                    annotate_expr(*n.lhs);
                    annotate_expr(*n.rhs);
                } else if constexpr (std::is_same_v<T, CallS>) {
                    for (ExprPtr& a : n.args) annotate_expr(*a);
                }
            },
            stmt.node);
    }

    void annotate_expr(Expr& e) {
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, QuantE>) {
                    annotate_expr(*n.lo);
                    annotate_expr(*n.hi);
                    annotate(n.body); // sandboxed statement body
                } else if constexpr (std::is_same_v<T, BinE>) {
                    annotate_expr(*n.lhs);
                    annotate_expr(*n.rhs);
                } else if constexpr (std::is_same_v<T, UnE>) {
                    annotate_expr(*n.operand);
                } else if constexpr (std::is_same_v<T, IndexE>) {
                    annotate_expr(*n.base);
                    for (ExprPtr& i : n.indices) annotate_expr(*i);
                } else if constexpr (std::is_same_v<T, FieldE>) {
                    annotate_expr(*n.base);
                } else if constexpr (std::is_same_v<T, CallE>) {
                    for (ExprPtr& a : n.args) annotate_expr(*a);
                }
            },
            e.node);
    }

    CheckedProgram prog_;
    TypePtr int_t_, bool_t_, real_t_;
    std::unordered_map<std::string, Symbol*> global_scope_;
    std::unordered_map<std::string, Symbol*> builtins_;
    std::unordered_map<std::string, TypePtr> types_;
    std::unordered_map<std::string, Symbol*>* local_scope_ = nullptr;
    std::unordered_map<const ProcDecl*, Symbol*> proc_syms_;
};

} // namespace

CheckedProgram check_semantics(Module module) {
    return Checker().run(std::move(module));
}

CheckedProgram check_source(const std::string& source) {
    return check_semantics(parse_source(source));
}

} // namespace almac
