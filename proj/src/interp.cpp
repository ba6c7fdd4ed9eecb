#include "almac/interp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>

namespace almac {

namespace {

const std::function<bool()> kTrue = [] { return true; };

RelOp rel_of(BinOp op) {
    switch (op) {
    case BinOp::Eq: return RelOp::Eq;
    case BinOp::Neq: return RelOp::Neq;
    case BinOp::Lt: return RelOp::Lt;
    case BinOp::Le: return RelOp::Le;
    case BinOp::Gt: return RelOp::Gt;
    default: return RelOp::Ge;
    }
}

EvalExprPtr mk_eval(EvalExpr::K kind) {
    auto e = std::make_unique<EvalExpr>();
    e->kind = kind;
    return e;
}

EvalExprPtr mk_int(int64_t v) {
    auto e = mk_eval(EvalExpr::K::IntNum);
    e->ival = v;
    return e;
}

EvalExprPtr mk_realnum(double v) {
    auto e = mk_eval(EvalExpr::K::RealNum);
    e->rval = v;
    return e;
}

std::string fmt_real6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt_real17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Interp::Interp(const CheckedProgram& prog, Machine& machine)
    : prog_(prog), m_(machine) {}

// --- setup -------------------------------------------------------------------

// Builds the value skeleton for a declared variable; registers one unknown
// per constrained simple component, named by its declaration path.
Value Interp::build_value(const TypePtr& type, const std::string& path) {
    if (type->constrained) {
        UnknownId u = m_.store.add_unknown(path, type);
        return Value::of_unknown(u);
    }
    switch (type->kind) {
    case TypeKind::Array: {
        size_t n = static_cast<size_t>(type->index_hi - type->index_lo + 1);
        Value v = Value::composite(n);
        for (size_t i = 0; i < n; ++i) {
            std::string child = path;
            int64_t idx = type->index_lo + static_cast<int64_t>(i);
            if (!child.empty() && child.back() == ']') {
                child.pop_back();
                child += "," + std::to_string(idx) + "]";
            } else {
                child += "[" + std::to_string(idx) + "]";
            }
            v.comp().elems[i] = build_value(type->elem, child);
        }
        return v;
    }
    case TypeKind::Record: {
        Value v = Value::composite(type->fields.size());
        for (size_t i = 0; i < type->fields.size(); ++i)
            v.comp().elems[i] =
                build_value(type->fields[i].type, path + "." + type->fields[i].name);
        return v;
    }
    case TypeKind::List:
        return Value::list();
    default:
        return Value(); // uninitialized scalar
    }
}

void Interp::init_globals() {
    m_.globals->slots.reserve(static_cast<size_t>(prog_.global_slots));
    for (const Symbol* g : prog_.globals)
        m_.globals->slots.push_back(build_value(g->type, g->name));
    m_.globals->aliases.resize(m_.globals->slots.size());
    m_.fingerprint_globals = [this]() {
        std::string out;
        for (const Symbol* g : prog_.globals)
            out += g->name + " = " +
                   render_frame_deep(m_.globals->slots[static_cast<size_t>(g->slot)]) +
                   "\n";
        return out;
    };
}

const Value* Interp::global_cell(const std::string& name) const {
    for (const Symbol* g : prog_.globals)
        if (g->name == name)
            return &m_.globals->slots[static_cast<size_t>(g->slot)];
    return nullptr;
}

const Symbol* Interp::global_symbol(const std::string& name) const {
    for (const Symbol* g : prog_.globals)
        if (g->name == name) return g;
    return nullptr;
}

// --- designators and values ------------------------------------------------------

Interp::LV Interp::resolve_lvalue(const Expr& e) {
    if (const auto* n = std::get_if<NameE>(&e.node)) {
        const Symbol* s = n->sym;
        assert(s && s->kind == Symbol::Kind::Var);
        FramePtr owner = s->global ? m_.globals : frame_;
        size_t slot = static_cast<size_t>(s->slot);
        if (slot < owner->aliases.size() && owner->aliases[slot].cell)
            return {owner->aliases[slot].cell, owner->aliases[slot].anchor,
                    s->type.get()};
        return {&owner->slots[slot], owner, s->type.get()};
    }
    if (const auto* ix = std::get_if<IndexE>(&e.node)) {
        LV base = resolve_lvalue(*ix->base);
        const Type* t = base.type;
        Value* cell = base.cell;
        for (const ExprPtr& idx : ix->indices) {
            assert(t->kind == TypeKind::Array);
            int64_t i = eval_int(*idx);
            if (i < t->index_lo || i > t->index_hi)
                throw RuntimeError(idx->loc,
                                   "index " + std::to_string(i) + " outside [" +
                                       std::to_string(t->index_lo) + ".." +
                                       std::to_string(t->index_hi) + "]");
            cell = &cell->comp().elems[static_cast<size_t>(i - t->index_lo)];
            t = t->elem.get();
        }
        return {cell, base.anchor, t};
    }
    const auto& f = std::get<FieldE>(e.node);
    LV base = resolve_lvalue(*f.base);
    return {&base.cell->comp().elems[static_cast<size_t>(f.field_index)],
            base.anchor,
            base.type->fields[static_cast<size_t>(f.field_index)].type.get()};
}

Value Interp::read_cell_strict(const Value& cell, const Type& type,
                               SourceLoc loc) {
    if (cell.is_unknown()) {
        UnknownId u = cell.unknown_id();
        if (type.kind == TypeKind::Real) {
            if (auto v = m_.store.determined_real(u)) return Value::of_real(*v);
        } else if (auto v = m_.store.determined_ordinal(u)) {
            if (type.kind == TypeKind::Boolean) return Value::of_bool(*v != 0);
            if (type.kind == TypeKind::Enum)
                return Value::of_enum(m_.store.unknown(u).type.get(), *v);
            return Value::of_int(*v);
        }
        throw RuntimeError(loc, "unknown '" + m_.store.unknown(u).name +
                                    "' is undetermined");
    }
    if (cell.is_composite()) {
        // compound copy: unknowns are evaluated, uninitialized leaves copied
        Value out = Value::composite(cell.comp().elems.size());
        for (size_t i = 0; i < cell.comp().elems.size(); ++i) {
            const Type& et = type.kind == TypeKind::Array
                                 ? *type.elem
                                 : *type.fields[i].type;
            const Value& child = cell.comp().elems[i];
            out.comp().elems[i] = child.is_uninit()
                                      ? Value()
                                      : read_cell_strict(child, et, loc);
        }
        return out;
    }
    if (cell.is_uninit())
        throw RuntimeError(loc, "reading an uninitialized variable");
    return cell;
}

Value Interp::eval(const Expr& e) {
    if (const auto* i = std::get_if<IntLitE>(&e.node)) return Value::of_int(i->value);
    if (const auto* r = std::get_if<RealLitE>(&e.node)) return Value::of_real(r->value);
    if (const auto* b = std::get_if<BoolLitE>(&e.node)) return Value::of_bool(b->value);
    if (std::holds_alternative<StringLitE>(e.node))
        throw RuntimeError(e.loc, "string value outside WRITE");

    if (const auto* n = std::get_if<NameE>(&e.node)) {
        const Symbol* s = n->sym;
        switch (s->kind) {
        case Symbol::Kind::Const:
            if (s->type->kind == TypeKind::Real) return Value::of_real(s->const_real);
            if (s->type->kind == TypeKind::Boolean) return Value::of_bool(s->const_bool);
            return Value::of_int(s->const_int);
        case Symbol::Kind::EnumLit:
            return Value::of_enum(s->type.get(), s->enum_index);
        default: {
            LV lv = resolve_lvalue(e);
            return read_cell_strict(*lv.cell, *lv.type, e.loc);
        }
        }
    }
    if (std::holds_alternative<IndexE>(e.node) ||
        std::holds_alternative<FieldE>(e.node)) {
        LV lv = resolve_lvalue(e);
        return read_cell_strict(*lv.cell, *lv.type, e.loc);
    }

    if (const auto* u = std::get_if<UnE>(&e.node)) {
        Value v = eval(*u->operand);
        switch (u->op) {
        case UnOp::Not: return Value::of_bool(!v.as_bool());
        case UnOp::Neg:
            return v.is_real() ? Value::of_real(-v.as_real())
                               : Value::of_int(-v.as_int());
        default: return v;
        }
    }

    if (const auto* b = std::get_if<BinE>(&e.node)) {
        if (b->op == BinOp::And) {
            if (!eval_bool(*b->lhs)) return Value::of_bool(false);
            return Value::of_bool(eval_bool(*b->rhs));
        }
        if (b->op == BinOp::Or) {
            if (eval_bool(*b->lhs)) return Value::of_bool(true);
            return Value::of_bool(eval_bool(*b->rhs));
        }
        Value l = eval(*b->lhs);
        Value r = eval(*b->rhs);
        auto as_real = [](const Value& v) {
            return v.is_real() ? v.as_real() : static_cast<double>(v.as_int());
        };
        bool numeric_real = l.is_real() || r.is_real();
        switch (b->op) {
        case BinOp::Add:
            return numeric_real ? Value::of_real(as_real(l) + as_real(r))
                                : Value::of_int(l.as_int() + r.as_int());
        case BinOp::Sub:
            return numeric_real ? Value::of_real(as_real(l) - as_real(r))
                                : Value::of_int(l.as_int() - r.as_int());
        case BinOp::Mul:
            return numeric_real ? Value::of_real(as_real(l) * as_real(r))
                                : Value::of_int(l.as_int() * r.as_int());
        case BinOp::RealDiv: {
            double d = as_real(r);
            if (d == 0.0) throw RuntimeError(e.loc, "division by zero");
            return Value::of_real(as_real(l) / d);
        }
        case BinOp::IntDiv:
            if (r.as_int() == 0) throw RuntimeError(e.loc, "division by zero");
            return Value::of_int(l.as_int() / r.as_int());
        case BinOp::Mod:
            if (r.as_int() == 0) throw RuntimeError(e.loc, "division by zero");
            return Value::of_int(l.as_int() % r.as_int());
        default: { // relations
            if (l.is_composite() || r.is_composite()) {
                bool eq = deep_equal(l, r, e.loc);
                return Value::of_bool(b->op == BinOp::Eq ? eq : !eq);
            }
            int cmp;
            if (numeric_real) {
                double a = as_real(l), c = as_real(r);
                cmp = a < c ? -1 : a > c ? 1 : 0;
            } else {
                int64_t a = l.ordinal(), c = r.ordinal();
                cmp = a < c ? -1 : a > c ? 1 : 0;
            }
            switch (b->op) {
            case BinOp::Eq: return Value::of_bool(cmp == 0);
            case BinOp::Neq: return Value::of_bool(cmp != 0);
            case BinOp::Lt: return Value::of_bool(cmp < 0);
            case BinOp::Le: return Value::of_bool(cmp <= 0);
            case BinOp::Gt: return Value::of_bool(cmp > 0);
            default: return Value::of_bool(cmp >= 0);
            }
        }
        }
    }

    if (const auto* c = std::get_if<CallE>(&e.node)) {
        if (c->sym->builtin == Builtin::Abs) {
            Value v = eval(*c->args[0]);
            return Value::of_int(v.as_int() < 0 ? -v.as_int() : v.as_int());
        }
        // KNOWN
        LV lv = resolve_lvalue(*c->args[0]);
        if (lv.cell->is_uninit()) return Value::of_bool(false);
        if (lv.cell->is_unknown())
            return Value::of_bool(m_.store.is_determined(lv.cell->unknown_id()));
        return Value::of_bool(true);
    }

    const auto& q = std::get<QuantE>(e.node);
    Trail::Mark mark = m_.trail.mark();
    bool ok = exec_for_core(q.existential, q.sym, *q.lo, *q.hi, q.body, e.loc,
                            kTrue);
    m_.undo_to(mark);
    return Value::of_bool(ok);
}

bool Interp::deep_equal(const Value& a, const Value& b, SourceLoc loc) const {
    if (a.is_composite() && b.is_composite()) {
        const auto& ae = a.comp().elems;
        const auto& be = b.comp().elems;
        if (ae.size() != be.size()) return false;
        for (size_t i = 0; i < ae.size(); ++i)
            if (!deep_equal(ae[i], be[i], loc)) return false;
        return true;
    }
    if (a.is_uninit() || b.is_uninit())
        throw RuntimeError(loc, "comparison involves an uninitialized component");
    return scalar_equal(a, b);
}

bool Interp::scalar_equal(const Value& a, const Value& b) const {
    if (a.is_real() || b.is_real()) {
        double x = a.is_real() ? a.as_real() : static_cast<double>(a.as_int());
        double y = b.is_real() ? b.as_real() : static_cast<double>(b.as_int());
        return x == y;
    }
    return a.ordinal() == b.ordinal();
}

int64_t Interp::eval_int(const Expr& e) {
    Value v = eval(e);
    return v.as_int();
}

bool Interp::eval_bool(const Expr& e) {
    Value v = eval(e);
    return v.as_bool();
}

void Interp::check_range(const Type& t, const Value& v, SourceLoc loc) {
    if (t.kind != TypeKind::Subrange) return;
    int64_t x = v.as_int();
    if (x < t.lo || x > t.hi)
        throw RuntimeError(loc, "value " + std::to_string(x) +
                                    " outside subrange [" + std::to_string(t.lo) +
                                    ".." + std::to_string(t.hi) + "]");
}

void Interp::write_cell(const LV& lv, const Value& v, SourceLoc loc) {
    assert(!lv.cell->is_unknown());
    if (lv.type->kind == TypeKind::Real && v.is_int()) {
        m_.trail.record_var(lv.cell, lv.anchor);
        lv.cell->assign_in_place(Value::of_real(static_cast<double>(v.as_int())));
        return;
    }
    // numeric comparisons mix freely, one-time initialization does not
    if (lv.type->is_integer_class() && v.is_real())
        throw RuntimeError(loc, "cannot initialize an INTEGER variable from a "
                                "REAL value");
    check_range(*lv.type, v, loc);
    m_.trail.record_var(lv.cell, lv.anchor);
    lv.cell->assign_in_place(v);
}

// --- constraints ----------------------------------------------------------------

// Builds the evaluated form of a constraint side: constants and initialized
// variables are replaced by their values; unknowns stay symbolic. Arrays
// subscripted by unknown-bearing expressions stay symbolic selector chains.
EvalExprPtr Interp::build_eval(const Expr& e, bool real_world) {
    if (!e.mentions_unknown) {
        Value v = eval(e);
        if (v.is_real()) return mk_realnum(v.as_real());
        return mk_int(v.ordinal());
    }

    if (std::holds_alternative<NameE>(e.node) ||
        std::holds_alternative<IndexE>(e.node) ||
        std::holds_alternative<FieldE>(e.node)) {
        // walk the designator chain from the root
        std::vector<const Expr*> chain;
        const Expr* cur = &e;
        for (;;) {
            if (const auto* ix = std::get_if<IndexE>(&cur->node)) {
                chain.push_back(cur);
                cur = ix->base.get();
            } else if (const auto* f = std::get_if<FieldE>(&cur->node)) {
                chain.push_back(cur);
                cur = f->base.get();
            } else {
                break;
            }
        }
        std::reverse(chain.begin(), chain.end());

        const auto& root = std::get<NameE>(cur->node);
        LV pos = resolve_lvalue(*cur);
        std::string disp = root.name;
        EvalExprPtr sym; // non-null once the chain turned symbolic

        for (const Expr* sel : chain) {
            if (const auto* ix = std::get_if<IndexE>(&sel->node)) {
                for (const ExprPtr& idx : ix->indices) {
                    assert(pos.type->kind == TypeKind::Array);
                    if (!sym && !idx->mentions_unknown) {
                        int64_t i = eval_int(*idx);
                        if (i < pos.type->index_lo || i > pos.type->index_hi)
                            throw RuntimeError(
                                idx->loc, "index " + std::to_string(i) +
                                              " outside [" +
                                              std::to_string(pos.type->index_lo) +
                                              ".." +
                                              std::to_string(pos.type->index_hi) +
                                              "]");
                        pos.cell = &pos.cell->comp()
                                        .elems[static_cast<size_t>(i - pos.type->index_lo)];
                        if (!disp.empty() && disp.back() == ']') {
                            disp.pop_back();
                            disp += "," + std::to_string(i) + "]";
                        } else {
                            disp += "[" + std::to_string(i) + "]";
                        }
                        pos.type = pos.type->elem.get();
                        continue;
                    }
                    if (!sym) {
                        sym = mk_eval(EvalExpr::K::ArrayRef);
                        sym->cell = pos.cell;
                        sym->cell_type = pos.type;
                        sym->display = disp;
                    }
                    auto node = mk_eval(EvalExpr::K::Index);
                    node->kids.push_back(std::move(sym));
                    node->kids.push_back(build_eval(*idx, false));
                    sym = std::move(node);
                    pos.type = pos.type->elem.get();
                }
            } else {
                const auto& f = std::get<FieldE>(sel->node);
                if (!sym) {
                    pos.cell =
                        &pos.cell->comp().elems[static_cast<size_t>(f.field_index)];
                    disp += "." + f.field;
                    pos.type =
                        pos.type->fields[static_cast<size_t>(f.field_index)].type.get();
                } else {
                    auto node = mk_eval(EvalExpr::K::FieldSel);
                    node->field_index = f.field_index;
                    node->field_name = f.field;
                    node->kids.push_back(std::move(sym));
                    sym = std::move(node);
                    pos.type =
                        pos.type->fields[static_cast<size_t>(f.field_index)].type.get();
                }
            }
        }
        if (sym) return sym;
        if (pos.cell->is_unknown()) {
            auto leaf = mk_eval(EvalExpr::K::UnknownLeaf);
            leaf->uid = pos.cell->unknown_id();
            return leaf;
        }
        // plain variable reached through unknown-free selectors
        Value v = read_cell_strict(*pos.cell, *pos.type, e.loc);
        if (v.is_real()) return mk_realnum(v.as_real());
        return mk_int(v.ordinal());
    }

    if (const auto* u = std::get_if<UnE>(&e.node)) {
        if (u->op == UnOp::Pos) return build_eval(*u->operand, real_world);
        auto node = mk_eval(EvalExpr::K::Neg);
        node->kids.push_back(build_eval(*u->operand, real_world));
        return node;
    }

    const auto& b = std::get<BinE>(e.node);
    switch (b.op) {
    case BinOp::Add:
    case BinOp::Sub: {
        auto node = mk_eval(b.op == BinOp::Add ? EvalExpr::K::Add
                                               : EvalExpr::K::Sub);
        node->kids.push_back(build_eval(*b.lhs, real_world));
        node->kids.push_back(build_eval(*b.rhs, real_world));
        return node;
    }
    case BinOp::Mul: {
        // exactly one side carries unknowns (checked); constant side first
        const Expr& konst = b.lhs->mentions_unknown ? *b.rhs : *b.lhs;
        const Expr& varside = b.lhs->mentions_unknown ? *b.lhs : *b.rhs;
        auto node = mk_eval(EvalExpr::K::Mul);
        node->kids.push_back(build_eval(konst, real_world));
        node->kids.push_back(build_eval(varside, real_world));
        return node;
    }
    default: { // RealDiv (rhs unknown-free, checked)
        auto node = mk_eval(EvalExpr::K::DivReal);
        node->kids.push_back(build_eval(*b.lhs, real_world));
        node->kids.push_back(build_eval(*b.rhs, real_world));
        return node;
    }
    }
}

bool Interp::tell_constraint(const Expr& e) {
    const Expr* cur = &e;
    bool negated = false;
    while (const auto* u = std::get_if<UnE>(&cur->node)) {
        if (u->op != UnOp::Not) break;
        negated = !negated;
        cur = u->operand.get();
    }
    if (const auto* b = std::get_if<BinE>(&cur->node);
        b && is_relation(b->op)) {
        RelOp rel = rel_of(b->op);
        if (negated) rel = negate_rel(rel);
        bool real_world = b->lhs->type->kind == TypeKind::Real ||
                          b->rhs->type->kind == TypeKind::Real;
        EvalExprPtr lhs = build_eval(*b->lhs, real_world);
        EvalExprPtr rhs = build_eval(*b->rhs, real_world);
        return m_.store.tell_expr(rel, std::move(lhs), std::move(rhs),
                                  real_world, e.loc);
    }
    // bare boolean unknown
    EvalExprPtr lhs = build_eval(*cur, false);
    return m_.store.tell_expr(RelOp::Eq, std::move(lhs),
                              mk_int(negated ? 0 : 1), false, e.loc);
}

// --- generalized equality ----------------------------------------------------------

bool Interp::exec_gen_eq(const Expr& lhs, const Expr& rhs, SourceLoc loc) {
    auto designator = [](const Expr& x) {
        if (const auto* n = std::get_if<NameE>(&x.node))
            return n->sym && n->sym->kind == Symbol::Kind::Var;
        return std::holds_alternative<IndexE>(x.node) ||
               std::holds_alternative<FieldE>(x.node);
    };
    bool ld = designator(lhs), rd = designator(rhs);
    if (ld && rd) {
        LV a = resolve_lvalue(lhs);
        LV b = resolve_lvalue(rhs);
        return gen_eq_cells(a, b, loc);
    }
    if (ld) {
        LV a = resolve_lvalue(lhs);
        return gen_eq_cell_value(a, eval(rhs), loc);
    }
    if (rd) {
        LV b = resolve_lvalue(rhs);
        return gen_eq_cell_value(b, eval(lhs), loc);
    }
    return deep_equal(eval(lhs), eval(rhs), loc);
}

bool Interp::gen_eq_cells(const LV& a, const LV& b, SourceLoc loc) {
    assert(!a.cell->is_unknown() && !b.cell->is_unknown());
    if (a.cell->is_composite()) {
        const size_t n = a.cell->comp().elems.size();
        for (size_t i = 0; i < n; ++i) {
            const Type* at = a.type->kind == TypeKind::Array
                                 ? a.type->elem.get()
                                 : a.type->fields[i].type.get();
            const Type* bt = b.type->kind == TypeKind::Array
                                 ? b.type->elem.get()
                                 : b.type->fields[i].type.get();
            LV ca{&a.cell->comp().elems[i], a.anchor, at};
            LV cb{&b.cell->comp().elems[i], b.anchor, bt};
            if (!gen_eq_cells(ca, cb, loc)) return false;
        }
        return true;
    }
    bool ai = !a.cell->is_uninit(), bi = !b.cell->is_uninit();
    if (ai && bi) return scalar_equal(*a.cell, *b.cell);
    if (ai) {
        write_cell(b, *a.cell, loc);
        return true;
    }
    if (bi) {
        write_cell(a, *b.cell, loc);
        return true;
    }
    throw RuntimeError(loc, "'=' with both sides uninitialized");
}

bool Interp::gen_eq_cell_value(const LV& a, const Value& v, SourceLoc loc) {
    assert(!a.cell->is_unknown());
    if (a.cell->is_composite()) {
        const auto& ve = v.comp().elems;
        for (size_t i = 0; i < ve.size(); ++i) {
            const Type* at = a.type->kind == TypeKind::Array
                                 ? a.type->elem.get()
                                 : a.type->fields[i].type.get();
            LV ca{&a.cell->comp().elems[i], a.anchor, at};
            if (!gen_eq_cell_value(ca, ve[i], loc)) return false;
        }
        return true;
    }
    if (!a.cell->is_uninit()) {
        if (v.is_uninit())
            throw RuntimeError(loc, "'=' value side contains an uninitialized "
                                    "component");
        return scalar_equal(*a.cell, v);
    }
    if (v.is_uninit())
        throw RuntimeError(loc, "'=' with both sides uninitialized");
    write_cell(a, v, loc);
    return true;
}

// --- tests --------------------------------------------------------------------------

bool Interp::exec_test(const Expr& e) {
    if (e.is_constraint) return tell_constraint(e);
    if (const auto* b = std::get_if<BinE>(&e.node))
        if (b->op == BinOp::Eq)
            return exec_gen_eq(*b->lhs, *b->rhs, e.loc);
    return eval_bool(e);
}

// --- statements ------------------------------------------------------------------------

bool Interp::exec_stmts(const StmtList& list, size_t i, Cont k) {
    // deterministic prefix runs iteratively: no continuation frames pile up
    while (i < list.size() && !list[i]->leaks_choice) {
        if (!exec_stmt_any(*list[i], kTrue)) return false;
        ++i;
    }
    if (i == list.size()) return k();
    std::function<bool()> rest = [this, &list, i, &k] {
        return exec_stmts(list, i + 1, k);
    };
    return exec_stmt_any(*list[i], rest);
}

bool Interp::exec_contained(const StmtList& list) {
    return exec_stmts(list, 0, kTrue);
}

bool Interp::exec_stmt_any(const Stmt& s, Cont k) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AssignS>) {
                LV lv = resolve_lvalue(*n.lhs);
                Value v = eval(*n.rhs);
                write_cell(lv, v, s.loc);
                return k();
            } else if constexpr (std::is_same_v<T, ExprS>) {
                return exec_test(*n.expr) && k();
            } else if constexpr (std::is_same_v<T, CallS>) {
                return exec_call(n, s.loc, k);
            } else if constexpr (std::is_same_v<T, IfS>) {
                return exec_if(n, k);
            } else if constexpr (std::is_same_v<T, WhileS>) {
                return exec_while(n, k);
            } else if constexpr (std::is_same_v<T, ForS>) {
                return exec_for_core(n.existential, n.sym, *n.lo, *n.hi, n.body,
                                     s.loc, k);
            } else if constexpr (std::is_same_v<T, EitherS>) {
                return exec_either(n, s.loc, k);
            } else if constexpr (std::is_same_v<T, ForallS>) {
                return exec_forall(n, k);
            } else if constexpr (std::is_same_v<T, CommitS>) {
                return exec_commit(n, k);
            } else {
                return exec_not(n, k);
            }
        },
        s.node);
}

bool Interp::exec_if(const IfS& n, Cont k) {
    for (const IfArm& arm : n.arms) {
        Trail::Mark mark = m_.trail.mark();
        if (exec_test(*arm.cond)) return exec_stmts(arm.body, 0, k);
        // a failed condition (including a failed tell) is retracted; the
        // next arm / ELSE runs from the entry state
        m_.undo_to(mark);
    }
    return exec_stmts(n.else_body, 0, k);
}

bool Interp::exec_while(const WhileS& n, Cont k) {
    bool body_leaks = false;
    for (const StmtPtr& s : n.body)
        if (s->leaks_choice) body_leaks = true;
    if (!body_leaks) {
        for (;;) {
            Trail::Mark mark = m_.trail.mark();
            if (!exec_test(*n.cond)) {
                m_.undo_to(mark);
                return k();
            }
            if (!exec_contained(n.body)) return false;
        }
    }
    std::function<bool()> iterate = [&]() -> bool {
        Trail::Mark mark = m_.trail.mark();
        if (!exec_test(*n.cond)) {
            m_.undo_to(mark);
            return k();
        }
        return exec_stmts(n.body, 0, iterate);
    };
    return iterate();
}

Interp::LV Interp::var_lv(const Symbol* sym) {
    FramePtr owner = sym->global ? m_.globals : frame_;
    size_t slot = static_cast<size_t>(sym->slot);
    if (slot < owner->aliases.size() && owner->aliases[slot].cell)
        return {owner->aliases[slot].cell, owner->aliases[slot].anchor,
                sym->type.get()};
    return {&owner->slots[slot], owner, sym->type.get()};
}

bool Interp::exec_for_core(bool existential, const Symbol* sym,
                           const Expr& lo_e, const Expr& hi_e,
                           const StmtList& body, SourceLoc loc, Cont k) {
    int64_t lo = eval_int(lo_e);
    int64_t hi = eval_int(hi_e);

    if (existential) {
        int id = m_.next_choice_id();
        m_.trace("CHOICE " + std::to_string(id) + " @" + loc.str());
        Trail::Mark mark = m_.trail.mark();
        for (int64_t v = lo; v <= hi; ++v) {
            write_cell(var_lv(sym), Value::of_int(v), loc);
            if (exec_stmts(body, 0, k)) return true;
            if (v < hi) m_.trace("BACKTRACK " + std::to_string(id));
            m_.undo_to(mark);
        }
        return false;
    }

    bool body_leaks = false;
    for (const StmtPtr& s : body)
        if (s->leaks_choice) body_leaks = true;
    if (!body_leaks) {
        for (int64_t v = lo; v <= hi; ++v) {
            write_cell(var_lv(sym), Value::of_int(v), loc);
            if (!exec_contained(body)) return false;
        }
        return k();
    }
    std::function<bool(int64_t)> iterate = [&](int64_t v) -> bool {
        if (v > hi) return k();
        write_cell(var_lv(sym), Value::of_int(v), loc);
        std::function<bool()> next = [&iterate, v] { return iterate(v + 1); };
        return exec_stmts(body, 0, next);
    };
    return iterate(lo);
}

bool Interp::exec_either(const EitherS& n, SourceLoc loc, Cont k) {
    int id = m_.next_choice_id();
    m_.trace("CHOICE " + std::to_string(id) + " @" + loc.str());
    Trail::Mark mark = m_.trail.mark();
    for (size_t i = 0; i < n.branches.size(); ++i) {
        if (exec_stmts(n.branches[i], 0, k)) return true;
        if (i + 1 < n.branches.size())
            m_.trace("BACKTRACK " + std::to_string(id));
        m_.undo_to(mark);
    }
    return false;
}

bool Interp::exec_forall(const ForallS& n, Cont k) {
    Trail::Mark entry = m_.trail.mark();
    uint16_t depth = m_.enter_forall();
    bool body_failed = false;

    std::function<bool()> drive = [&]() -> bool {
        Trail::Mark tmark = m_.trail.mark();
        if (!exec_contained(n.body)) {
            m_.undo_to(tmark);
            body_failed = true;
            return true; // abort the generator's enumeration
        }
        // commit the body's effects: its trail segment is sealed while the
        // FORALL is active, so backtracking inside the generator skips it
        m_.trail.seal(tmark, depth);
        return false; // drive the generator to its next success
    };
    exec_stmts(n.generator, 0, drive);

    if (body_failed) {
        m_.trail.unseal(entry, depth);
        m_.exit_forall();
        return false;
    }
    m_.undo_to(entry); // drop the generator's residual effects
    m_.trail.unseal(entry, depth);
    m_.exit_forall();
    return k();
}

bool Interp::exec_commit(const CommitS& n, Cont k) {
    int before = m_.last_choice_id();
    if (!exec_contained(n.body)) return false;
    int after = m_.last_choice_id();
    if (m_.opts.trace) {
        if (after > before)
            m_.trace("COMMIT " + std::to_string(before + 1) + "-" +
                     std::to_string(after));
        else
            m_.trace("COMMIT -");
    }
    return k();
}

bool Interp::exec_not(const NotS& n, Cont k) {
    Trail::Mark mark = m_.trail.mark();
    bool ok = exec_stmt_any(*n.body, kTrue);
    m_.undo_to(mark);
    return ok ? false : k();
}

// --- calls -------------------------------------------------------------------------

namespace {

bool deep_initialized(const Value& v) {
    if (v.is_uninit()) return false;
    if (v.is_composite()) {
        for (const Value& c : v.comp().elems)
            if (!deep_initialized(c)) return false;
    }
    return true;
}

} // namespace

bool Interp::exec_call(const CallS& c, SourceLoc loc, Cont k) {
    const Symbol* ps = c.sym;
    if (ps->kind == Symbol::Kind::Builtin) return exec_builtin(c, loc, k);

    auto frame = std::make_shared<Frame>();
    frame->slots.resize(static_cast<size_t>(ps->frame_slots));
    frame->aliases.resize(static_cast<size_t>(ps->frame_slots));

    for (size_t i = 0; i < ps->param_syms.size(); ++i) {
        const Symbol* p = ps->param_syms[i];
        const Expr& arg = *c.args[i];
        size_t slot = static_cast<size_t>(p->slot);
        switch (p->mode) {
        case ParamMode::Value: {
            Value v = eval(arg); // undetermined unknowns fault here
            if (p->type->is_simple()) {
                check_range(*p->type, v, arg.loc);
                if (p->type->kind == TypeKind::Real && v.is_int())
                    v = Value::of_real(static_cast<double>(v.as_int()));
            }
            frame->slots[slot] = std::move(v);
            break;
        }
        case ParamMode::Var: {
            LV lv = resolve_lvalue(arg);
            frame->aliases[slot] = {lv.cell, lv.anchor};
            break;
        }
        case ParamMode::Mix: {
            LV lv = resolve_lvalue(arg);
            if (deep_initialized(*lv.cell))
                frame->slots[slot] = *lv.cell; // behaves as call by value
            else
                frame->aliases[slot] = {lv.cell, lv.anchor};
            break;
        }
        }
    }
    for (const Symbol* l : ps->local_syms)
        frame->slots[static_cast<size_t>(l->slot)] = build_value(l->type, l->name);

    FramePtr saved = frame_;
    frame_ = frame;
    std::function<bool()> leave = [&]() -> bool {
        frame_ = saved;
        bool r = k();
        if (!r) frame_ = frame; // failure resumes inside the body
        return r;
    };
    bool ok = exec_stmts(ps->proc->body, 0, leave);
    if (!ok) frame_ = saved;
    return ok;
}

// --- builtins -----------------------------------------------------------------------

std::vector<UnknownId> Interp::aggregate_unknowns(const Expr& arg) {
    LV lv = resolve_lvalue(arg);
    std::vector<UnknownId> out;
    if (lv.cell->is_unknown()) {
        out.push_back(lv.cell->unknown_id());
        return out;
    }
    if (lv.cell->is_list()) {
        return lv.cell->list_val().elems;
    }
    // array of unknowns, flattened row-major
    std::function<void(const Value&)> walk = [&](const Value& v) {
        if (v.is_unknown()) {
            out.push_back(v.unknown_id());
            return;
        }
        for (const Value& c : v.comp().elems) walk(c);
    };
    walk(*lv.cell);
    return out;
}

bool Interp::label_one(UnknownId u, SourceLoc loc, Cont k) {
    std::vector<int64_t> values = m_.store.unknown(u).dom.values();
    if (m_.opts.value_order == ValueOrder::Descending)
        std::reverse(values.begin(), values.end());
    int id = m_.next_choice_id();
    m_.trace("CHOICE " + std::to_string(id) + " @" + loc.str());
    Trail::Mark mark = m_.trail.mark();
    for (size_t j = 0; j < values.size(); ++j) {
        LinearCon con;
        con.rel = RelOp::Eq;
        con.terms.emplace_back(1, u);
        con.rhs = values[j];
        if (m_.store.tell_linear(std::move(con)) && k()) return true;
        if (j + 1 < values.size()) m_.trace("BACKTRACK " + std::to_string(id));
        m_.undo_to(mark);
    }
    return false;
}

bool Interp::label_all(std::vector<UnknownId> ids, SourceLoc loc, Cont k) {
    if (ids.empty()) return k();
    size_t pick = 0;
    if (m_.opts.label_order == LabelOrder::FirstFail) {
        int64_t best = m_.store.unknown(ids[0]).dom.count();
        for (size_t i = 1; i < ids.size(); ++i) {
            int64_t n = m_.store.unknown(ids[i]).dom.count();
            if (n < best) {
                best = n;
                pick = i;
            }
        }
    }
    UnknownId u = ids[pick];
    ids.erase(ids.begin() + static_cast<long>(pick));
    std::function<bool()> rest = [this, ids = std::move(ids), loc, &k]() mutable {
        return label_all(ids, loc, k);
    };
    return label_one(u, loc, rest);
}

bool Interp::exec_indomain(const CallS& c, SourceLoc loc, Cont k) {
    const Expr& arg = *c.args[0];
    if (arg.type->constrained) {
        LV lv = resolve_lvalue(arg);
        return label_one(lv.cell->unknown_id(), loc, k);
    }
    return label_all(aggregate_unknowns(arg), loc, k);
}

void Interp::do_write(const Expr& arg) {
    if (const auto* s = std::get_if<StringLitE>(&arg.node)) {
        m_.out() << s->value;
        return;
    }
    bool designator = std::holds_alternative<IndexE>(arg.node) ||
                      std::holds_alternative<FieldE>(arg.node);
    if (const auto* n = std::get_if<NameE>(&arg.node))
        designator = n->sym && n->sym->kind == Symbol::Kind::Var;
    if (designator) {
        LV lv = resolve_lvalue(arg);
        if (lv.cell->is_uninit()) {
            m_.out() << "-";
            return;
        }
        if (lv.cell->is_unknown()) {
            UnknownId u = lv.cell->unknown_id();
            const Unknown& un = m_.store.unknown(u);
            if (un.is_real) {
                if (auto v = m_.store.determined_real(u))
                    m_.out() << fmt_real6(*v);
                else
                    m_.out() << "-";
            } else if (auto v = m_.store.determined_ordinal(u)) {
                m_.out() << m_.store.render_value(un, *v);
            } else {
                m_.out() << "-";
            }
            return;
        }
        m_.out() << format_scalar(*lv.cell);
        return;
    }
    m_.out() << format_scalar(eval(arg));
}

std::string Interp::format_scalar(const Value& v) const {
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_bool()) return v.as_bool() ? "TRUE" : "FALSE";
    if (v.is_real()) return fmt_real6(v.as_real());
    if (v.is_enum()) {
        const auto& e = v.as_enum();
        return e.type->members[static_cast<size_t>(e.index)];
    }
    return "-";
}

bool Interp::exec_builtin(const CallS& c, SourceLoc loc, Cont k) {
    switch (c.sym->builtin) {
    case Builtin::Write:
        for (const ExprPtr& a : c.args) do_write(*a);
        return k();
    case Builtin::WriteLn:
        for (const ExprPtr& a : c.args) do_write(*a);
        m_.out() << "\n";
        return k();
    case Builtin::Indomain:
        return exec_indomain(c, loc, k);
    case Builtin::AllDifferent:
        return m_.store.tell_all_different(aggregate_unknowns(*c.args[0])) && k();
    case Builtin::AtMost: {
        int64_t bound = eval_int(*c.args[0]);
        std::vector<UnknownId> ids = aggregate_unknowns(*c.args[1]);
        Value v = eval(*c.args[2]);
        return m_.store.tell_at_most(bound, std::move(ids), v.ordinal()) && k();
    }
    case Builtin::ListEmpty: {
        LV lv = resolve_lvalue(*c.args[0]);
        m_.trail.record_var(lv.cell, lv.anchor);
        lv.cell->list_val().elems.clear();
        return k();
    }
    case Builtin::ListInsert: {
        LV lv = resolve_lvalue(*c.args[0]);
        LV ulv = resolve_lvalue(*c.args[1]);
        m_.trail.record_var(lv.cell, lv.anchor);
        lv.cell->list_val().elems.push_back(ulv.cell->unknown_id());
        return k();
    }
    case Builtin::Sum: {
        LV lv = resolve_lvalue(*c.args[0]);
        const std::string& rel = std::get<StringLitE>(c.args[1]->node).value;
        int64_t bound = eval_int(*c.args[2]);
        LinearCon con;
        con.rel = rel == "=" ? RelOp::Eq : rel == "<=" ? RelOp::Le : RelOp::Ge;
        con.rhs = bound;
        for (UnknownId u : lv.cell->list_val().elems) {
            bool merged = false;
            for (auto& [coef, uu] : con.terms)
                if (uu == u) {
                    ++coef;
                    merged = true;
                    break;
                }
            if (!merged) con.terms.emplace_back(1, u);
        }
        std::sort(con.terms.begin(), con.terms.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        return m_.store.tell_linear(std::move(con)) && k();
    }
    default:
        assert(false && "value builtins are rewritten by the checker");
        return false;
    }
}

// --- fingerprinting -------------------------------------------------------------------

std::string Interp::render_frame_deep(const Value& v) const {
    if (v.is_uninit()) return "-";
    if (v.is_int()) return std::to_string(v.as_int());
    if (v.is_bool()) return v.as_bool() ? "TRUE" : "FALSE";
    if (v.is_real()) return fmt_real17(v.as_real());
    if (v.is_enum()) {
        const auto& e = v.as_enum();
        return e.type->members[static_cast<size_t>(e.index)];
    }
    if (v.is_unknown()) return "&" + m_.store.unknown(v.unknown_id()).name;
    if (v.is_list()) {
        std::string out = "[";
        const auto& l = v.list_val().elems;
        for (size_t i = 0; i < l.size(); ++i) {
            if (i) out += ",";
            out += m_.store.unknown(l[i]).name;
        }
        return out + "]";
    }
    std::string out = "(";
    const auto& elems = v.comp().elems;
    for (size_t i = 0; i < elems.size(); ++i) {
        if (i) out += ",";
        out += render_frame_deep(elems[i]);
    }
    return out + ")";
}

// --- run --------------------------------------------------------------------------------

RunResult Interp::run(const std::function<void()>& on_solution) {
    RunResult res;
    init_globals();

    std::function<bool()> top = [&]() -> bool {
        res.solutions++;
        if (auto s = m_.store.active_suspended())
            throw RuntimeError(s->loc, "constraint '" + s->text +
                                           "' still suspended at the end of "
                                           "the run");
        if (m_.opts.mode != RunMode::First)
            m_.out() << "--- solution " << res.solutions << " ---\n";
        if (m_.opts.dump_store) m_.out() << m_.store.dump();
        if (on_solution) on_solution();
        if (m_.opts.mode == RunMode::First) return true;
        if (m_.opts.max_solutions && res.solutions >= *m_.opts.max_solutions)
            return true;
        return false;
    };

    exec_stmts(prog_.module.body, 0, top);
    res.outcome = res.solutions > 0 ? RunResult::Outcome::Succeeded
                                    : RunResult::Outcome::Failed;
    return res;
}

RunResult run_source(const std::string& source, Machine& machine,
                     const std::function<void()>& on_solution) {
    CheckedProgram prog = check_source(source);
    Interp interp(prog, machine);
    return interp.run(on_solution);
}

} // namespace almac
