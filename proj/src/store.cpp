#include "almac/store.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <map>

namespace almac {

RelOp negate_rel(RelOp op) {
    switch (op) {
    case RelOp::Eq: return RelOp::Neq;
    case RelOp::Neq: return RelOp::Eq;
    case RelOp::Le: return RelOp::Gt;
    case RelOp::Lt: return RelOp::Ge;
    case RelOp::Ge: return RelOp::Lt;
    case RelOp::Gt: return RelOp::Le;
    }
    return RelOp::Eq;
}

const char* rel_text(RelOp op) {
    switch (op) {
    case RelOp::Eq: return "=";
    case RelOp::Neq: return "<>";
    case RelOp::Le: return "<=";
    case RelOp::Lt: return "<";
    case RelOp::Ge: return ">=";
    case RelOp::Gt: return ">";
    }
    return "?";
}

bool eval_rel(RelOp op, int64_t lhs, int64_t rhs) {
    switch (op) {
    case RelOp::Eq: return lhs == rhs;
    case RelOp::Neq: return lhs != rhs;
    case RelOp::Le: return lhs <= rhs;
    case RelOp::Lt: return lhs < rhs;
    case RelOp::Ge: return lhs >= rhs;
    case RelOp::Gt: return lhs > rhs;
    }
    return false;
}

EvalExprPtr EvalExpr::clone() const {
    auto e = std::make_unique<EvalExpr>();
    e->kind = kind;
    e->ival = ival;
    e->rval = rval;
    e->uid = uid;
    e->cell = cell;
    e->cell_type = cell_type;
    e->display = display;
    e->field_index = field_index;
    e->field_name = field_name;
    for (const auto& k : kids) e->kids.push_back(k->clone());
    return e;
}

namespace {

int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
int64_t ceil_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

// --- setup / queries ---------------------------------------------------------

UnknownId Store::add_unknown(std::string name, TypePtr type) {
    // Plain CONSTRAINED INTEGER gets the default bounded implementation
    // range; subranges, booleans and enumerations get their full type range.
    static constexpr int64_t kDefaultBound = int64_t(1) << 24;
    Unknown u;
    u.id = static_cast<UnknownId>(unknowns_.size());
    u.name = std::move(name);
    u.type = type;
    switch (type->kind) {
    case TypeKind::Integer:
        u.dom = FiniteDomain(-kDefaultBound, kDefaultBound);
        break;
    case TypeKind::Subrange:
        u.dom = FiniteDomain(type->lo, type->hi);
        break;
    case TypeKind::Boolean:
        u.dom = FiniteDomain(0, 1);
        break;
    case TypeKind::Enum:
        u.dom = FiniteDomain(0, static_cast<int64_t>(type->members.size()) - 1);
        break;
    case TypeKind::Real:
        u.is_real = true;
        break;
    default:
        assert(false && "unknown must have a simple type");
    }
    unknowns_.push_back(std::move(u));
    watchers_.emplace_back();
    return unknowns_.back().id;
}

bool Store::is_determined(UnknownId u) const {
    const Unknown& un = unknowns_[u];
    return un.is_real ? reals_.determined(u) : un.dom.is_singleton();
}

std::optional<int64_t> Store::determined_ordinal(UnknownId u) const {
    const Unknown& un = unknowns_[u];
    if (un.is_real || !un.dom.is_singleton()) return std::nullopt;
    return un.dom.single_value();
}

std::optional<double> Store::determined_real(UnknownId u) const {
    return reals_.value(u);
}

std::optional<Store::SuspendedInfo> Store::active_suspended() const {
    for (const auto& rec : cons_) {
        if (!rec || !rec->active) continue;
        if (const auto* s = std::get_if<SuspendedCon>(&rec->body))
            return SuspendedInfo{render_constraint(rec->body), s->loc};
    }
    return std::nullopt;
}

// --- internal state changes ----------------------------------------------------

ConstraintId Store::push_constraint(ConstraintBody body) {
    ConstraintId id = static_cast<ConstraintId>(cons_.size());
    ConstraintRec rec;
    rec.id = id;
    rec.body = std::move(body);
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, LinearCon>) {
                for (const auto& [c, u] : b.terms) watchers_[u].push_back(id);
            } else if constexpr (std::is_same_v<T, AllDiffCon> ||
                                 std::is_same_v<T, AtMostCon>) {
                for (UnknownId u : b.vars) watchers_[u].push_back(id);
            } else if constexpr (std::is_same_v<T, SuspendedCon>) {
                for (UnknownId u : b.blockers) watchers_[u].push_back(id);
            }
        },
        rec.body);
    cons_.push_back(std::move(rec));
    queued_.push_back(0);
    trail_.push(Trail::ConstraintAdded{id});
    return id;
}

void Store::enqueue(ConstraintId id) {
    if (queued_[id]) return;
    queued_[id] = 1;
    queue_.push_back(id);
}

void Store::deactivate(ConstraintRec& rec) {
    if (!rec.active) return;
    trail_.push(Trail::ActiveChanged{rec.id, true});
    rec.active = false;
}

void Store::set_bottom() {
    if (bottom_) return;
    trail_.push(Trail::BottomSet{});
    bottom_ = true;
}

bool Store::set_domain(UnknownId u, FiniteDomain nd, ConstraintId self) {
    Unknown& un = unknowns_[u];
    if (nd == un.dom) return true;
    assert(nd.count() < un.dom.count() && "domains only shrink");
    trail_.push(Trail::DomainShrink{u, un.dom});
    bool emptied = nd.empty();
    un.dom = std::move(nd);
    if (emptied) {
        ++empty_domains_;
        return false;
    }
    for (ConstraintId cid : watchers_[u]) {
        if (cid == self) continue;
        if (cons_[cid] && cons_[cid]->active) enqueue(cid);
    }
    return true;
}

// --- undo callbacks --------------------------------------------------------------

void Store::undo_remove_constraint(ConstraintId id) {
    assert(id < cons_.size() && cons_[id].has_value());
    auto unwatch = [&](UnknownId u) {
        auto& w = watchers_[u];
        for (size_t i = w.size(); i-- > 0;) {
            if (w[i] == id) {
                w.erase(w.begin() + static_cast<long>(i));
                return;
            }
        }
        assert(false && "missing watcher entry");
    };
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, LinearCon>) {
                for (const auto& [c, u] : b.terms) unwatch(u);
            } else if constexpr (std::is_same_v<T, AllDiffCon> ||
                                 std::is_same_v<T, AtMostCon>) {
                for (UnknownId u : b.vars) unwatch(u);
            } else if constexpr (std::is_same_v<T, SuspendedCon>) {
                for (UnknownId u : b.blockers) unwatch(u);
            }
        },
        cons_[id]->body);
    cons_[id].reset();
    while (!cons_.empty() && !cons_.back().has_value()) {
        cons_.pop_back();
        queued_.pop_back();
    }
}

void Store::undo_set_active(ConstraintId id, bool active) {
    assert(id < cons_.size() && cons_[id].has_value());
    cons_[id]->active = active;
}

void Store::undo_domain(UnknownId u, FiniteDomain old) {
    Unknown& un = unknowns_[u];
    if (un.dom.empty() && !old.empty()) --empty_domains_;
    un.dom = std::move(old);
}

// --- propagation -------------------------------------------------------------------

bool Store::propagate() {
    while (!queue_.empty() && !failed()) {
        ConstraintId id = queue_.front();
        queue_.pop_front();
        queued_[id] = 0;
        if (!cons_[id] || !cons_[id]->active) continue;
        if (!run_propagator(*cons_[id])) break;
    }
    if (failed()) {
        for (ConstraintId id : queue_) queued_[id] = 0;
        queue_.clear();
        return false;
    }
    return true;
}

bool Store::run_propagator(ConstraintRec& rec) {
    return std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, LinearCon>) return prop_linear(rec);
            else if constexpr (std::is_same_v<T, AllDiffCon>) return prop_all_different(rec);
            else if constexpr (std::is_same_v<T, AtMostCon>) return prop_at_most(rec);
            else if constexpr (std::is_same_v<T, SuspendedCon>) return prop_suspended(rec);
            else return true; // real equations are solved eagerly at tell time
        },
        rec.body);
}

// Exact support filtering for small assignment spaces: keeps each variable's
// values that occur in some satisfying assignment, fails on zero support and
// deactivates the constraint when every assignment satisfies it.
bool Store::support_filter(
    ConstraintRec& rec, const std::vector<UnknownId>& vars,
    const std::function<bool(const std::vector<int64_t>&)>& pred,
    bool* applied) {
    *applied = false;
    std::vector<UnknownId> uniq;
    std::vector<size_t> slot_of(vars.size());
    for (size_t k = 0; k < vars.size(); ++k) {
        auto it = std::find(uniq.begin(), uniq.end(), vars[k]);
        if (it == uniq.end()) {
            slot_of[k] = uniq.size();
            uniq.push_back(vars[k]);
        } else {
            slot_of[k] = static_cast<size_t>(it - uniq.begin());
        }
    }

    int64_t product = 1;
    for (UnknownId u : uniq) {
        int64_t n = unknowns_[u].dom.count();
        if (n == 0) return true; // store already failed; nothing to do
        if (product > kEnumLimit / n) return true;
        product *= n;
    }
    *applied = true;

    std::vector<std::vector<int64_t>> domvals;
    domvals.reserve(uniq.size());
    for (UnknownId u : uniq) domvals.push_back(unknowns_[u].dom.values());

    std::vector<std::vector<char>> supported(uniq.size());
    for (size_t i = 0; i < uniq.size(); ++i)
        supported[i].assign(domvals[i].size(), 0);

    std::vector<size_t> idx(uniq.size(), 0);
    std::vector<int64_t> by_var(vars.size());
    int64_t sat = 0;

    bool done = uniq.empty();
    while (!done) {
        for (size_t k = 0; k < vars.size(); ++k)
            by_var[k] = domvals[slot_of[k]].empty() ? 0 : domvals[slot_of[k]][idx[slot_of[k]]];
        if (pred(by_var)) {
            ++sat;
            for (size_t i = 0; i < uniq.size(); ++i) supported[i][idx[i]] = 1;
        }
        size_t d = uniq.size();
        for (;;) {
            if (d == 0) {
                done = true;
                break;
            }
            --d;
            if (++idx[d] < domvals[d].size()) break;
            idx[d] = 0;
        }
    }
    if (uniq.empty()) {
        // ground constraint: evaluate once
        if (pred(by_var)) {
            deactivate(rec);
            return true;
        }
        set_bottom();
        return false;
    }

    if (sat == 0) {
        set_bottom();
        return false;
    }
    if (sat == product) {
        deactivate(rec);
        return true;
    }
    for (size_t i = 0; i < uniq.size(); ++i) {
        std::vector<int64_t> keep;
        for (size_t k = 0; k < domvals[i].size(); ++k)
            if (supported[i][k]) keep.push_back(domvals[i][k]);
        FiniteDomain nd = FiniteDomain::from_sorted_values(keep);
        if (!(nd == unknowns_[uniq[i]].dom))
            if (!set_domain(uniq[i], std::move(nd), rec.id)) return false;
    }
    return true;
}

bool Store::prop_linear(ConstraintRec& rec) {
    auto& con = std::get<LinearCon>(rec.body);

    std::vector<UnknownId> vars;
    vars.reserve(con.terms.size());
    for (const auto& [c, u] : con.terms) vars.push_back(u);

    bool applied = false;
    bool ok = support_filter(
        rec, vars,
        [&](const std::vector<int64_t>& vals) {
            int64_t total = 0;
            for (size_t i = 0; i < con.terms.size(); ++i)
                total += con.terms[i].first * vals[i];
            return eval_rel(con.rel, total, con.rhs);
        },
        &applied);
    if (applied) return ok;

    // Weak rules for large domains. Normalize <,> into <=,>= (integers).
    RelOp rel = con.rel;
    int64_t rhs = con.rhs;
    if (rel == RelOp::Lt) { rel = RelOp::Le; rhs -= 1; }
    if (rel == RelOp::Gt) { rel = RelOp::Ge; rhs += 1; }

    // Substitute determined unknowns.
    int64_t base = 0;
    std::vector<std::pair<int64_t, UnknownId>> undet;
    for (const auto& [c, u] : con.terms) {
        if (auto v = determined_ordinal(u)) base += c * *v;
        else undet.emplace_back(c, u);
    }
    int64_t target = rhs - base; // sum over undet REL target

    if (undet.empty()) {
        if (eval_rel(rel, 0, target)) {
            deactivate(rec);
            return true;
        }
        set_bottom();
        return false;
    }

    if (rel == RelOp::Neq) {
        if (undet.size() > 1) return true; // suspend until one side determined
        auto [c, u] = undet[0];
        if (target % c == 0) {
            FiniteDomain nd = unknowns_[u].dom;
            if (nd.remove(target / c)) {
                if (!set_domain(u, std::move(nd), rec.id)) return false;
            }
        }
        deactivate(rec); // the forbidden value is gone for good
        return true;
    }

    // Arc consistency for two-unknown equations over small domains.
    if (rel == RelOp::Eq && undet.size() == 2) {
        const int64_t c1 = undet[0].first, c2 = undet[1].first;
        const UnknownId u1 = undet[0].second, u2 = undet[1].second;
        const FiniteDomain& d1 = unknowns_[u1].dom;
        const FiniteDomain& d2 = unknowns_[u2].dom;
        if (d1.count() <= 1024 && d2.count() <= 1024) {
            std::vector<int64_t> k1, k2;
            d1.for_each([&](int64_t x) {
                int64_t rest = target - c1 * x;
                if (rest % c2 == 0 && d2.contains(rest / c2)) k1.push_back(x);
            });
            d2.for_each([&](int64_t y) {
                int64_t rest = target - c2 * y;
                if (rest % c1 == 0 && d1.contains(rest / c1)) k2.push_back(y);
            });
            if (k1.empty() || k2.empty()) {
                set_bottom();
                return false;
            }
            if (!set_domain(u1, FiniteDomain::from_sorted_values(k1), rec.id))
                return false;
            if (!set_domain(u2, FiniteDomain::from_sorted_values(k2), rec.id))
                return false;
            return true;
        }
    }

    // Bounds propagation to a local fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        int64_t min_total = 0, max_total = 0;
        for (const auto& [c, u] : undet) {
            const FiniteDomain& d = unknowns_[u].dom;
            if (d.empty()) return false;
            min_total += c > 0 ? c * d.min() : c * d.max();
            max_total += c > 0 ? c * d.max() : c * d.min();
        }
        if (rel == RelOp::Le && max_total <= target) { deactivate(rec); return true; }
        if (rel == RelOp::Ge && min_total >= target) { deactivate(rec); return true; }
        if (rel == RelOp::Eq && min_total == target && max_total == target) {
            deactivate(rec);
            return true;
        }
        for (auto& [c, u] : undet) {
            const FiniteDomain& d = unknowns_[u].dom;
            int64_t self_min = c > 0 ? c * d.min() : c * d.max();
            int64_t self_max = c > 0 ? c * d.max() : c * d.min();
            int64_t rest_min = min_total - self_min;
            int64_t rest_max = max_total - self_max;
            FiniteDomain nd = d;
            bool shrunk = false;
            if (rel == RelOp::Le || rel == RelOp::Eq) {
                // c*x <= target - rest_min
                int64_t bound = target - rest_min;
                shrunk |= c > 0 ? nd.clamp_max(floor_div(bound, c))
                                : nd.clamp_min(ceil_div(bound, c));
            }
            if (rel == RelOp::Ge || rel == RelOp::Eq) {
                // c*x >= target - rest_max
                int64_t bound = target - rest_max;
                shrunk |= c > 0 ? nd.clamp_min(ceil_div(bound, c))
                                : nd.clamp_max(floor_div(bound, c));
            }
            if (shrunk) {
                if (!set_domain(u, std::move(nd), rec.id)) return false;
                changed = true;
                break; // bounds of the others moved; recompute
            }
        }
    }
    return true;
}

bool Store::prop_all_different(ConstraintRec& rec) {
    auto& con = std::get<AllDiffCon>(rec.body);
    if (con.vars.size() < 2) {
        deactivate(rec);
        return true;
    }

    bool applied = false;
    bool ok = support_filter(
        rec, con.vars,
        [&](const std::vector<int64_t>& vals) {
            for (size_t i = 0; i < vals.size(); ++i)
                for (size_t j = i + 1; j < vals.size(); ++j)
                    if (vals[i] == vals[j]) return false;
            return true;
        },
        &applied);
    if (applied) return ok;

    // Pairwise reasoning: a determined member's value leaves the others.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < con.vars.size(); ++i) {
            auto v = determined_ordinal(con.vars[i]);
            if (!v) continue;
            for (size_t j = 0; j < con.vars.size(); ++j) {
                if (j == i) continue;
                FiniteDomain nd = unknowns_[con.vars[j]].dom;
                if (nd.remove(*v)) {
                    if (!set_domain(con.vars[j], std::move(nd), rec.id))
                        return false;
                    changed = true;
                }
            }
        }
    }
    bool all_det = true;
    for (UnknownId u : con.vars)
        if (!is_determined(u)) { all_det = false; break; }
    if (all_det) deactivate(rec); // determined and pairwise distinct by now
    return true;
}

bool Store::prop_at_most(ConstraintRec& rec) {
    auto& con = std::get<AtMostCon>(rec.body);
    // Count members determined to the value; no lookahead on possible counts.
    int64_t det = 0, possible = 0;
    for (UnknownId u : con.vars) {
        const FiniteDomain& d = unknowns_[u].dom;
        if (d.is_singleton() && d.single_value() == con.value) ++det;
        if (d.contains(con.value)) ++possible;
    }
    if (det > con.bound) {
        set_bottom();
        return false;
    }
    if (det == con.bound) {
        for (UnknownId u : con.vars) {
            const FiniteDomain& d = unknowns_[u].dom;
            if (d.is_singleton()) continue;
            FiniteDomain nd = d;
            if (nd.remove(con.value))
                if (!set_domain(u, std::move(nd), rec.id)) return false;
        }
        deactivate(rec);
        return true;
    }
    if (possible <= con.bound) deactivate(rec);
    return true;
}

bool Store::prop_suspended(ConstraintRec& rec) {
    auto& con = std::get<SuspendedCon>(rec.body);
    for (UnknownId u : con.blockers)
        if (!is_determined(u)) return true; // still waiting
    // Rewrite and re-tell with the subscripts now determined.
    SuspendedCon moved;
    moved.rel = con.rel;
    moved.lhs = std::move(con.lhs);
    moved.rhs = std::move(con.rhs);
    moved.is_real = con.is_real;
    moved.loc = con.loc;
    deactivate(rec);
    return install_expr(moved.rel, std::move(moved.lhs), std::move(moved.rhs),
                        moved.is_real, moved.loc, nullptr);
}

// --- evaluated-form resolution ------------------------------------------------------

namespace {

struct IntPoly {
    std::map<UnknownId, int64_t> coef;
    int64_t c = 0;
};
struct RealPoly {
    std::map<UnknownId, double> coef;
    double c = 0.0;
};

} // namespace

// Resolver walks an EvalExpr; any undetermined unknown inside an index
// expression blocks resolution and becomes a watcher of the suspension.
class EvalResolver {
public:
    explicit EvalResolver(Store& s) : s_(s) {}

    bool blocked() const { return !blockers_.empty(); }
    std::vector<UnknownId> take_blockers() {
        std::sort(blockers_.begin(), blockers_.end());
        blockers_.erase(std::unique(blockers_.begin(), blockers_.end()),
                        blockers_.end());
        return std::move(blockers_);
    }

    void resolve_int(const EvalExpr& e, IntPoly& out, int64_t mult) {
        switch (e.kind) {
        case EvalExpr::K::IntNum: out.c += mult * e.ival; return;
        case EvalExpr::K::UnknownLeaf: out.coef[e.uid] += mult; return;
        case EvalExpr::K::Add:
            resolve_int(*e.kids[0], out, mult);
            resolve_int(*e.kids[1], out, mult);
            return;
        case EvalExpr::K::Sub:
            resolve_int(*e.kids[0], out, mult);
            resolve_int(*e.kids[1], out, -mult);
            return;
        case EvalExpr::K::Neg: resolve_int(*e.kids[0], out, -mult); return;
        case EvalExpr::K::Mul: // kids[0] is a literal by construction
            resolve_int(*e.kids[1], out, mult * e.kids[0]->ival);
            return;
        case EvalExpr::K::Index:
        case EvalExpr::K::FieldSel: {
            const Value* cell;
            const Type* type;
            if (!resolve_cell(e, &cell, &type)) return;
            out.coef[cell->unknown_id()] += mult;
            return;
        }
        default:
            assert(false && "real node in integer constraint");
        }
    }

    void resolve_real(const EvalExpr& e, RealPoly& out, double mult) {
        switch (e.kind) {
        case EvalExpr::K::IntNum: out.c += mult * static_cast<double>(e.ival); return;
        case EvalExpr::K::RealNum: out.c += mult * e.rval; return;
        case EvalExpr::K::UnknownLeaf:
            if (s_.unknowns_[e.uid].is_real) out.coef[e.uid] += mult;
            else {
                // integer unknown inside a real expression: must be determined
                // (the checker only lets determined reads through arithmetic
                // with reals via suspension-free positions)
                out.coef[e.uid] += mult;
            }
            return;
        case EvalExpr::K::Add:
            resolve_real(*e.kids[0], out, mult);
            resolve_real(*e.kids[1], out, mult);
            return;
        case EvalExpr::K::Sub:
            resolve_real(*e.kids[0], out, mult);
            resolve_real(*e.kids[1], out, -mult);
            return;
        case EvalExpr::K::Neg: resolve_real(*e.kids[0], out, -mult); return;
        case EvalExpr::K::Mul: {
            const EvalExpr& k0 = *e.kids[0];
            double f = k0.kind == EvalExpr::K::RealNum ? k0.rval
                                                       : static_cast<double>(k0.ival);
            resolve_real(*e.kids[1], out, mult * f);
            return;
        }
        case EvalExpr::K::DivReal: {
            const EvalExpr& k1 = *e.kids[1];
            double f = k1.kind == EvalExpr::K::RealNum ? k1.rval
                                                       : static_cast<double>(k1.ival);
            resolve_real(*e.kids[0], out, mult / f);
            return;
        }
        case EvalExpr::K::Index:
        case EvalExpr::K::FieldSel: {
            const Value* cell;
            const Type* type;
            if (!resolve_cell(e, &cell, &type)) return;
            out.coef[cell->unknown_id()] += mult;
            return;
        }
        case EvalExpr::K::ArrayRef:
            assert(false && "array value in scalar position");
        }
    }

    // Resolves a selector chain to a concrete cell. False when blocked.
    bool resolve_cell(const EvalExpr& e, const Value** cell, const Type** type) {
        switch (e.kind) {
        case EvalExpr::K::ArrayRef:
            *cell = e.cell;
            *type = e.cell_type;
            return true;
        case EvalExpr::K::FieldSel: {
            const Value* base;
            const Type* btype;
            if (!resolve_cell(*e.kids[0], &base, &btype)) return false;
            *cell = &base->comp().elems[static_cast<size_t>(e.field_index)];
            *type = btype->fields[static_cast<size_t>(e.field_index)].type.get();
            return true;
        }
        case EvalExpr::K::Index: {
            const Value* base;
            const Type* btype;
            if (!resolve_cell(*e.kids[0], &base, &btype)) return false;
            IntPoly ip;
            resolve_int(*e.kids[1], ip, 1);
            int64_t idx = ip.c;
            bool ok = true;
            for (const auto& [u, c] : ip.coef) {
                if (c == 0) continue;
                if (auto v = s_.determined_ordinal(u)) {
                    idx += c * *v;
                } else {
                    blockers_.push_back(u);
                    ok = false;
                }
            }
            if (!ok) return false;
            if (idx < btype->index_lo || idx > btype->index_hi)
                throw RuntimeError(loc_, "index " + std::to_string(idx) +
                                             " outside [" +
                                             std::to_string(btype->index_lo) + ".." +
                                             std::to_string(btype->index_hi) +
                                             "] in constraint");
            *cell = &base->comp().elems[static_cast<size_t>(idx - btype->index_lo)];
            *type = btype->elem.get();
            return true;
        }
        default:
            assert(false && "not a selector");
            return false;
        }
    }

    void set_loc(SourceLoc loc) { loc_ = loc; }

private:
    Store& s_;
    std::vector<UnknownId> blockers_;
    SourceLoc loc_;
};

bool Store::install_expr(RelOp rel, EvalExprPtr lhs, EvalExprPtr rhs,
                         bool is_real, SourceLoc loc, std::string* traced) {
    EvalResolver res(*this);
    res.set_loc(loc);

    auto suspend = [&]() {
        if (traced)
            *traced = render_eval(*lhs) + " " + rel_text(rel) + " " +
                      render_eval(*rhs);
        SuspendedCon s;
        s.rel = rel;
        s.lhs = std::move(lhs);
        s.rhs = std::move(rhs);
        s.is_real = is_real;
        s.blockers = res.take_blockers();
        s.loc = loc;
        ConstraintId id = push_constraint(ConstraintBody(std::move(s)));
        enqueue(id);
    };

    if (is_real) {
        RealPoly pl, pr;
        res.resolve_real(*lhs, pl, 1.0);
        res.resolve_real(*rhs, pr, 1.0);
        if (res.blocked()) {
            suspend();
            return true;
        }
        RealEqCon con;
        double rhs_c = pr.c - pl.c;
        std::map<UnknownId, double> all = pl.coef;
        for (const auto& [u, c] : pr.coef) all[u] -= c;
        for (const auto& [u, c] : all) {
            // integer unknowns inside a real constraint must be determined
            if (!unknowns_[u].is_real) {
                auto v = determined_ordinal(u);
                if (!v)
                    throw RuntimeError(loc, "undetermined integer unknown '" +
                                                unknowns_[u].name +
                                                "' in real constraint");
                rhs_c -= c * static_cast<double>(*v);
                continue;
            }
            if (c != 0.0) con.terms.emplace_back(c, u);
        }
        con.rhs = rhs_c;
        if (traced) *traced = render_constraint(ConstraintBody(con));
        return install_real(std::move(con));
    }

    IntPoly pl, pr;
    res.resolve_int(*lhs, pl, 1);
    res.resolve_int(*rhs, pr, 1);
    if (res.blocked()) {
        suspend();
        return true;
    }

    LinearCon con;
    con.rel = rel;
    con.rhs = pr.c - pl.c;
    std::map<UnknownId, int64_t> all = pl.coef;
    for (const auto& [u, c] : pr.coef) all[u] -= c;
    for (const auto& [u, c] : all)
        if (c != 0) con.terms.emplace_back(c, u);

    if (con.terms.empty()) {
        bool truth = eval_rel(rel, 0, con.rhs);
        if (traced)
            *traced = render_eval(*lhs) + " " + rel_text(rel) + " " +
                      render_eval(*rhs);
        if (truth) return true;
        set_bottom();
        return false;
    }
    if (traced) *traced = render_constraint(ConstraintBody(con));
    ConstraintId id = push_constraint(ConstraintBody(std::move(con)));
    enqueue(id);
    return true;
}

bool Store::install_real(RealEqCon con) {
    trail_.push(Trail::RealState{reals_});
    std::vector<std::pair<double, UnknownId>> terms = con.terms;
    RealSolver::TellResult r = reals_.tell(std::move(terms), -con.rhs);
    ConstraintId id = push_constraint(ConstraintBody(std::move(con)));
    switch (r) {
    case RealSolver::TellResult::Failed:
        set_bottom();
        return false;
    case RealSolver::TellResult::Redundant:
        deactivate(*cons_[id]);
        return true;
    default:
        return true;
    }
}

// --- public tells ----------------------------------------------------------------------

void Store::trace_tell(const std::string& rendered, bool ok) {
    if (trace_) trace_("TELL " + rendered + " -> " + (ok ? "ok" : "fail"));
}

bool Store::tell_linear(LinearCon con) {
    std::string r = render_constraint(ConstraintBody(con));
    bool ok;
    if (con.terms.empty()) {
        ok = eval_rel(con.rel, 0, con.rhs);
        if (!ok) set_bottom();
    } else {
        ConstraintId id = push_constraint(ConstraintBody(std::move(con)));
        enqueue(id);
        ok = propagate();
    }
    trace_tell(r, ok);
    return ok;
}

bool Store::tell_all_different(std::vector<UnknownId> vars) {
    AllDiffCon con{std::move(vars)};
    std::string r = render_constraint(ConstraintBody(con));
    ConstraintId id = push_constraint(ConstraintBody(std::move(con)));
    enqueue(id);
    bool ok = propagate();
    trace_tell(r, ok);
    return ok;
}

bool Store::tell_at_most(int64_t bound, std::vector<UnknownId> vars,
                         int64_t value) {
    AtMostCon con{bound, std::move(vars), value};
    std::string r = render_constraint(ConstraintBody(con));
    ConstraintId id = push_constraint(ConstraintBody(std::move(con)));
    enqueue(id);
    bool ok = propagate();
    trace_tell(r, ok);
    return ok;
}

bool Store::tell_real_eq(RealEqCon con) {
    std::string r = render_constraint(ConstraintBody(con));
    bool ok = install_real(std::move(con)) && propagate();
    trace_tell(r, ok);
    return ok;
}

bool Store::tell_ground(bool truth, const std::string& display) {
    if (!truth) set_bottom();
    trace_tell(display, truth);
    return truth;
}

bool Store::tell_expr(RelOp rel, EvalExprPtr lhs, EvalExprPtr rhs, bool is_real,
                      SourceLoc loc) {
    std::string traced;
    bool ok = install_expr(rel, std::move(lhs), std::move(rhs), is_real, loc,
                           &traced) &&
              propagate();
    trace_tell(traced, ok);
    return ok;
}

// --- rendering -----------------------------------------------------------------------

std::string Store::render_value(const Unknown& u, int64_t ordinal) const {
    switch (u.type->kind) {
    case TypeKind::Boolean: return ordinal ? "TRUE" : "FALSE";
    case TypeKind::Enum:
        if (ordinal >= 0 && ordinal < static_cast<int64_t>(u.type->members.size()))
            return u.type->members[static_cast<size_t>(ordinal)];
        return std::to_string(ordinal);
    default:
        return std::to_string(ordinal);
    }
}

std::string Store::render_term_sum(
    const std::vector<std::pair<int64_t, UnknownId>>& terms) const {
    std::string out;
    for (size_t i = 0; i < terms.size(); ++i) {
        auto [c, u] = terms[i];
        const std::string& name = unknowns_[u].name;
        int64_t a = c < 0 ? -c : c;
        if (i == 0) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (a != 1) out += std::to_string(a) + "*";
        out += name;
    }
    return out;
}

std::string Store::render_eval(const EvalExpr& e) const {
    switch (e.kind) {
    case EvalExpr::K::IntNum: return std::to_string(e.ival);
    case EvalExpr::K::RealNum: return fmt_real(e.rval);
    case EvalExpr::K::UnknownLeaf: return unknowns_[e.uid].name;
    case EvalExpr::K::ArrayRef: return e.display;
    case EvalExpr::K::FieldSel: return render_eval(*e.kids[0]) + "." + e.field_name;
    case EvalExpr::K::Index: {
        // collapse chained index nodes into the A[i,j] form
        std::string base = render_eval(*e.kids[0]);
        std::string idx = render_eval(*e.kids[1]);
        if (e.kids[0]->kind == EvalExpr::K::Index && !base.empty() &&
            base.back() == ']') {
            base.pop_back();
            return base + "," + idx + "]";
        }
        return base + "[" + idx + "]";
    }
    case EvalExpr::K::Add:
        return render_eval(*e.kids[0]) + " + " + render_eval(*e.kids[1]);
    case EvalExpr::K::Sub:
        return render_eval(*e.kids[0]) + " - " + render_eval(*e.kids[1]);
    case EvalExpr::K::Mul:
        return render_eval(*e.kids[0]) + "*" + render_eval(*e.kids[1]);
    case EvalExpr::K::Neg: return "-" + render_eval(*e.kids[0]);
    case EvalExpr::K::DivReal:
        return render_eval(*e.kids[0]) + "/" + render_eval(*e.kids[1]);
    }
    return "?";
}

std::string Store::render_constraint(const ConstraintBody& body) const {
    return std::visit(
        [&](const auto& b) -> std::string {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, LinearCon>) {
                std::string rhs;
                if (b.terms.size() == 1 && b.terms[0].first == 1)
                    rhs = render_value(unknowns_[b.terms[0].second], b.rhs);
                else
                    rhs = std::to_string(b.rhs);
                return render_term_sum(b.terms) + " " + rel_text(b.rel) + " " + rhs;
            } else if constexpr (std::is_same_v<T, AllDiffCon>) {
                std::string out = "ALL_DIFFERENT(";
                for (size_t i = 0; i < b.vars.size(); ++i) {
                    if (i) out += ",";
                    out += unknowns_[b.vars[i]].name;
                }
                return out + ")";
            } else if constexpr (std::is_same_v<T, AtMostCon>) {
                std::string out = "AT_MOST(" + std::to_string(b.bound) + ",{";
                for (size_t i = 0; i < b.vars.size(); ++i) {
                    if (i) out += ",";
                    out += unknowns_[b.vars[i]].name;
                }
                out += "},";
                out += b.vars.empty() ? std::to_string(b.value)
                                      : render_value(unknowns_[b.vars[0]], b.value);
                return out + ")";
            } else if constexpr (std::is_same_v<T, RealEqCon>) {
                std::string out;
                for (size_t i = 0; i < b.terms.size(); ++i) {
                    auto [c, u] = b.terms[i];
                    double a = c < 0 ? -c : c;
                    if (i == 0) {
                        if (c < 0) out += "-";
                    } else {
                        out += c < 0 ? " - " : " + ";
                    }
                    if (a != 1.0) out += fmt_real(a) + "*";
                    out += unknowns_[u].name;
                }
                if (b.terms.empty()) out = "0";
                return out + " = " + fmt_real(b.rhs);
            } else {
                const SuspendedCon& s = b;
                return render_eval(*s.lhs) + " " + rel_text(s.rel) + " " +
                       render_eval(*s.rhs);
            }
        },
        body);
}

std::string Store::dump() const {
    std::string out;
    for (const Unknown& u : unknowns_) {
        Type base = *u.type; // every line is an unknown; drop the qualifier
        base.constrained = false;
        out += u.name + " : " + base.display() + " ";
        if (u.is_real) {
            if (auto v = reals_.value(u.id)) {
                out += "= " + fmt_real(*v);
            } else {
                auto it = reals_.rows().find(u.id);
                if (it == reals_.rows().end()) {
                    out += "free";
                } else {
                    out += "= " + fmt_real(it->second.c);
                    for (const auto& [c, ru] : it->second.terms)
                        out += (c < 0 ? " - " : " + ") +
                               (std::fabs(c) == 1.0 ? "" : fmt_real(std::fabs(c)) + "*") +
                               unknowns_[ru].name;
                }
            }
        } else if (u.dom.is_singleton()) {
            out += "= " + render_value(u, u.dom.single_value());
        } else if (u.type->kind == TypeKind::Boolean ||
                   u.type->kind == TypeKind::Enum) {
            out += "= {";
            bool first = true;
            u.dom.for_each([&](int64_t v) {
                if (!first) out += ",";
                first = false;
                out += render_value(u, v);
            });
            out += "}";
        } else {
            out += "= " + u.dom.str();
        }
        out += "\n";
    }
    if (bottom_) out += "_|_\n";
    for (const auto& rec : cons_) {
        if (!rec || !rec->active) continue;
        out += render_constraint(rec->body) + "\n";
    }
    return out;
}

} // namespace almac
