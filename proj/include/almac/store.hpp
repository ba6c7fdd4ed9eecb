#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "almac/diag.hpp"
#include "almac/domain.hpp"
#include "almac/real_solver.hpp"
#include "almac/trail.hpp"
#include "almac/types.hpp"
#include "almac/value.hpp"

namespace almac {

struct Unknown {
    UnknownId id = 0;
    std::string name; // declaration path, e.g. X[3] or Z.No
    TypePtr type;     // the constrained simple type
    bool is_real = false;
    FiniteDomain dom; // unused for reals (the solver owns their state)
};

enum class RelOp : uint8_t { Eq, Neq, Le, Lt, Ge, Gt };
RelOp negate_rel(RelOp op);
const char* rel_text(RelOp op);
bool eval_rel(RelOp op, int64_t lhs, int64_t rhs);

// --- symbolic evaluated-form expressions -----------------------------------
// Only needed when an array is subscripted by an expression containing an
// undetermined unknown; everything else is resolved to unknowns and literals
// when the constraint is evaluated.
struct EvalExpr;
using EvalExprPtr = std::unique_ptr<EvalExpr>;

struct EvalExpr {
    enum class K : uint8_t {
        IntNum, RealNum, UnknownLeaf, ArrayRef, Index, FieldSel,
        Add, Sub, Mul, Neg, DivReal,
    };
    K kind;
    int64_t ival = 0;
    double rval = 0.0;
    UnknownId uid = 0;
    // ArrayRef / resolved cells
    Value* cell = nullptr;
    const Type* cell_type = nullptr;
    std::string display;
    int field_index = -1;
    std::string field_name;
    std::vector<EvalExprPtr> kids;

    EvalExprPtr clone() const;
};

struct LinearCon { // sum(coef*unknown) REL rhs
    RelOp rel;
    std::vector<std::pair<int64_t, UnknownId>> terms; // sorted by id, coef != 0
    int64_t rhs = 0;
};
struct AllDiffCon { std::vector<UnknownId> vars; };
struct AtMostCon {
    int64_t bound;
    std::vector<UnknownId> vars;
    int64_t value; // ordinal of the counted value
};
struct RealEqCon { // sum(coef*unknown) = rhs (kept for the dump; solving is
    std::vector<std::pair<double, UnknownId>> terms; // delegated to RealSolver)
    double rhs = 0.0;
};
struct SuspendedCon {
    RelOp rel;
    EvalExprPtr lhs, rhs;
    bool is_real = false;
    std::vector<UnknownId> blockers; // undetermined unknowns in index positions
    SourceLoc loc;                   // original constraint location
};

using ConstraintBody =
    std::variant<LinearCon, AllDiffCon, AtMostCon, RealEqCon, SuspendedCon>;

struct ConstraintRec {
    ConstraintId id = 0;
    bool active = true;
    ConstraintBody body;
};

// ---------------------------------------------------------------------------
// Constraint store: unknown table, active evaluated-form constraints, and a
// FIFO propagation queue. All state changes go through the trail; marks are
// trail marks. Exactly one run owns a store.
// ---------------------------------------------------------------------------
class Store {
public:
    explicit Store(Trail& trail) : trail_(trail) {}

    // Setup (untrailed; happens before execution starts).
    UnknownId add_unknown(std::string name, TypePtr type);

    const Unknown& unknown(UnknownId u) const { return unknowns_[u]; }
    size_t unknown_count() const { return unknowns_.size(); }

    bool failed() const { return bottom_ || empty_domains_ > 0; }

    bool is_determined(UnknownId u) const;
    // Determined value as ordinal (finite) or real; nullopt if undetermined.
    std::optional<int64_t> determined_ordinal(UnknownId u) const;
    std::optional<double> determined_real(UnknownId u) const;

    // Tells. Return false iff the store became failed. A failed tell leaves
    // the failure trailed; the caller backtracks (or retracts) via the trail.
    bool tell_linear(LinearCon con);
    bool tell_all_different(std::vector<UnknownId> vars);
    bool tell_at_most(int64_t bound, std::vector<UnknownId> vars, int64_t value);
    bool tell_real_eq(RealEqCon con);
    bool tell_ground(bool truth, const std::string& display);

    // Evaluated-form entry point: resolves both sides into a linear
    // constraint (integer or real world); suspends instead when an index
    // still contains an undetermined unknown.
    bool tell_expr(RelOp rel, EvalExprPtr lhs, EvalExprPtr rhs, bool is_real,
                   SourceLoc loc);

    // Resumes propagation to fixpoint; false iff failed.
    bool propagate();

    const RealSolver& reals() const { return reals_; }

    // First active suspended constraint, if any (checked at solution time).
    struct SuspendedInfo {
        std::string text;
        SourceLoc loc;
    };
    std::optional<SuspendedInfo> active_suspended() const;

    // Store dump: unknowns in declaration order, then active constraints in
    // id order. `name : type = v` when determined, `= {v1,v2,...}` otherwise.
    std::string dump() const;
    std::string render_constraint(const ConstraintBody& body) const;
    std::string render_value(const Unknown& u, int64_t ordinal) const;

    void set_trace(std::function<void(const std::string&)> hook) {
        trace_ = std::move(hook);
    }

    // Trail callbacks.
    void undo_remove_constraint(ConstraintId id);
    void undo_set_active(ConstraintId id, bool active);
    void undo_domain(UnknownId u, FiniteDomain old);
    void undo_bottom() { bottom_ = false; }
    void undo_real(RealSolver old) { reals_ = std::move(old); }

private:
    friend class EvalResolver;

    ConstraintId push_constraint(ConstraintBody body);
    void enqueue(ConstraintId id);
    void deactivate(ConstraintRec& rec);
    void set_bottom();
    // Replaces u's domain (must shrink); false if emptied.
    bool set_domain(UnknownId u, FiniteDomain nd, ConstraintId self);

    bool run_propagator(ConstraintRec& rec);
    bool prop_linear(ConstraintRec& rec);
    bool prop_all_different(ConstraintRec& rec);
    bool prop_at_most(ConstraintRec& rec);
    bool prop_suspended(ConstraintRec& rec);

    // Resolves and installs an evaluated-form constraint without draining
    // the queue (shared by tell_expr and suspended re-evaluation). Returns
    // false iff the store failed immediately. *traced receives the
    // normalized rendering of whatever was installed.
    bool install_expr(RelOp rel, EvalExprPtr lhs, EvalExprPtr rhs,
                      bool is_real, SourceLoc loc, std::string* traced);
    bool install_real(RealEqCon con);

    // Exact support filtering when the assignment space is small.
    static constexpr int64_t kEnumLimit = 4096;
    bool support_filter(ConstraintRec& rec, const std::vector<UnknownId>& vars,
                        const std::function<bool(const std::vector<int64_t>&)>& pred,
                        bool* applied);

    bool tell_common(ConstraintBody body);
    void trace_tell(const std::string& rendered, bool ok);
    std::string render_term_sum(const std::vector<std::pair<int64_t, UnknownId>>& terms) const;
    std::string render_eval(const EvalExpr& e) const;

    Trail& trail_;
    std::vector<Unknown> unknowns_;
    std::vector<std::optional<ConstraintRec>> cons_;
    std::vector<std::vector<ConstraintId>> watchers_; // per unknown
    RealSolver reals_;
    bool bottom_ = false;
    int empty_domains_ = 0;
    std::deque<ConstraintId> queue_;
    std::vector<char> queued_;
    std::function<void(const std::string&)> trace_;
};

} // namespace almac
