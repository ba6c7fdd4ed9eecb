#pragma once

#include <functional>
#include <optional>
#include <string>

#include "almac/machine.hpp"
#include "almac/sema.hpp"

namespace almac {

struct RunResult {
    enum class Outcome { Succeeded, Failed };
    Outcome outcome = Outcome::Failed;
    int64_t solutions = 0;
};

// Tree-walking evaluator in success-continuation style: choice points live
// as native stack frames, so backtracking resumes execution exactly where
// the alternative was created, including inside procedure bodies.
// Deterministic statements (no live choice points left behind) run on an
// iterative fast path to keep stack depth proportional to search depth.
class Interp {
public:
    Interp(const CheckedProgram& prog, Machine& machine);

    // Runs the module body. `on_solution` fires at every success before the
    // mode decides whether to stop or drive the next solution.
    RunResult run(const std::function<void()>& on_solution = {});

    Machine& machine() { return m_; }

    // Test access: copy of a global variable's current value.
    const Value* global_cell(const std::string& name) const;
    const Symbol* global_symbol(const std::string& name) const;

    // Rendering used by WRITE: '-' for uninitialized / undetermined cells.
    std::string format_scalar(const Value& v) const;

private:
    struct LV {
        Value* cell;
        FramePtr anchor;
        const Type* type;
    };

    using Cont = const std::function<bool()>&;

    // setup
    Value build_value(const TypePtr& type, const std::string& path);
    void init_globals();

    // designators / values
    LV resolve_lvalue(const Expr& e);
    LV var_lv(const Symbol* sym);
    Value eval(const Expr& e);
    Value read_cell_strict(const Value& cell, const Type& type, SourceLoc loc);
    int64_t eval_int(const Expr& e);
    bool eval_bool(const Expr& e);
    void write_cell(const LV& lv, const Value& v, SourceLoc loc);
    void check_range(const Type& t, const Value& v, SourceLoc loc);
    bool deep_equal(const Value& a, const Value& b, SourceLoc loc) const;

    // tests / constraints / generalized equality
    bool exec_test(const Expr& e);
    bool tell_constraint(const Expr& e);
    EvalExprPtr build_eval(const Expr& e, bool real_world);
    bool exec_gen_eq(const Expr& lhs, const Expr& rhs, SourceLoc loc);
    bool gen_eq_cells(const LV& a, const LV& b, SourceLoc loc);
    bool gen_eq_cell_value(const LV& a, const Value& v, SourceLoc loc);
    bool scalar_equal(const Value& a, const Value& b) const;

    // statements
    bool exec_stmts(const StmtList& list, size_t i, Cont k);
    bool exec_contained(const StmtList& list);
    bool exec_stmt_any(const Stmt& s, Cont k);
    bool exec_det(const Stmt& s);
    bool exec_leaky(const Stmt& s, Cont k);

    bool exec_if(const IfS& n, Cont k);
    bool exec_while(const WhileS& n, Cont k);
    bool exec_for_core(bool existential, const Symbol* sym, const Expr& lo_e,
                       const Expr& hi_e, const StmtList& body, SourceLoc loc,
                       Cont k);
    bool exec_either(const EitherS& n, SourceLoc loc, Cont k);
    bool exec_forall(const ForallS& n, Cont k);
    bool exec_commit(const CommitS& n, Cont k);
    bool exec_not(const NotS& n, Cont k);
    bool exec_call(const CallS& c, SourceLoc loc, Cont k);
    bool exec_builtin(const CallS& c, SourceLoc loc, Cont k);

    // builtins
    bool exec_indomain(const CallS& c, SourceLoc loc, Cont k);
    bool label_all(std::vector<UnknownId> ids, SourceLoc loc, Cont k);
    bool label_one(UnknownId u, SourceLoc loc, Cont k);
    std::vector<UnknownId> aggregate_unknowns(const Expr& arg);
    void do_write(const Expr& arg);

    std::string render_frame_deep(const Value& v) const;

    const CheckedProgram& prog_;
    Machine& m_;
    FramePtr frame_; // current procedure frame (null at module level)
};

// Convenience for tests and the CLI: parse + check + run a source text.
RunResult run_source(const std::string& source, Machine& machine,
                     const std::function<void()>& on_solution = {});

} // namespace almac
