#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "almac/diag.hpp"
#include "almac/types.hpp"

namespace almac {

struct Expr;
struct Stmt;
struct TypeExpr;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;
using TypeExprPtr = std::unique_ptr<TypeExpr>;
using StmtList = std::vector<StmtPtr>;

enum class BinOp : uint8_t {
    Add, Sub, Mul, RealDiv, IntDiv, Mod,
    And, Or,
    Eq, Neq, Lt, Le, Gt, Ge,
};

enum class UnOp : uint8_t { Neg, Pos, Not };

bool is_relation(BinOp op);
const char* binop_text(BinOp op);

// ---------------------------------------------------------------------------
// Symbols (attached to the AST by the checker)
// ---------------------------------------------------------------------------

enum class ParamMode : uint8_t { Value, Var, Mix };

enum class Builtin : uint8_t {
    Known, Indomain, AllDifferent, AtMost, ListEmpty, ListInsert, Sum,
    Write, WriteLn, Abs,
};

struct ProcDecl;

struct Symbol {
    enum class Kind : uint8_t { Var, Const, EnumLit, Proc, Builtin };
    Kind kind;
    std::string name;

    // Var
    TypePtr type;
    bool global = false;
    int slot = -1;
    bool is_alias = false;    // VAR/MIX formal
    ParamMode mode = ParamMode::Value;

    // Const (folded)
    int64_t const_int = 0;
    double const_real = 0.0;
    bool const_bool = false;
    bool is_real_const = false;

    // EnumLit
    int64_t enum_index = 0;   // type holds the enum descriptor

    // Proc
    const ProcDecl* proc = nullptr;
    int frame_slots = 0;
    bool proc_leaks_choice = false;
    std::vector<const Symbol*> param_syms; // frame slot order
    std::vector<const Symbol*> local_syms;

    // Builtin
    Builtin builtin = Builtin::Write;
};

// ---------------------------------------------------------------------------
// Type expressions (unresolved; bounds folded during checking)
// ---------------------------------------------------------------------------

struct NamedTE { std::string name; }; // includes INTEGER/BOOLEAN/REAL
struct EnumTE { std::vector<std::string> members; };
struct SubrangeTE { ExprPtr lo, hi; };
struct ArrayTE {
    std::vector<std::pair<ExprPtr, ExprPtr>> dims;
    TypeExprPtr elem;
};
struct RecordFieldTE { std::vector<std::string> names; TypeExprPtr type; };
struct RecordTE { std::vector<RecordFieldTE> fields; };
struct ListTE { TypeExprPtr elem; };
struct ConstrainedTE { TypeExprPtr base; };

struct TypeExpr {
    SourceLoc loc;
    std::variant<NamedTE, EnumTE, SubrangeTE, ArrayTE, RecordTE, ListTE,
                 ConstrainedTE>
        node;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct IntLitE { int64_t value; };
struct RealLitE { double value; };
struct BoolLitE { bool value; };
struct StringLitE { std::string value; };
struct NameE {
    std::string name;
    const Symbol* sym = nullptr;
};
struct IndexE {
    ExprPtr base;
    std::vector<ExprPtr> indices;
};
struct FieldE {
    ExprPtr base;
    std::string field;
    int field_index = -1;
};
struct BinE {
    BinOp op;
    ExprPtr lhs, rhs;
};
struct UnE {
    UnOp op;
    ExprPtr operand;
};
struct CallE { // builtin function call in expression position (abs, KNOWN)
    std::string name;
    const Symbol* sym = nullptr;
    std::vector<ExprPtr> args;
};
struct QuantE { // FOR/SOME quantifier used as a boolean expression
    bool existential;
    std::string var;
    const Symbol* sym = nullptr;
    ExprPtr lo, hi;
    StmtList body;
};

struct Expr {
    SourceLoc loc;
    TypePtr type;                  // resolved static type (checker)
    bool mentions_unknown = false; // any unknown occurrence below (checker)
    bool is_constraint = false;    // boolean expr in test position with unknowns
    std::variant<IntLitE, RealLitE, BoolLitE, StringLitE, NameE, IndexE,
                 FieldE, BinE, UnE, CallE, QuantE>
        node;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct AssignS { ExprPtr lhs, rhs; };
struct ExprS { ExprPtr expr; }; // boolean expression used as a statement
struct CallS {
    std::string name;
    const Symbol* sym = nullptr;
    std::vector<ExprPtr> args;
};
struct IfArm { ExprPtr cond; StmtList body; };
struct IfS {
    std::vector<IfArm> arms; // IF + ELSIFs
    StmtList else_body;
};
struct WhileS { ExprPtr cond; StmtList body; };
struct ForS { // also SOME (existential flag)
    bool existential;
    std::string var;
    const Symbol* sym = nullptr;
    ExprPtr lo, hi;
    StmtList body;
};
struct EitherS { std::vector<StmtList> branches; };
struct ForallS { StmtList generator, body; };
struct CommitS { StmtList body; };
struct NotS { StmtPtr body; };

struct Stmt {
    SourceLoc loc;
    bool leaks_choice = false; // checker: may leave live choice points behind
    std::variant<AssignS, ExprS, CallS, IfS, WhileS, ForS, EitherS, ForallS,
                 CommitS, NotS>
        node;
};

// ---------------------------------------------------------------------------
// Declarations / module
// ---------------------------------------------------------------------------

struct ConstDecl {
    SourceLoc loc;
    std::string name;
    ExprPtr value;
};
struct TypeDecl {
    SourceLoc loc;
    std::string name;
    TypeExprPtr type;
};
struct VarDecl {
    SourceLoc loc;
    std::vector<std::string> names;
    TypeExprPtr type;
};
struct Param {
    SourceLoc loc;
    ParamMode mode;
    std::vector<std::string> names;
    TypeExprPtr type;
};
struct ProcDecl {
    SourceLoc loc;
    std::string name;
    std::vector<Param> params;
    std::vector<ConstDecl> consts;
    std::vector<VarDecl> vars;
    StmtList body;
};

using Decl = std::variant<ConstDecl, TypeDecl, VarDecl, ProcDecl>;

struct Module {
    SourceLoc loc;
    std::string name;
    std::vector<Decl> decls;
    StmtList body;
};

} // namespace almac
