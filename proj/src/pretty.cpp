#include "almac/pretty.hpp"

#include <cstdio>

namespace almac {

namespace {

class Printer {
public:
    std::string take() { return std::move(out_); }

    void module(const Module& m) {
        line("MODULE " + m.name + ";");
        for (const Decl& d : m.decls) decl(d);
        line("BEGIN");
        indent_++;
        stmts(m.body);
        indent_--;
        line("END " + m.name + ".");
    }

    void decl(const Decl& d) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ConstDecl>) {
                    line("CONST " + n.name + " = " + expr(*n.value) + ";");
                } else if constexpr (std::is_same_v<T, TypeDecl>) {
                    line("TYPE " + n.name + " = " + type(*n.type) + ";");
                } else if constexpr (std::is_same_v<T, VarDecl>) {
                    line("VAR " + names(n.names) + " : " + type(*n.type) + ";");
                } else {
                    proc(n);
                }
            },
            d);
    }

    void proc(const ProcDecl& p) {
        std::string head = "PROCEDURE " + p.name + "(";
        for (size_t i = 0; i < p.params.size(); ++i) {
            if (i) head += "; ";
            const Param& g = p.params[i];
            if (g.mode == ParamMode::Var) head += "VAR ";
            if (g.mode == ParamMode::Mix) head += "MIX ";
            head += names(g.names) + " : " + type(*g.type);
        }
        head += ");";
        line(head);
        indent_++;
        for (const ConstDecl& c : p.consts)
            line("CONST " + c.name + " = " + expr(*c.value) + ";");
        for (const VarDecl& v : p.vars)
            line("VAR " + names(v.names) + " : " + type(*v.type) + ";");
        indent_--;
        line("BEGIN");
        indent_++;
        stmts(p.body);
        indent_--;
        line("END " + p.name + ";");
    }

    static std::string names(const std::vector<std::string>& ns) {
        std::string out;
        for (size_t i = 0; i < ns.size(); ++i) {
            if (i) out += ", ";
            out += ns[i];
        }
        return out;
    }

    std::string type(const TypeExpr& te) {
        return std::visit(
            [&](const auto& t) -> std::string {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, NamedTE>) {
                    return t.name;
                } else if constexpr (std::is_same_v<T, EnumTE>) {
                    std::string out = "(";
                    for (size_t i = 0; i < t.members.size(); ++i) {
                        if (i) out += ", ";
                        out += t.members[i];
                    }
                    return out + ")";
                } else if constexpr (std::is_same_v<T, SubrangeTE>) {
                    return "[" + expr(*t.lo) + ".." + expr(*t.hi) + "]";
                } else if constexpr (std::is_same_v<T, ArrayTE>) {
                    std::string out = "ARRAY ";
                    for (size_t i = 0; i < t.dims.size(); ++i) {
                        if (i) out += ",";
                        out += "[" + expr(*t.dims[i].first) + ".." +
                               expr(*t.dims[i].second) + "]";
                    }
                    return out + " OF " + type(*t.elem);
                } else if constexpr (std::is_same_v<T, RecordTE>) {
                    std::string out = "RECORD ";
                    for (const RecordFieldTE& f : t.fields)
                        out += names(f.names) + " : " + type(*f.type) + "; ";
                    return out + "END";
                } else if constexpr (std::is_same_v<T, ListTE>) {
                    return "LIST OF " + type(*t.elem);
                } else {
                    return "CONSTRAINED " + type(*t.base);
                }
            },
            te.node);
    }

    void stmts(const StmtList& list) {
        for (size_t i = 0; i < list.size(); ++i)
            stmt(*list[i], i + 1 < list.size());
    }

    void stmt(const Stmt& s, bool semi) {
        std::string tail = semi ? ";" : "";
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, AssignS>) {
                    line(expr(*n.lhs) + " := " + expr(*n.rhs) + tail);
                } else if constexpr (std::is_same_v<T, ExprS>) {
                    line(expr(*n.expr) + tail);
                } else if constexpr (std::is_same_v<T, CallS>) {
                    std::string out = n.name + "(";
                    for (size_t i = 0; i < n.args.size(); ++i) {
                        if (i) out += ", ";
                        out += expr(*n.args[i]);
                    }
                    line(out + ")" + tail);
                } else if constexpr (std::is_same_v<T, IfS>) {
                    for (size_t i = 0; i < n.arms.size(); ++i) {
                        line(std::string(i ? "ELSIF " : "IF ") +
                             expr(*n.arms[i].cond) + " THEN");
                        block(n.arms[i].body);
                    }
                    if (!n.else_body.empty()) {
                        line("ELSE");
                        block(n.else_body);
                    }
                    line("END" + tail);
                } else if constexpr (std::is_same_v<T, WhileS>) {
                    line("WHILE " + expr(*n.cond) + " DO");
                    block(n.body);
                    line("END" + tail);
                } else if constexpr (std::is_same_v<T, ForS>) {
                    line(std::string(n.existential ? "SOME " : "FOR ") + n.var +
                         " := " + expr(*n.lo) + " TO " + expr(*n.hi) + " DO");
                    block(n.body);
                    line("END" + tail);
                } else if constexpr (std::is_same_v<T, EitherS>) {
                    line("EITHER");
                    block(n.branches[0]);
                    for (size_t i = 1; i < n.branches.size(); ++i) {
                        line("ORELSE");
                        block(n.branches[i]);
                    }
                    line("END" + tail);
                } else if constexpr (std::is_same_v<T, ForallS>) {
                    line("FORALL");
                    block(n.generator);
                    line("DO");
                    block(n.body);
                    line("END" + tail);
                } else if constexpr (std::is_same_v<T, CommitS>) {
                    line("COMMIT");
                    block(n.body);
                    line("END" + tail);
                } else { // NotS
                    line("NOT");
                    indent_++;
                    stmt(*n.body, false);
                    indent_--;
                    if (semi) append_semi();
                }
            },
            s.node);
    }

    void block(const StmtList& list) {
        indent_++;
        stmts(list);
        indent_--;
    }

    std::string expr(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> std::string {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IntLitE>) {
                    return std::to_string(n.value);
                } else if constexpr (std::is_same_v<T, RealLitE>) {
                    char buf[48];
                    std::snprintf(buf, sizeof buf, "%.17g", n.value);
                    std::string s = buf;
                    if (s.find('.') == std::string::npos &&
                        s.find('e') == std::string::npos)
                        s += ".0";
                    return s;
                } else if constexpr (std::is_same_v<T, BoolLitE>) {
                    return n.value ? "TRUE" : "FALSE";
                } else if constexpr (std::is_same_v<T, StringLitE>) {
                    return "\"" + n.value + "\"";
                } else if constexpr (std::is_same_v<T, NameE>) {
                    return n.name;
                } else if constexpr (std::is_same_v<T, IndexE>) {
                    std::string out = expr(*n.base) + "[";
                    for (size_t i = 0; i < n.indices.size(); ++i) {
                        if (i) out += ",";
                        out += expr(*n.indices[i]);
                    }
                    return out + "]";
                } else if constexpr (std::is_same_v<T, FieldE>) {
                    return expr(*n.base) + "." + n.field;
                } else if constexpr (std::is_same_v<T, BinE>) {
                    return "(" + expr(*n.lhs) + " " + binop_text(n.op) + " " +
                           expr(*n.rhs) + ")";
                } else if constexpr (std::is_same_v<T, UnE>) {
                    const char* op = n.op == UnOp::Not ? "NOT "
                                     : n.op == UnOp::Neg ? "-"
                                                         : "+";
                    return std::string("(") + op + expr(*n.operand) + ")";
                } else if constexpr (std::is_same_v<T, CallE>) {
                    std::string out = n.name + "(";
                    for (size_t i = 0; i < n.args.size(); ++i) {
                        if (i) out += ", ";
                        out += expr(*n.args[i]);
                    }
                    return out + ")";
                } else { // QuantE
                    std::string out =
                        std::string(n.existential ? "SOME " : "FOR ") + n.var +
                        " := " + expr(*n.lo) + " TO " + expr(*n.hi) + " DO ";
                    Printer inner;
                    inner.stmts(n.body);
                    std::string body = inner.take();
                    for (char& c : body)
                        if (c == '\n') c = ' ';
                    return out + body + " END";
                }
            },
            e.node);
    }

private:
    void line(const std::string& s) {
        out_ += std::string(static_cast<size_t>(indent_) * 2, ' ') + s + "\n";
    }
    void append_semi() {
        // attach the separator to the previous printed line
        if (!out_.empty() && out_.back() == '\n') {
            out_.pop_back();
            out_ += ";\n";
        }
    }

    std::string out_;
    int indent_ = 0;
};

} // namespace

std::string pretty_print(const Module& m) {
    Printer p;
    p.module(m);
    return p.take();
}

std::string pretty_print(const Expr& e) {
    Printer p;
    return p.expr(e);
}

std::string pretty_print(const Stmt& s) {
    Printer p;
    p.stmt(s, false);
    return p.take();
}

} // namespace almac
