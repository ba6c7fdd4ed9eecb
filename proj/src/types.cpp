#include "almac/types.hpp"

namespace almac {

std::string Type::display() const {
    std::string base;
    switch (kind) {
    case TypeKind::Integer: base = "INTEGER"; break;
    case TypeKind::Boolean: base = "BOOLEAN"; break;
    case TypeKind::Real: base = "REAL"; break;
    case TypeKind::Enum:
        if (!name.empty()) {
            base = name;
        } else {
            base = "(";
            for (size_t i = 0; i < members.size(); ++i) {
                if (i) base += ", ";
                base += members[i];
            }
            base += ")";
        }
        break;
    case TypeKind::Subrange:
        base = "[" + std::to_string(lo) + ".." + std::to_string(hi) + "]";
        break;
    case TypeKind::Array:
        return "ARRAY [" + std::to_string(index_lo) + ".." +
               std::to_string(index_hi) + "] OF " + elem->display();
    case TypeKind::Record:
        return name.empty() ? "RECORD" : name;
    case TypeKind::List:
        return "LIST OF " + elem->display();
    }
    return constrained ? "CONSTRAINED " + base : base;
}

bool same_type(const Type& a, const Type& b) {
    if (&a == &b) return true;
    if (a.kind != b.kind || a.constrained != b.constrained) return false;
    switch (a.kind) {
    case TypeKind::Integer:
    case TypeKind::Boolean:
    case TypeKind::Real:
        return true;
    case TypeKind::Enum:
        return a.enum_tag == b.enum_tag; // nominal
    case TypeKind::Subrange:
        return a.lo == b.lo && a.hi == b.hi;
    case TypeKind::Array:
        return a.index_lo == b.index_lo && a.index_hi == b.index_hi &&
               same_type(*a.elem, *b.elem);
    case TypeKind::Record: {
        if (a.fields.size() != b.fields.size()) return false;
        for (size_t i = 0; i < a.fields.size(); ++i)
            if (a.fields[i].name != b.fields[i].name ||
                !same_type(*a.fields[i].type, *b.fields[i].type))
                return false;
        return true;
    }
    case TypeKind::List:
        return same_type(*a.elem, *b.elem);
    }
    return false;
}

bool compatible(const Type& a, const Type& b) {
    if (&a == &b) return true;
    // Integer and subranges of integers mix freely (checked at run time).
    if (a.is_integer_class() && b.is_integer_class() &&
        a.constrained == b.constrained)
        return true;
    return same_type(a, b);
}

TypePtr make_integer() {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Integer;
    return t;
}

TypePtr make_boolean() {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Boolean;
    return t;
}

TypePtr make_real() {
    auto t = std::make_shared<Type>();
    t->kind = TypeKind::Real;
    return t;
}

} // namespace almac
