#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace almac {

enum class TypeKind : uint8_t {
    Integer,
    Boolean,
    Real,
    Enum,
    Subrange,
    Array,
    Record,
    List,
};

struct Type;
using TypePtr = std::shared_ptr<Type>;

struct Field {
    std::string name;
    TypePtr type;
};

// Resolved type descriptor. Subrange/array bounds are folded to concrete
// integers during checking. `constrained` may be set only on simple kinds.
struct Type {
    TypeKind kind = TypeKind::Integer;
    bool constrained = false;
    std::string name; // declared type name, empty for anonymous types

    // Enum; `enum_tag` identifies the enumeration across CONSTRAINED copies
    std::vector<std::string> members;
    const void* enum_tag = nullptr;
    // Subrange
    int64_t lo = 0, hi = 0;
    // Array (one dimension per node; multi-dimensional arrays nest)
    int64_t index_lo = 0, index_hi = 0;
    TypePtr elem;
    // Record
    std::vector<Field> fields;
    // List: `elem` is the (constrained simple) element type

    bool is_simple() const {
        switch (kind) {
        case TypeKind::Integer:
        case TypeKind::Boolean:
        case TypeKind::Real:
        case TypeKind::Enum:
        case TypeKind::Subrange:
            return true;
        default:
            return false;
        }
    }

    bool is_integer_class() const {
        return kind == TypeKind::Integer || kind == TypeKind::Subrange;
    }

    // Finite base types admit INDOMAIN: BOOLEAN, enumerations and subranges.
    bool is_finite() const {
        return kind == TypeKind::Boolean || kind == TypeKind::Enum ||
               kind == TypeKind::Subrange;
    }

    bool contains_constrained() const {
        if (constrained) return true;
        switch (kind) {
        case TypeKind::Array:
            return elem->contains_constrained();
        case TypeKind::Record:
            for (const auto& f : fields)
                if (f.type->contains_constrained()) return true;
            return false;
        default:
            return false; // list elements are references, not owned unknowns
        }
    }

    int field_index(const std::string& fname) const {
        for (size_t i = 0; i < fields.size(); ++i)
            if (fields[i].name == fname) return static_cast<int>(i);
        return -1;
    }

    std::string display() const;
};

// Structural compatibility; enums are nominal (same descriptor object).
// Integer and subrange types are mutually compatible, range checks happen
// at run time.
bool same_type(const Type& a, const Type& b);
bool compatible(const Type& a, const Type& b);

TypePtr make_integer();
TypePtr make_boolean();
TypePtr make_real();

} // namespace almac
