#pragma once

#include <cassert>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "almac/types.hpp"

namespace almac {

using UnknownId = uint32_t;

// Runtime value. Compound values (arrays, records) are built once at
// declaration time with their full shape; all later mutation is done
// in place so element addresses stay stable for the trail.
class Value {
public:
    struct Uninit {
        bool operator==(const Uninit&) const = default;
    };
    struct EnumVal {
        const Type* type;
        int64_t index;
        bool operator==(const EnumVal&) const = default;
    };
    struct URef {
        UnknownId id;
        bool operator==(const URef&) const = default;
    };
    struct Composite { // array or record, layout given by the static type
        std::vector<Value> elems;
        bool operator==(const Composite&) const = default;
    };
    struct ListVal {
        std::vector<UnknownId> elems;
        bool operator==(const ListVal&) const = default;
    };

    Value() : v_(Uninit{}) {}
    static Value of_int(int64_t i) { return Value(i); }
    static Value of_bool(bool b) { return Value(b); }
    static Value of_real(double r) { return Value(r); }
    static Value of_enum(const Type* t, int64_t idx) { return Value(EnumVal{t, idx}); }
    static Value of_unknown(UnknownId id) { return Value(URef{id}); }
    static Value composite(size_t n) {
        Value v;
        v.v_ = Composite{std::vector<Value>(n)};
        return v;
    }
    static Value list() {
        Value v;
        v.v_ = ListVal{};
        return v;
    }

    bool is_uninit() const { return std::holds_alternative<Uninit>(v_); }
    bool is_int() const { return std::holds_alternative<int64_t>(v_); }
    bool is_bool() const { return std::holds_alternative<bool>(v_); }
    bool is_real() const { return std::holds_alternative<double>(v_); }
    bool is_enum() const { return std::holds_alternative<EnumVal>(v_); }
    bool is_unknown() const { return std::holds_alternative<URef>(v_); }
    bool is_composite() const { return std::holds_alternative<Composite>(v_); }
    bool is_list() const { return std::holds_alternative<ListVal>(v_); }

    int64_t as_int() const { return std::get<int64_t>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    double as_real() const { return std::get<double>(v_); }
    const EnumVal& as_enum() const { return std::get<EnumVal>(v_); }
    UnknownId unknown_id() const { return std::get<URef>(v_).id; }

    Composite& comp() { return std::get<Composite>(v_); }
    const Composite& comp() const { return std::get<Composite>(v_); }
    ListVal& list_val() { return std::get<ListVal>(v_); }
    const ListVal& list_val() const { return std::get<ListVal>(v_); }

    // Ordinal view for finite-domain purposes: int value, enum index, bool.
    int64_t ordinal() const {
        if (is_int()) return as_int();
        if (is_bool()) return as_bool() ? 1 : 0;
        return as_enum().index;
    }

    // Deep copy is the default copy; in-place assignment preserves the
    // element storage of composites (shapes always match by typing).
    void assign_in_place(const Value& src) {
        if (is_composite() && src.is_composite()) {
            auto& dst = comp().elems;
            const auto& s = src.comp().elems;
            assert(dst.size() == s.size());
            for (size_t i = 0; i < dst.size(); ++i)
                dst[i].assign_in_place(s[i]);
            return;
        }
        v_ = src.v_;
    }

    bool operator==(const Value&) const = default;

private:
    explicit Value(int64_t i) : v_(i) {}
    explicit Value(bool b) : v_(b) {}
    explicit Value(double r) : v_(r) {}
    explicit Value(EnumVal e) : v_(e) {}
    explicit Value(URef u) : v_(u) {}

    std::variant<Uninit, int64_t, bool, double, EnumVal, URef, Composite,
                 ListVal>
        v_;
};

// One environment frame (the global frame or one procedure activation).
// Frames are shared_ptr-owned: trail entries anchor the frames whose cells
// they reference, so committed effects of returned calls stay restorable.
struct Frame {
    struct Alias {
        Value* cell = nullptr;
        std::shared_ptr<Frame> anchor;
    };
    std::vector<Value> slots;
    std::vector<Alias> aliases; // non-null entry for VAR/MIX-bound params
};

using FramePtr = std::shared_ptr<Frame>;

} // namespace almac
