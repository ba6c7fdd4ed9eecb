#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "almac/domain.hpp"
#include "almac/real_solver.hpp"
#include "almac/value.hpp"

namespace almac {

class Store;
using ConstraintId = uint32_t;

// Undo log. Restoring to a mark replays entries newest-first. Entries with a
// nonzero seal level belong to a committed FORALL body segment: they are
// skipped (and retained, order preserved) while the owning FORALL is active,
// and become ordinary entries when it finishes, so restoration to any choice
// point outside the FORALL stays exact.
class Trail {
public:
    using Mark = size_t;

    struct VarWrite {
        Value* cell;
        FramePtr anchor; // keeps the owning frame alive
        Value old;
    };
    struct DomainShrink {
        UnknownId u;
        FiniteDomain old;
    };
    struct RealState {
        RealSolver old;
    };
    struct ConstraintAdded {
        ConstraintId id;
    };
    struct ActiveChanged {
        ConstraintId id;
        bool old_active;
    };
    struct BottomSet {};

    using Op = std::variant<VarWrite, DomainShrink, RealState, ConstraintAdded,
                            ActiveChanged, BottomSet>;

    struct Entry {
        uint16_t seal = 0;
        Op op;
    };

    Mark mark() const { return entries_.size(); }
    size_t size() const { return entries_.size(); }

    void push(Op op) { entries_.push_back(Entry{0, std::move(op)}); }

    void record_var(Value* cell, FramePtr anchor) {
        entries_.push_back(Entry{0, VarWrite{cell, std::move(anchor), *cell}});
    }

    // Replays unsealed entries down to `m`; sealed entries are kept and end
    // up at [m, m+kept) in their original chronological order.
    void undo_to(Mark m, Store& store);

    void seal(Mark from, uint16_t level) {
        for (size_t i = from; i < entries_.size(); ++i)
            if (entries_[i].seal == 0) entries_[i].seal = level;
    }
    void unseal(Mark from, uint16_t level) {
        for (size_t i = from; i < entries_.size(); ++i)
            if (entries_[i].seal == level) entries_[i].seal = 0;
    }

private:
    void apply(Op& op, Store& store);

    std::vector<Entry> entries_;
};

} // namespace almac
