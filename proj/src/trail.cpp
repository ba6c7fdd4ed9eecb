#include "almac/trail.hpp"

#include <cassert>
#include <map>

#include "almac/store.hpp"

namespace almac {

void Trail::apply(Op& op, Store& store) {
    std::visit(
        [&](auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, VarWrite>) {
                e.cell->assign_in_place(e.old);
            } else if constexpr (std::is_same_v<T, DomainShrink>) {
                store.undo_domain(e.u, std::move(e.old));
            } else if constexpr (std::is_same_v<T, RealState>) {
                store.undo_real(std::move(e.old));
            } else if constexpr (std::is_same_v<T, ConstraintAdded>) {
                store.undo_remove_constraint(e.id);
            } else if constexpr (std::is_same_v<T, ActiveChanged>) {
                store.undo_set_active(e.id, e.old_active);
            } else if constexpr (std::is_same_v<T, BottomSet>) {
                store.undo_bottom();
            }
        },
        op);
}

// One undo pass replays unsealed entries newest-first and retains sealed
// ones. A retained entry's saved state can go stale when an older unsealed
// entry for the same cell/domain/solver state is replayed beneath it, so the
// oldest retained entry per key inherits the replayed entry's old state;
// a later full restoration then still lands exactly on the original values.
void Trail::undo_to(Mark m, Store& store) {
    assert(m <= entries_.size() && "stale restoration mark");
    if (m >= entries_.size()) return;

    // key: which piece of state an op targets
    enum class KeyKind : uint8_t { Cell, Domain, Real, Active };
    using Key = std::pair<KeyKind, const void*>;
    auto key_of = [](const Op& op) -> std::pair<bool, Key> {
        if (const auto* v = std::get_if<VarWrite>(&op))
            return {true, {KeyKind::Cell, v->cell}};
        if (const auto* d = std::get_if<DomainShrink>(&op))
            return {true,
                    {KeyKind::Domain,
                     reinterpret_cast<const void*>(static_cast<uintptr_t>(d->u))}};
        if (std::holds_alternative<RealState>(op))
            return {true, {KeyKind::Real, nullptr}};
        if (const auto* a = std::get_if<ActiveChanged>(&op))
            return {true,
                    {KeyKind::Active,
                     reinterpret_cast<const void*>(static_cast<uintptr_t>(a->id))}};
        return {false, {KeyKind::Cell, nullptr}};
    };

    std::vector<Entry> kept; // newest first while collecting
    std::map<Key, size_t> oldest_kept;

    for (size_t i = entries_.size(); i-- > m;) {
        Entry& e = entries_[i];
        auto [keyed, key] = key_of(e.op);
        if (e.seal != 0) {
            kept.push_back(std::move(e));
            if (keyed) oldest_kept[key] = kept.size() - 1;
            continue;
        }
        if (keyed) {
            auto it = oldest_kept.find(key);
            if (it != oldest_kept.end()) {
                // the retained entry must restore to this older state
                Op& kept_op = kept[it->second].op;
                if (auto* v = std::get_if<VarWrite>(&e.op))
                    std::get<VarWrite>(kept_op).old = v->old;
                else if (auto* d = std::get_if<DomainShrink>(&e.op))
                    std::get<DomainShrink>(kept_op).old = d->old;
                else if (auto* r = std::get_if<RealState>(&e.op))
                    std::get<RealState>(kept_op).old = r->old;
                else if (auto* a = std::get_if<ActiveChanged>(&e.op))
                    std::get<ActiveChanged>(kept_op).old_active = a->old_active;
            }
        }
        apply(e.op, store);
    }
    entries_.resize(m);
    for (size_t i = kept.size(); i-- > 0;)
        entries_.push_back(std::move(kept[i]));
}

} // namespace almac
