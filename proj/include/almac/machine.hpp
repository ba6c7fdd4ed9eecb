#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "almac/store.hpp"
#include "almac/trail.hpp"
#include "almac/value.hpp"

namespace almac {

enum class RunMode : uint8_t { First, All, Count };
enum class LabelOrder : uint8_t { Textual, FirstFail };
enum class ValueOrder : uint8_t { Ascending, Descending };

struct RunOptions {
    RunMode mode = RunMode::First;
    std::optional<int64_t> max_solutions;
    bool trace = false;
    bool dump_store = false;
    LabelOrder label_order = LabelOrder::Textual;
    ValueOrder value_order = ValueOrder::Ascending;

    std::ostream* out = nullptr;       // program output (defaults to stdout)
    std::ostream* trace_out = nullptr; // trace lines (defaults to stderr)
};

// One run's complete mutable state: trail, store, global frame, options and
// trace bookkeeping. A machine is owned by exactly one run.
class Machine {
public:
    explicit Machine(RunOptions opts);

    Trail trail;
    Store store;
    FramePtr globals;
    RunOptions opts;

    void undo_to(Trail::Mark m) { trail.undo_to(m, store); }

    int next_choice_id() { return ++choice_counter_; }
    int last_choice_id() const { return choice_counter_; }

    uint16_t enter_forall() { return ++forall_depth_; }
    void exit_forall() { --forall_depth_; }

    void trace(const std::string& line);

    std::ostream& out();
    std::ostream& trace_stream();

    // Deterministic fingerprint of globals + store, used by state-restoration
    // property tests.
    std::string fingerprint() const;
    std::function<std::string()> fingerprint_globals; // set by the interpreter

private:
    int choice_counter_ = 0;
    uint16_t forall_depth_ = 0;
};

} // namespace almac
