#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "almac/interp.hpp"
#include "almac/machine.hpp"
#include "almac/parser.hpp"
#include "almac/pretty.hpp"
#include "almac/sema.hpp"

namespace testutil {

struct RunCapture {
    std::string out;
    std::string trace;
    almac::RunResult result;
};

// Runs a source text with the given options; the hook (if any) fires at
// every solution with access to the interpreter and machine.
inline RunCapture run_program(
    const std::string& src, almac::RunOptions opts = {},
    const std::function<void(almac::Interp&, almac::Machine&)>& hook = {}) {
    std::ostringstream out, trc;
    opts.out = &out;
    opts.trace_out = &trc;
    almac::Machine machine(opts);
    almac::CheckedProgram prog = almac::check_source(src);
    almac::Interp interp(prog, machine);
    almac::RunResult res =
        interp.run(hook ? std::function<void()>(
                              [&] { hook(interp, machine); })
                        : std::function<void()>{});
    return {out.str(), trc.str(), res};
}

inline bool succeeded(const RunCapture& rc) {
    return rc.result.outcome == almac::RunResult::Outcome::Succeeded;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Exhaustive enumeration over explicit domains (test oracle).
inline void enumerate(const std::vector<std::vector<int64_t>>& doms,
                      const std::function<void(const std::vector<int64_t>&)>& fn) {
    std::vector<size_t> idx(doms.size(), 0);
    std::vector<int64_t> vals(doms.size());
    for (const auto& d : doms)
        if (d.empty()) return;
    for (;;) {
        for (size_t i = 0; i < doms.size(); ++i) vals[i] = doms[i][idx[i]];
        fn(vals);
        size_t d = doms.size();
        for (;;) {
            if (d == 0) return;
            --d;
            if (++idx[d] < doms[d].size()) break;
            idx[d] = 0;
        }
    }
}

// Deterministic pseudo-random generator for property tests.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    int64_t range(int64_t lo, int64_t hi) { // inclusive
        return lo + static_cast<int64_t>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
    bool chance(int percent) { return range(0, 99) < percent; }
};

} // namespace testutil
