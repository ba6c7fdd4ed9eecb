#include "almac/machine.hpp"

#include <iostream>

namespace almac {

Machine::Machine(RunOptions o) : store(trail), opts(std::move(o)) {
    globals = std::make_shared<Frame>();
    if (opts.trace)
        store.set_trace([this](const std::string& line) { trace(line); });
}

void Machine::trace(const std::string& line) {
    if (opts.trace) trace_stream() << line << "\n";
}

std::ostream& Machine::out() { return opts.out ? *opts.out : std::cout; }

std::ostream& Machine::trace_stream() {
    return opts.trace_out ? *opts.trace_out : std::cerr;
}

std::string Machine::fingerprint() const {
    std::string out;
    if (fingerprint_globals) out += fingerprint_globals();
    out += store.dump();
    return out;
}

} // namespace almac
