#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "almac/interp.hpp"
#include "almac/machine.hpp"
#include "almac/parser.hpp"
#include "almac/sema.hpp"

namespace {

int load_and_check(const std::string& path, almac::CheckedProgram* out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "almac: cannot open '" << path << "'\n";
        return 3;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        *out = almac::check_source(ss.str());
    } catch (const almac::CompileError& e) {
        std::cerr << path << ":" << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"almac - interpreter for the A0 constraint language"};
    app.require_subcommand(1);

    std::string run_file, check_file;
    std::string mode = "first", label_order = "textual", value_order = "ascending";
    int64_t max_solutions = 0;
    bool trace = false, dump_store = false;

    CLI::App* run = app.add_subcommand("run", "check and execute a program");
    run->add_option("file", run_file, "source file (.a0)")->required();
    run->add_option("--mode", mode, "first|all|count")
        ->check(CLI::IsMember({"first", "all", "count"}));
    run->add_option("--max-solutions", max_solutions,
                    "stop after N solutions (all/count modes)");
    run->add_flag("--trace", trace, "trace tells, choice points, backtracking");
    run->add_flag("--dump-store", dump_store, "dump the store at each solution");
    run->add_option("--label-order", label_order, "textual|first-fail")
        ->check(CLI::IsMember({"textual", "first-fail"}));
    run->add_option("--value-order", value_order, "ascending|descending")
        ->check(CLI::IsMember({"ascending", "descending"}));

    CLI::App* check = app.add_subcommand("check", "parse and check only");
    check->add_option("file", check_file, "source file (.a0)")->required();

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) {
        almac::CheckedProgram prog;
        return load_and_check(check_file, &prog);
    }

    almac::CheckedProgram prog;
    if (int rc = load_and_check(run_file, &prog)) return rc;

    almac::RunOptions opts;
    opts.mode = mode == "all"     ? almac::RunMode::All
                : mode == "count" ? almac::RunMode::Count
                                  : almac::RunMode::First;
    if (max_solutions > 0) opts.max_solutions = max_solutions;
    opts.trace = trace;
    opts.dump_store = dump_store;
    opts.label_order = label_order == "first-fail" ? almac::LabelOrder::FirstFail
                                                   : almac::LabelOrder::Textual;
    opts.value_order = value_order == "descending" ? almac::ValueOrder::Descending
                                                   : almac::ValueOrder::Ascending;

    almac::Machine machine(opts);
    almac::Interp interp(prog, machine);
    try {
        almac::RunResult res = interp.run();
        if (opts.mode == almac::RunMode::Count)
            std::cout << "solutions: " << res.solutions << "\n";
        return res.outcome == almac::RunResult::Outcome::Succeeded ? 0 : 1;
    } catch (const almac::RuntimeError& e) {
        std::cerr << run_file << ":" << e.what() << "\n";
        return 2;
    }
}
