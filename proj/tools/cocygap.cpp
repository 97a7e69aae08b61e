#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cocygap/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Dominated-splitting and gap analysis for linear cocycles and semigroup representations"};
    app.require_subcommand(1);

    cocygap::CliFlags flags;
    std::string target;

    auto add_flags = [&](CLI::App* sub) {
        sub->add_option("--index", flags.index, "gap index i");
        sub->add_option("--nmax", flags.n_max, "largest word length in the singular-value profile");
        sub->add_option("--pmax", flags.p_max, "largest period in the periodic scan");
        sub->add_option("--length-bound", flags.length_bound, "Cayley ball radius L");
        sub->add_option("--budget", flags.budget, "work budget (overrides COCYCLE_GAP_BUDGET)");
        sub->add_option("--slope-threshold", flags.slope_threshold, "minimum fitted slope counted as a gap");
        sub->add_option("--zero-tol", flags.zero_tol, "gaps at or below this are zero");
        sub->add_option("--threads", flags.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        sub->add_option("--out", flags.out, "report JSON path (default: stdout)");
        sub->add_option("--csv", flags.csv, "profile CSV path");
    };

    auto* cocycle = app.add_subcommand("analyze-cocycle", "analyze a cocycle problem file");
    cocycle->add_option("problem", target, "problem JSON")->required();
    add_flags(cocycle);
    auto* rep = app.add_subcommand("analyze-representation", "analyze a representation problem file");
    rep->add_option("problem", target, "problem JSON")->required();
    add_flags(rep);
    auto* example = app.add_subcommand("reproduce-example", "run a built-in example");
    example->add_option("name", target, "example name (see list-examples)")->required();
    add_flags(example);
    auto* list = app.add_subcommand("list-examples", "list built-in examples and shifts");
    list->add_option("--out", flags.out, "report JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : cocygap::kExitInput;
    }
    auto* sub = app.get_subcommands().front();
    return cocygap::run(sub->get_name(), target, flags, std::cout, std::cerr);
}
