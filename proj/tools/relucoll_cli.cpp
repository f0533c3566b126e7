// Command-line front end for the collocation and network-surrogate pipeline.

#include <CLI11.hpp>

#include <iostream>

#include "relucoll/config.hpp"
#include "relucoll/parallel.hpp"
#include "relucoll/runner.hpp"

namespace {

struct Common {
    std::string config;
    std::string out;
    int threads = 0;
    long long seed = -1;
    bool dump = false;
    bool timing = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", c.out, "output directory (default: config output)");
    sub->add_option("--parallel", c.threads, "worker threads (default: available cores)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "override mc.seed")->check(CLI::NonNegativeNumber);
    sub->add_flag("--timing", c.timing, "fill the wall_ms column");
}

rc::Experiment make_experiment(const Common& c) {
    rc::RunOptions o;
    o.out = c.out;
    o.threads = c.threads > 0 ? c.threads : rc::default_thread_count();
    o.dump_solutions = c.dump;
    o.timing = c.timing;
    if (c.seed >= 0) o.seed = static_cast<std::uint64_t>(c.seed);
    return rc::Experiment(rc::load_config(c.config), o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-grid collocation and ReLU surrogate experiments"};
    app.require_subcommand(1);

    Common common;
    std::string plan_path, samples_path, mode = "network", net_path, points_path, output_path;

    auto* plan = app.add_subcommand("plan", "build the index sets and collocation plans");
    add_common(plan, common);

    auto* solve = app.add_subcommand("solve", "run the FEM solver at every grid point of a plan");
    add_common(solve, common);
    solve->add_option("--plan", plan_path, "plan file")->required();
    solve->add_flag("--dump-solutions", common.dump, "write one nodal CSV per grid point");

    auto* compile = app.add_subcommand("compile", "assemble the network bundle");
    add_common(compile, common);
    compile->add_option("--plan", plan_path, "plan file")->required();
    compile->add_option("--samples", samples_path, "samples file")->required();

    auto* evaluate = app.add_subcommand("evaluate", "estimate errors of the interpolant or the network");
    add_common(evaluate, common);
    evaluate->add_option("--plan", plan_path, "plan file")->required();
    evaluate->add_option("--samples", samples_path, "samples file")->required();
    evaluate->add_option("--mode", mode, "interpolant or network")
        ->check(CLI::IsMember({"interpolant", "network"}));

    auto* sweep = app.add_subcommand("sweep", "run the full xi sweep");
    add_common(sweep, common);

    auto* net = app.add_subcommand("net", "network utilities");
    net->require_subcommand(1);
    auto* net_eval = net->add_subcommand("eval", "evaluate a stored network on CSV points");
    net_eval->add_option("--network", net_path, "network JSON")->required()->check(CLI::ExistingFile);
    net_eval->add_option("--points", points_path, "CSV of input points")->required()->check(CLI::ExistingFile);
    net_eval->add_option("--output", output_path, "CSV of outputs")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rc::kExitConfig;
    }

    try {
        if (net_eval->parsed()) return rc::cmd_net_eval(net_path, points_path, output_path);
        const rc::Experiment ex = make_experiment(common);
        if (plan->parsed()) return rc::cmd_plan(ex);
        if (solve->parsed()) return rc::cmd_solve(ex, plan_path);
        if (compile->parsed()) return rc::cmd_compile(ex, plan_path, samples_path);
        if (evaluate->parsed()) return rc::cmd_evaluate(ex, plan_path, samples_path, mode);
        if (sweep->parsed()) return rc::cmd_sweep(ex);
    } catch (const std::exception& e) {
        return rc::report_failure(e);
    }
    return rc::kExitConfig;
}
