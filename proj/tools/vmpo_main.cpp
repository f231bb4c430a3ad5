// vmpo: sequential ancilla-qubit decomposition experiments.
//
//   vmpo table1                      gate table at D=4, both metrics
//   vmpo scaling --family 1 --nmax 8 gap vs N for a generalized-CNOT family
//   vmpo isometries                  isometry dichotomy suite
//   vmpo run --spec FILE             user-defined experiment file
//   vmpo show --report FILE          pretty-print a report file
//
// Output directory: --out, else $VMPO_OUT_DIR, else ./vmpo_out.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vmpo/runner.hpp"

namespace {

struct CommonArgs {
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int restarts = 0;
    bool restarts_set = false;
    int max_sweeps = 0;
    bool max_sweeps_set = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--out", args.out_dir,
                    "Output directory (default: $VMPO_OUT_DIR or ./vmpo_out)");
    cmd->add_option("--seed", args.seed, "Override the optimizer seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--restarts", args.restarts, "Override the restart count")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { args.restarts_set = true; });
    cmd->add_option("--max-sweeps", args.max_sweeps, "Override the sweep budget")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { args.max_sweeps_set = true; });
}

vmpo::RunOptions make_run_options(const CommonArgs& args) {
    vmpo::RunOptions opts;
    opts.out_dir = vmpo::resolve_out_dir(args.out_dir);
    if (args.seed_set) opts.seed_override = args.seed;
    if (args.restarts_set) opts.restarts_override = args.restarts;
    if (args.max_sweeps_set) opts.max_sweeps_override = args.max_sweeps;
    return opts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential ancilla-qubit decomposition of multiqubit gates"};
    app.require_subcommand(1);

    CommonArgs table1_args;
    CLI::App* table1 = app.add_subcommand("table1", "Gate table at D=4, both metrics");
    add_common_options(table1, table1_args);

    CommonArgs scaling_args;
    int family = 1;
    int n_max = 8;
    CLI::App* scaling =
        app.add_subcommand("scaling", "Frobenius gap vs qubit number at D=2");
    scaling->add_option("--family", family, "Generalized-CNOT family (1 or 2)")
        ->required()
        ->check(CLI::Range(1, 2));
    scaling->add_option("--nmax", n_max, "Largest qubit number (2..8)")
        ->check(CLI::Range(2, 8));
    add_common_options(scaling, scaling_args);

    CommonArgs iso_args;
    CLI::App* isometries =
        app.add_subcommand("isometries", "Isometry dichotomy suite");
    add_common_options(isometries, iso_args);

    CommonArgs run_args;
    std::string spec_file;
    CLI::App* run = app.add_subcommand("run", "Run an experiment file");
    run->add_option("--spec", spec_file, "Experiment file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    add_common_options(run, run_args);

    std::string report_file;
    CLI::App* show = app.add_subcommand("show", "Pretty-print a report file");
    show->add_option("--report", report_file, "Report file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        vmpo::RunSummary summary;
        if (table1->parsed()) {
            summary = vmpo::run_table1(make_run_options(table1_args), std::cout);
        } else if (scaling->parsed()) {
            summary = vmpo::run_scaling(family, n_max, make_run_options(scaling_args),
                                        std::cout);
        } else if (isometries->parsed()) {
            summary = vmpo::run_isometry_suite(make_run_options(iso_args), std::cout);
        } else if (run->parsed()) {
            const vmpo::ExperimentSpec spec = vmpo::parse_experiment_spec(spec_file);
            summary = vmpo::run_custom(spec, make_run_options(run_args), std::cout);
        } else if (show->parsed()) {
            vmpo::show_report(report_file, std::cout);
            return 0;
        }
        return summary.failed_cells > 0 ? 1 : 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    }
}
