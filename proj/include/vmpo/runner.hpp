#pragma once

// Experiment orchestration behind the CLI: the two-/three-qubit gate
// table, the generalized-CNOT scaling study, the isometry dichotomy
// suite, and user-supplied experiment files.  Each experiment writes a
// report set (JSON array + CSV), per-cell convergence traces, and the
// optimal chain for every cell under a single output directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vmpo/gatelib.hpp"
#include "vmpo/metrics.hpp"
#include "vmpo/optimizer.hpp"
#include "vmpo/seqmpo.hpp"

namespace vmpo {

/// A full experiment: every compatible gate x shape x metric cell is
/// run with the shared optimizer configuration.
struct ExperimentSpec {
    std::string name;
    std::vector<GateSpec> gates;    // shape is taken from `shapes`
    std::vector<SystemShape> shapes;
    std::vector<Metric> metrics = {Metric::frobenius};
    OptimizerConfig optimizer;
};

/// Parses and validates an experiment file (JSON, version 1).  Every
/// gate x shape pair must validate; incompatibilities are reported
/// with the offending indices.  Throws std::invalid_argument with a
/// diagnostic on any parse or validation error.
ExperimentSpec parse_experiment_spec(const std::filesystem::path& path);
ExperimentSpec experiment_spec_from_json_string(const std::string& text);

/// One executed cell.  `ok` is false when the optimizer failed; the
/// error text is preserved and the remaining cells still run.
struct CellResult {
    std::string label;
    bool ok = false;
    std::string error;
    GapReport report;
    ConvergenceTrace trace;
    SequentialMPO mpo;
};

struct RunSummary {
    std::string experiment;
    std::vector<CellResult> cells;
    int failed_cells = 0;
    std::filesystem::path reports_json;
    std::filesystem::path reports_csv;
};

/// Shared execution options.  The output directory is created if
/// missing; `seed_override` replaces every cell's optimizer seed.
struct RunOptions {
    std::filesystem::path out_dir = "vmpo_out";
    std::optional<std::uint64_t> seed_override;
    std::optional<int> restarts_override;
    std::optional<int> max_sweeps_override;
};

/// Resolves the output directory: explicit CLI path if given, else the
/// VMPO_OUT_DIR environment variable, else "vmpo_out".
std::filesystem::path resolve_out_dir(const std::string& cli_value);

/// Two- and three-qubit gate table at D=4: all six named gates under
/// both metrics, printed with reference values and pass/fail flags.
RunSummary run_table1(const RunOptions& opts, std::ostream& out);

/// Frobenius gap versus qubit number at D=2, N = 2..n_max, for one of
/// the generalized-CNOT families (1 or 2).  Emits (N, gap) CSV.
RunSummary run_scaling(int family, int n_max, const RunOptions& opts,
                       std::ostream& out);

/// Isometry dichotomy: Toffoli/Fredkin 1->3 at D=2, seeded random
/// 1->3 at D=2 and D=4, Toffoli 2->3 at D=4, seeded random 2->3 at
/// D=4; prints each gap with its expected zero/nonzero classification.
RunSummary run_isometry_suite(const RunOptions& opts, std::ostream& out);

/// Executes a parsed experiment spec.
RunSummary run_custom(const ExperimentSpec& spec, const RunOptions& opts,
                      std::ostream& out);

/// Pretty-prints a report file (JSON array or single report).
void show_report(const std::filesystem::path& report_file, std::ostream& out);

}  // namespace vmpo
