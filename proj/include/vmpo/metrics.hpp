#pragma once

// Gap metrics and the report record emitted by every experiment.
//
// For a target T and assembled chain S (both on the enlarged space):
//   frobenius gap        G_F  = ||T - S||_F^2 / (||T||_F^2 + ||S||_F^2)
//   spectral (p=2) gap   G_p  = ||T - S||_2^2 / (||T||_2 + ||S||_2)^2
//   renormalized gap     G~_F = ||T - S||_F^2 / (||T||_F + ||S||_F)^2
// G_p and G~_F live in [0, 1] for any pair (triangle inequality); G_F
// reaches [0, 2] in general but stays in [0, 1] whenever the real
// overlap Re<T, S> is non-negative, which holds for every optimized
// chain.  For T and S of equal Frobenius norm (any unitary or isometry
// pair) the identity (a+b)^2 = 2(a^2+b^2) for a = b makes
// G~_F = G_F / 2 exactly.
// Isometry-mode reports use the same formulas with T -> V and
// S -> U_seq K (the chain restricted to the input legs).

#include <optional>
#include <string>

#include "vmpo/gatelib.hpp"
#include "vmpo/numerics.hpp"
#include "vmpo/optimizer.hpp"

namespace vmpo {

/// ||target - seq||_F^2, recomputed from the actual matrices.
double frobenius_cost(const ComplexMatrix& target, const ComplexMatrix& seq);

/// cost / (||target||_F^2 + ||seq||_F^2); `cost` must come from the
/// same pair (frobenius_cost or the optimizer's final value).
double gap_frobenius(double cost, const ComplexMatrix& target,
                     const ComplexMatrix& seq);

/// ||target - seq||_2^2 / (||target||_2 + ||seq||_2)^2; the denominator
/// is exactly 4 whenever both operators are unitary.
double gap_pnorm(const ComplexMatrix& target, const ComplexMatrix& seq);

/// cost / (||target||_F + ||seq||_F)^2.
double gap_frobenius_renormalized(double cost, const ComplexMatrix& target,
                                  const ComplexMatrix& seq);

/// Statistics over the completed (non-NaN) restarts of one run, in gap
/// units.  `best` is the minimum, `stddev` the population deviation.
struct RestartStats {
    double best = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    int count = 0;

    bool operator==(const RestartStats&) const = default;
};

RestartStats restart_stats_from_costs(const std::vector<double>& costs,
                                      double gap_denominator);

/// One experiment cell's result.  Frobenius fields are always filled
/// from the returned chain; the p-norm fields are present only for
/// p-norm runs, where gap_pnorm is the mean over restarts (the
/// tabulated convention) and the stats carry best/mean/stddev.
struct GapReport {
    std::string experiment;
    std::string gate;
    SystemShape shape;
    std::string metric;

    double cost_frobenius = 0.0;
    double gap_frobenius = 0.0;
    double gap_frobenius_renorm = 0.0;
    std::optional<double> cost_pnorm;
    std::optional<double> gap_pnorm;

    double target_norm_f_sq = 0.0;
    double seq_norm_f_sq = 0.0;

    RestartStats restarts;
    bool converged = false;
    int sweeps_used = 0;
    std::string config_digest;

    bool operator==(const GapReport&) const = default;
};

/// Assembles a report from an optimization result.  `target` and `seq`
/// are the effective pair the gaps refer to (for isometry runs: V and
/// U_seq K).  For Metric::pnorm2 the restart statistics and headline
/// gap_pnorm are computed from result.restart_costs; for
/// Metric::frobenius they summarize the Frobenius restart costs.
GapReport make_gap_report(const std::string& experiment, const std::string& gate,
                          const SystemShape& shape, Metric metric,
                          const ComplexMatrix& target, const ComplexMatrix& seq,
                          const OptimizeResult& result,
                          const std::string& config_digest);

/// Short stable hex digest of an optimizer configuration (FNV-1a over
/// its canonical text form); recorded in reports for reproducibility.
std::string config_digest(const OptimizerConfig& cfg);

/// JSON round-trip for reports.
std::string gap_report_to_json_string(const GapReport& report);
GapReport gap_report_from_json_string(const std::string& text);

/// CSV header and one data row (fields in header order; absent
/// optionals are empty).
std::string gap_report_csv_header();
std::string gap_report_csv_row(const GapReport& report);

}  // namespace vmpo
