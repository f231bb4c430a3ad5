#pragma once

// Variational optimization of the sequential chain against a target.
//
// Frobenius metric: alternating local polar updates.  Each site's
// environment E_k makes the overlap linear in that site's matrix, and
// the polar factor of E_k is the exact maximizer of Re Tr[E_k† W] over
// unitaries, so every update lowers (never raises) the cost
//     C_F = ||T - U_seq||_F^2.
//
// Spectral (p = 2) metric: C_p = ||T - U_seq||_2^2 is not amenable to
// closed-form local updates, so each restart is warm-started from a
// best-of-restarts Frobenius solve and then refined by coordinate
// descent on the sites' Hermitian-generator coefficients with an
// adaptive step that halves whenever a full pass stalls.  Because the
// spectral norm is non-smooth at its minimizers, each restart races a
// plain exact descent against a second branch that first descends a
// high-order Schatten surrogate (its round budget grows with the
// restart index) and keeps the better endpoint; the reported gap is
// the mean over restarts while the returned chain is the best one.
//
// Isometry targets reuse the Frobenius machinery on the square
// effective target V K†; the cost is C_F = ||(T - U_seq) K||_F^2.

#include <cstdint>
#include <vector>

#include "vmpo/gatelib.hpp"
#include "vmpo/seqmpo.hpp"

namespace vmpo {

enum class Metric { frobenius, pnorm2 };

std::string metric_name(Metric metric);
Metric metric_from_name(const std::string& name);

enum class InitMode { identity, haar_random };

struct OptimizerConfig {
    Metric metric = Metric::frobenius;
    int max_sweeps = 500;
    double rel_tol = 1e-9;
    int restarts = 10;
    InitMode init_mode = InitMode::haar_random;
    std::uint64_t seed = 1;

    // p-norm refinement: initial coordinate step and the cap on
    // coordinate passes over one site before moving on.
    double pnorm_step = 0.3;
    int pnorm_max_iters_per_site = 6;
};

void validate_config(const OptimizerConfig& cfg);

/// Per-sweep cost history of the best restart.  sweep_costs[0] is the
/// cost of the initial chain; one entry follows per completed sweep
/// (Frobenius) or descent round (p-norm).  Frobenius histories are
/// non-increasing by construction.  A p-norm history records the exact
/// spectral cost of every round across both restart branches, so it
/// may rise during surrogate exploration; it closes with the winning
/// cost, making the last entry the minimum of the record.
/// wall_time_s covers the whole call, all restarts included.
struct ConvergenceTrace {
    std::vector<double> sweep_costs;
    bool converged = false;
    int sweeps_used = 0;
    double wall_time_s = 0.0;
};

/// Outcome of a multi-restart optimization.  restart_costs holds each
/// restart's final cost in restart order (NaN marks a restart aborted
/// by a numerical failure); `mpo` and `trace` belong to the restart
/// with the lowest cost.
struct OptimizeResult {
    SequentialMPO mpo;
    ConvergenceTrace trace;
    std::vector<double> restart_costs;
    int best_restart = -1;
    double best_cost = 0.0;
};

/// Polar factor u v† of the environment: the unitary maximizing
/// Re Tr[env† w].  Alias of polar_unitary with optimizer semantics.
ComplexMatrix local_polar_update(const ComplexMatrix& env);

/// Minimizes ||target - U_seq||_F^2 over chains for a square target on
/// the enlarged space (shape.input_qubits must equal n_qubits).
OptimizeResult optimize_frobenius(const ComplexMatrix& target,
                                  const SystemShape& shape,
                                  const OptimizerConfig& cfg);

/// Minimizes ||target - U_seq||_2^2.  cfg.restarts controls both the
/// outer p-norm restarts and the inner Frobenius warm-start quality.
OptimizeResult optimize_pnorm(const ComplexMatrix& target, const SystemShape& shape,
                              const OptimizerConfig& cfg);

/// Minimizes ||(V - U_seq K)||_F^2 for an isometry target V with input
/// contraction K built from (shape, psi_fixed, phi_ancilla).  Only the
/// Frobenius metric is supported here.
OptimizeResult optimize_isometry(const ComplexMatrix& target_isometry,
                                 const SystemShape& shape,
                                 const std::vector<ComplexVector>& psi_fixed,
                                 const ComplexVector& phi_ancilla,
                                 const OptimizerConfig& cfg);

}  // namespace vmpo
