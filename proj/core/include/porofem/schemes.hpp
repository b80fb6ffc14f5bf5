#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "porofem/assembly.hpp"

namespace porofem {

enum class SchemeKind { MonolithicNewton, SplittingNewton, MonolithicLScheme, SplittingLScheme };

const char *to_string(SchemeKind kind);

struct SchemeConfig {
    SchemeKind kind = SchemeKind::MonolithicNewton;
    double Ls = 0.0;        // splitting stabilization, >= 0
    double Lp = 1.0;        // mass-pressure linearization scalar, > 0 for L-schemes
    double Lu = 1.0;        // mass-dilation linearization scalar
    Tensor4 tensor_Lu;      // frozen mechanics tangent (L-schemes)
    Mat2 tensor_Lp;         // mech-pressure coupling tensor (monolithic L-scheme)
    Mat2 tensor_Lq;         // Darcy-displacement coupling tensor (monolithic L-scheme)
    double tol = 1e-8;      // increment-norm stopping tolerance
    int max_iter = 100;

    void validate() const;  // tol > 0, max_iter >= 1, positive Lp for L-schemes
    LSchemeParams lparams() const { return {tensor_Lu, tensor_Lp, tensor_Lq, Lp, Lu}; }
};

enum class TermStatus { Converged, MaxIter, Diverged, ElementInversion };

const char *to_string(TermStatus status);

struct IterRecord {
    double du = 0.0, dq = 0.0, dp = 0.0;  // L2 increment norms
    double total = 0.0;                   // du + dq + dp, the stopping quantity
    double res_mech = 0.0, res_darcy = 0.0, res_mass = 0.0;  // representer norms
    double wall_seconds = 0.0;
};

struct ConvergenceHistory {
    std::vector<IterRecord> iters;
    TermStatus status = TermStatus::MaxIter;
    int factorizations = 0;      // matrix factorization count of this step
    double condition_estimate = 0.0;  // of the first factored matrix
    int inverted_cell = -1;      // offending cell for ElementInversion

    int iterations() const { return static_cast<int>(iters.size()); }
};

// One backward-Euler step from `prev` to time t_new = prev.t + tau, iterated
// with the selected scheme until the increment criterion
// |du| + |dq| + |dp| <= tol, the iteration cap, or divergence (stopping
// quantity grows by >= 1e3 over its first value).  A state whose residual
// drops to round-off converges immediately (affine problems finish in one
// iteration).  Splitting kinds run flow (q, p) then mechanics (u) per
// iteration, with the updated pressure fed to the mechanics step.
std::pair<DiscreteState, ConvergenceHistory> solve_time_step(const Discretization &disc,
                                                             const ProblemDef &def,
                                                             const SchemeConfig &cfg,
                                                             const DiscreteState &prev,
                                                             double t_new, double tau);

struct TransientResult {
    DiscreteState state;
    std::vector<ConvergenceHistory> steps;
    int failed_step = -1;  // 1-based index of the first non-converged step, -1 if none

    bool ok() const { return failed_step < 0; }
    const ConvergenceHistory &last_history() const { return steps.back(); }
};

// Marches n = 1..N with tau = T/N; each step seeds from the previous
// solution.  T must be a positive integer multiple of tau.
TransientResult run_transient(const Discretization &disc, const ProblemDef &def,
                              const SchemeConfig &cfg, DiscreteState initial, double tau,
                              double T);

struct OrderFit {
    double order = 0.0;        // least-squares slope of log e_i vs log e_{i-1}
    double contraction = 0.0;  // geometric mean of e_i / e_{i-1}
    bool defined = false;
    bool stagnating = false;   // contraction ~ 1, non-convergent trend
};

// Fits over the final `window` consecutive iterate pairs whose stopping
// quantities sit above the machine-noise floor 1e-12.  Undefined for fewer
// than 3 recorded iterations.
OrderFit fit_convergence_order(const ConvergenceHistory &history, int window = 3);

// a x0^2 + b <= 1, the sufficient condition for the quadratic-recursion
// sequence to converge; inputs must be non-negative.
bool quadratic_recursion_bound_holds(double a, double b, double x0);

// Stabilization bound alpha^2 / alpha_b from the model's estimated
// monotonicity constant; empty when alpha_b <= 0 (no guaranteed
// stabilization, hypothesis violated).
std::optional<double> recommended_Ls(const MaterialParams &params, const NonlinearityModel &model);

}  // namespace porofem
