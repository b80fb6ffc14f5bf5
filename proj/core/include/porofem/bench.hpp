#pragma once

#include <optional>
#include <string>
#include <vector>

#include "porofem/schemes.hpp"

namespace porofem {

enum class Problem { TestProblem1, LargeDeformation2D };

const char *to_string(Problem p);

// One benchmark run: which problem, which nonlinearity case (problem 1 only),
// which scheme, and the discretization parameters.  Scheme parameters left
// empty are resolved from the model (Lipschitz constants, stabilization
// bound, initial-state tangents).
struct ExperimentSpec {
    std::string id = "default";
    Problem problem = Problem::TestProblem1;
    int case_id = 1;
    SchemeKind scheme = SchemeKind::MonolithicNewton;
    double h = 0.1;
    double tau = 0.1;
    double T = 1.0;
    std::optional<double> Ls, Lp, Lu;
    double tol = 1e-8;
    int max_iter = 100;
    double theta_final = 0.19634954084936207;  // pi/16, the rotation default
    bool paper_rotation = false;   // full quarter-turn rotation instead of the default
    bool expect_converged = true;  // rows marked otherwise don't fail the run
    MaterialParams params;

    void validate() const;
};

// Per-problem defaults: problem 1 runs at h = tau = 0.1 until T = 1 with zero
// initial data; the driven-rotation benchmark at h = tau = 1/8 with final
// angle pi/16 (pi/4 behind the paper_rotation flag).
ExperimentSpec default_spec(Problem problem);

struct ReportRow {
    ExperimentSpec spec;
    double Ls_used = 0.0, Lp_used = 0.0, Lu_used = 0.0;
    std::vector<IterRecord> final_history;  // last attempted time step
    TermStatus status = TermStatus::MaxIter;
    bool solver_error = false;  // an exception escaped the solver
    int iters = 0;
    OrderFit fit;
    double err_p = 0.0, err_u = 0.0;  // L2 errors vs the closed form (problem 1)
    bool has_errors = false;
    int failed_step = -1;

    bool converged() const { return !solver_error && status == TermStatus::Converged; }
};

// Problem definitions.  The boundary-condition functor is bound to a mesh by
// the runner (or by the caller, for custom runs).
ProblemDef make_test_problem_1(int case_id, const MaterialParams &params);
// The driven-rotation analog: top edge rotated in-plane about its midpoint,
// bottom edge normal-constrained, lateral edges traction-free, p = 0 on the
// whole boundary (natural).  `regime` selects the full kinematics or the
// small-deformation limit of the same boundary data.
ProblemDef make_large_deformation_2d(const MaterialParams &params,
                                     Regime regime = Regime::Large);

// Homogeneous displacement constraint on the whole boundary.
DirichletBC zero_boundary_bc(const Mesh &mesh);
// Driven-rotation data: top edge u = (R(theta) - I)(X - C) about the
// top-edge midpoint C, bottom edge u.n = 0.
DirichletBC rotation_bc(const Mesh &mesh, double theta);

// Scheme parameter resolution for a spec (overrides win over derived values).
SchemeConfig make_scheme_config(const ExperimentSpec &spec, const ProblemDef &def);

ReportRow run_test_problem_1(const ExperimentSpec &spec);
ReportRow run_large_deformation_2d(const ExperimentSpec &spec);
ReportRow run_experiment(const ExperimentSpec &spec);  // dispatch on spec.problem

enum class SweepAxis { Tau, H, Ls, Case, Scheme };

const char *to_string(SweepAxis axis);
std::optional<SweepAxis> sweep_axis_from_string(const std::string &name);

// One run per value, everything else shared; individual failures are
// recorded per row and the sweep continues.
std::vector<ReportRow> sweep(const ExperimentSpec &base, SweepAxis axis,
                             const std::vector<double> &values);

// Reports: fixed-header summary table and the long-format per-iteration
// table of the final time step, both written atomically (write-then-rename)
// with 16 significant digits.
void write_summary_csv(const std::string &path, const std::vector<ReportRow> &rows);
void write_iterations_csv(const std::string &path, const std::vector<ReportRow> &rows);

std::string format_g16(double v);

}  // namespace porofem
