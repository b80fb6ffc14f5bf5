#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "porofem/assembly.hpp"

namespace porofem {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Jacobian exactness: on `count` random admissible states and directions per
// regime, the assembled matrix-vector product must match central finite
// differences of the residual map with relative error <= 1e-6.
std::vector<CheckResult> verify_jacobian(std::uint64_t seed, int count = 100);

// Pointwise identities: rigid-rotation zero stress (<= 1e-12), identity
// pull-backs (<= 1e-14), small-strain limit of order >= 2, analytic
// directional derivatives vs central differences on random states.
std::vector<CheckResult> verify_kinematics(std::uint64_t seed);

// Manufactured-solution consistency: inserting the interpolated closed-form
// fields into the discrete residuals gives norms that shrink with observed
// order >= 1 under simultaneous (h, tau) halving.
std::vector<CheckResult> verify_consistency();

// Random admissible states/directions shared by the Jacobian checks and the
// acceptance suite.  Displacements are scaled so every cell keeps J well
// above the admissibility threshold.
DiscreteState random_state(const Discretization &disc, std::uint64_t seed, double scale);
std::vector<double> random_direction(const Discretization &disc, std::uint64_t seed);

// Relative mismatch between the assembled Jacobian action and a central
// finite difference of the residual map in one direction (step 1e-6).
double jacobian_fd_error(const Discretization &disc, const ProblemDef &def,
                         const DirichletBC &bc, const DiscreteState &state,
                         const DiscreteState &prev, double tau,
                         const std::vector<double> &direction);

}  // namespace porofem
