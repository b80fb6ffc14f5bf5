#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "porofem/femspace.hpp"
#include "porofem/kinematics.hpp"
#include "porofem/linsolve.hpp"
#include "porofem/mesh.hpp"
#include "porofem/model.hpp"

namespace porofem {

enum class Regime { Small, Large };

// Unknown ordering of the coupled systems: displacement block first, then
// edge fluxes, then cell pressures.
struct DofLayout {
    int nu = 0, nq = 0, np = 0;
    int q_offset() const { return nu; }
    int p_offset() const { return nu + nq; }
    int total() const { return nu + nq + np; }
};

// Coefficient vectors of one discrete solution.  Dirichlet-constrained
// displacement entries carry the prescribed boundary values.
struct DiscreteState {
    std::vector<double> u, q, p;
    double t = 0.0;
};

// Prescribed displacement values, dense over the displacement DOFs.
struct DirichletBC {
    std::vector<char> constrained;  // size ndof_u
    std::vector<double> values;     // size ndof_u, meaningful where constrained
};

// Problem data shared by all assembly entry points.  `f_mech` and `source`
// are the manufactured right-hand sides (null means the body force defaults
// to rho_b * gravity and the source to zero).
struct ProblemDef {
    Regime regime = Regime::Small;
    MaterialParams params;
    NonlinearityModel model;
    std::function<Vec2(const Vec2 &, double)> f_mech;
    std::function<double(const Vec2 &, double)> source;
    std::function<DirichletBC(double)> bc;
};

// Mesh + spaces + quadrature + mass matrices, built once and shared.
class Discretization {
  public:
    explicit Discretization(Mesh mesh, int quad_order = 4);

    const Mesh &mesh() const { return *mesh_; }
    const SpaceTriple &space() const { return space_; }
    const QuadratureRule &quad() const { return quad_; }
    const DofLayout &layout() const { return layout_; }

    DiscreteState zero_state() const;

    // L2(Omega) norms of FE functions, induced by the space mass matrices.
    double norm_u(std::span<const double> u) const;
    double norm_q(std::span<const double> q) const;
    double norm_p(std::span<const double> p) const;

    // L2 norms of the Riesz representers of residual functionals
    // (sqrt(F' M^-1 F)); puts residual and increment norms on the same scale.
    double repr_norm_u(std::span<const double> f) const;
    double repr_norm_q(std::span<const double> f) const;
    double repr_norm_p(std::span<const double> f) const;

    const SparseMatrix &mass_u() const { return mass_u_; }
    const SparseMatrix &mass_q() const { return mass_q_; }
    const std::vector<double> &mass_p() const { return mass_p_; }

  private:
    std::shared_ptr<const Mesh> mesh_;
    SpaceTriple space_;
    QuadratureRule quad_;
    DofLayout layout_;
    SparseMatrix mass_u_, mass_q_;
    std::vector<double> mass_p_;
    std::unique_ptr<Factorization> mass_u_fact_, mass_q_fact_;
};

// Residual vectors; mech rows at constrained DOFs are replaced by the
// constraint value (current - prescribed).
struct Residuals {
    std::vector<double> mech, darcy, mass;
};

struct ResidualNorms {
    double mech = 0.0, darcy = 0.0, mass = 0.0;
    double total() const { return mech + darcy + mass; }
};

struct IncrementNorms {
    double du = 0.0, dq = 0.0, dp = 0.0;
    double total() const { return du + dq + dp; }
};

// Coupled linear system over (u, q, p); rhs is the negative residual with
// Dirichlet rows replaced by identity-constraint rows.
struct BlockSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
    DofLayout layout;
};

// (q, p) subsystem of the splitting step 1 (fluxes first, then pressures).
struct FlowSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
    int nq = 0, np = 0;
};

// Displacement-only system of the splitting step 2.
struct MechSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
};

// Constant linearization parameters of the monolithic L-scheme; the splitting
// variant uses tensor_Lu, Lp and the stabilization Ls only.
struct LSchemeParams {
    Tensor4 tensor_Lu;                  // frozen mechanics tangent
    Mat2 tensor_Lp;                     // mech-pressure coupling tensor
    Mat2 tensor_Lq;                     // Darcy-displacement coupling tensor
    double Lp = 1.0;                    // mass-pressure scalar, must be > 0
    double Lu = 1.0;                    // mass-dilation scalar
};

enum class FlowLinearization { NewtonTangent, ConstantLp };
enum class MechLinearization { NewtonTangent, ConstantTensor };

// Residuals of the backward-Euler step from `prev` to `state` at state.t;
// dispatches on def.regime.  tau must be positive; vector lengths must match
// the layout.  In the large regime every cell must satisfy J > kAdmissibleJ,
// otherwise ElementInversionError is thrown.
Residuals assemble_residuals(const Discretization &disc, const ProblemDef &def,
                             const DirichletBC &bc, const DiscreteState &state,
                             const DiscreteState &prev, double tau);

ResidualNorms residual_norms(const Discretization &disc, const Residuals &r);

// Exact Jacobian of the residual map at `state`; rhs = negative residuals.
BlockSystem newton_system(const Discretization &disc, const ProblemDef &def,
                          const DirichletBC &bc, const DiscreteState &state,
                          const DiscreteState &prev, double tau);

// Constant-matrix fixed-point system; state enters only through the residual
// and (in the large regime) through K(u^{i-1}).
BlockSystem lscheme_system(const Discretization &disc, const ProblemDef &def,
                           const DirichletBC &bc, const DiscreteState &state,
                           const DiscreteState &prev, double tau, const LSchemeParams &lp);

// Splitting step 1: (q, p) saddle system with displacement frozen at state.u.
// The pressure block carries the Newton tangent b'(p^{i-1}) (c_p J phi in the
// large regime) or the constant Lp.
FlowSystem splitting_flow_system(const Discretization &disc, const ProblemDef &def,
                                 const DiscreteState &state, const DiscreteState &prev,
                                 double tau, FlowLinearization lin, double Lp);

// Splitting step 2: mechanics tangent (Newton at state.u or the frozen
// tensor) augmented by Ls (div du, div v); rhs = -F_mech(state.u, state.p)
// where state.p is the updated pressure from step 1.
MechSystem splitting_mech_system(const Discretization &disc, const ProblemDef &def,
                                 const DirichletBC &bc, const DiscreteState &state,
                                 double tau, double Ls, MechLinearization lin,
                                 const Tensor4 *frozen_tangent);

// Stacked right-hand side [-F_mech; -F_darcy; -F_mass].
std::vector<double> stacked_negated_residuals(const Residuals &r, const DofLayout &layout);

// State helpers.
void apply_bc(DiscreteState &state, const DirichletBC &bc);
void add_increment(DiscreteState &state, const DofLayout &layout, std::span<const double> delta);
IncrementNorms increment_norms(const Discretization &disc, std::span<const double> delta);

namespace detail {
// Cell-loop order override backing the commutative-accumulation contract
// (order-independence) test; empty span means natural order.
BlockSystem newton_system_ordered(const Discretization &disc, const ProblemDef &def,
                                  const DirichletBC &bc, const DiscreteState &state,
                                  const DiscreteState &prev, double tau,
                                  std::span<const int> cell_order);
}  // namespace detail

}  // namespace porofem
