#pragma once

#include <functional>
#include <string>

#include "porofem/tensor.hpp"

namespace porofem {

struct MaterialParams {
    double mu = 1.0;       // shear modulus
    double alpha = 1.0;    // Biot coefficient, small-deformation coupling
    double k = 1.0;        // scalar mobility (permeability / viscosity)
    double c_p = 1.0;      // fluid compressibility
    double c_alpha = 1.0;  // large-deformation coupling coefficient
    double phi = 0.5;      // porosity
    double rho_b = 0.0;    // bulk density
    double rho_f = 0.0;    // fluid density
    Vec2 gravity{0.0, 0.0};

    // mu > 0, 0 < alpha <= 1, k > 0, c_p >= 0, 0 < phi < 1.  Throws on violation.
    void validate() const;
};

// The scalar coefficient pair b(.) (pressure) and c(.) (volumetric strain)
// with derivatives and the constants estimated over the declared admissible
// ranges by dense sampling.
struct NonlinearityModel {
    std::string name;
    std::function<double(double)> b, db;
    std::function<double(double)> c, dc;

    // Declared admissible ranges the constants were estimated on.
    double p_lo = 0.0, p_hi = 0.0;
    double xi_lo = 0.0, xi_hi = 0.0;

    // Monotonicity lower bounds: inf b' and inf c' over the ranges.
    double alpha_b = 0.0, alpha_c = 0.0;
    // Lipschitz constants of b and c themselves (sup |b'|, sup |c'|); the
    // benchmark uses these as the scalar linearization parameters.
    double lipschitz_func_b = 0.0, lipschitz_func_c = 0.0;
    // Lipschitz constants of the derivatives b', c' (difference-quotient
    // estimates; for a Hoelder derivative the estimate is grid-dependent).
    double lipschitz_b = 0.0, lipschitz_c = 0.0;
    // c' is continuous but not Lipschitz at 0 (case with the odd 5/3 power).
    bool holder_derivative = false;

    // Re-estimate the constants by sampling `samples` points of each range.
    void estimate_constants(int samples = 10000);
};

// The four coefficient pairs of the small-deformation benchmark:
//   1: b = e^p,  c = xi^3 + xi
//   2: b = e^p,  c = xi^3
//   3: b = e^p,  c = sign(xi)|xi|^(5/3) + xi
//   4: b = p^2,  c = xi^2
// Constants are estimated over the manufactured-solution ranges
// p in [0, 1/16], xi in [-1/4, 1/4].  Rejects cases outside 1..4.
NonlinearityModel nonlinearity_case(int case_id);

// Linear pair b(p) = b1 * p, c(xi) = c1 * xi (affine residuals; also the
// constitutive law of the large-deformation benchmark).
NonlinearityModel linear_model(double b1, double c1);

// Closed-form fields of the small-deformation benchmark on the unit square:
//   p(x,y,t) = t x(1-x) y(1-y),  u1 = u2 = p,  q = -k grad p.
// p and u vanish on the boundary.
struct ManufacturedSolution {
    double k = 1.0;  // mobility entering q = -k grad p

    double p(const Vec2 &x, double t) const;
    Vec2 grad_p(const Vec2 &x, double t) const;
    Vec2 u(const Vec2 &x, double t) const;
    Mat2 grad_u(const Vec2 &x, double t) const;
    Vec2 q(const Vec2 &x, double t) const { return -k * grad_p(x, t); }

    double dp_dt(const Vec2 &x) const;        // time derivative of p (t-independent)
    double div_u_dt(const Vec2 &x) const;     // div of u-rate
    double div_u(const Vec2 &x, double t) const;
    double div_q(const Vec2 &x, double t) const;
    // Divergence of the small-strain stress pieces, all closed form:
    Vec2 div_eps(const Vec2 &x, double t) const;      // div of sym grad u
    Vec2 grad_div_u(const Vec2 &x, double t) const;   // grad of div u
};

// Pointwise manufactured forcing terms:
//   f_mech = -div sigma(u_exact, p_exact),
//   S_f    = d/dt b(p_exact) + alpha div u_dot + div q_exact,
// with sigma = 2 mu eps(u) + c(div u) I - alpha p I.
struct ManufacturedForcing {
    ManufacturedSolution exact;
    MaterialParams params;
    NonlinearityModel model;

    Vec2 f_mech(const Vec2 &x, double t) const;
    double source(const Vec2 &x, double t) const;
};

}  // namespace porofem
