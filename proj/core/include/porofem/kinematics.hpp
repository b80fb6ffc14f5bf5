#pragma once

#include "porofem/model.hpp"
#include "porofem/tensor.hpp"

namespace porofem {

// Quadrature points with J at or below this value abort the nonlinear
// iteration with an element-inversion diagnostic.
inline constexpr double kAdmissibleJ = 0.05;

// Per-point large-deformation state derived from the displacement gradient.
struct KinematicPoint {
    Mat2 grad_u;
    Mat2 F;        // I + grad_u
    double J = 1;  // det F
    Mat2 Finv;
    Mat2 E;        // Green strain

    // Throws NonInvertibleDeformationError when F is singular.
    static KinematicPoint from_grad_u(const Mat2 &grad_u);
};

Mat2 deformation_gradient(const Mat2 &grad_u);
Mat2 green_strain(const Mat2 &F);

// Effective second Piola-Kirchhoff stress of the Saint Venant-Kirchhoff law
// with a nonlinear volumetric response: Sigma_eff = 2 mu E + c(tr E) I.
Mat2 svk_stress(const Mat2 &E, double mu, const NonlinearityModel &model);

// Total second and first Piola-Kirchhoff stresses,
// Sigma = Sigma_eff - p J Finv Finv^T,  Pi = F Sigma.
struct TotalStress {
    Mat2 sigma;
    Mat2 pi;
};
TotalStress total_stresses(const KinematicPoint &kp, const Mat2 &sigma_eff, double p);

// Pull-back of the (scalar) mobility: K = J Finv k Finv^T, SPD for J > 0.
Mat2 pullback_permeability(const KinematicPoint &kp, double k);

// Coefficients of the fluid-content rate: d/dt Gamma = (c_p J phi) dp/dt + c_alpha dJ/dt.
struct ContentRateCoeffs {
    double dp_coeff;   // c_p J phi
    double dj_coeff;   // c_alpha
};
ContentRateCoeffs fluid_content_rate_coeffs(const KinematicPoint &kp, const MaterialParams &params);

Vec2 gravity_pullback(const Mat2 &F, const Vec2 &g);

// Gateaux derivatives in the direction (grad_du, dp), assembled analytically
// through the chain rule; the finite-difference companion lives in the tests.
struct StressDerivatives {
    Mat2 dPi;   // directional derivative of the first Piola-Kirchhoff stress
    Mat2 dK;    // directional derivative of the pulled-back mobility
    double dJ;  // directional derivative of det F
};
StressDerivatives directional_derivatives(const KinematicPoint &kp, double p, double mu, double k,
                                          const NonlinearityModel &model, const Mat2 &grad_du,
                                          double dp);

}  // namespace porofem
