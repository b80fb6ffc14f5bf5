#include "porofem/kinematics.hpp"

#include <cmath>

#include "porofem/errors.hpp"

namespace porofem {

KinematicPoint KinematicPoint::from_grad_u(const Mat2 &grad_u) {
    KinematicPoint kp;
    kp.grad_u = grad_u;
    kp.F = deformation_gradient(grad_u);
    kp.J = det(kp.F);
    if (kp.J == 0.0 || !std::isfinite(kp.J))
        throw NonInvertibleDeformationError("non-invertible deformation (det F = 0)");
    kp.Finv = inverse(kp.F);
    kp.E = green_strain(kp.F);
    return kp;
}

Mat2 deformation_gradient(const Mat2 &grad_u) { return Mat2::identity() + grad_u; }

Mat2 green_strain(const Mat2 &F) {
    return 0.5 * (transpose(F) * F - Mat2::identity());
}

Mat2 svk_stress(const Mat2 &E, double mu, const NonlinearityModel &model) {
    return 2.0 * mu * E + model.c(trace(E)) * Mat2::identity();
}

namespace {
// J Finv Finv^T, the pull-back weight of an isotropic Cauchy pressure.
inline Mat2 pressure_pullback(const KinematicPoint &kp) {
    return kp.J * (kp.Finv * transpose(kp.Finv));
}
}  // namespace

TotalStress total_stresses(const KinematicPoint &kp, const Mat2 &sigma_eff, double p) {
    TotalStress s;
    s.sigma = sigma_eff - p * pressure_pullback(kp);
    s.pi = kp.F * s.sigma;
    return s;
}

Mat2 pullback_permeability(const KinematicPoint &kp, double k) {
    return k * pressure_pullback(kp);
}

ContentRateCoeffs fluid_content_rate_coeffs(const KinematicPoint &kp, const MaterialParams &params) {
    return {params.c_p * kp.J * params.phi, params.c_alpha};
}

Vec2 gravity_pullback(const Mat2 &F, const Vec2 &g) { return transpose(F) * g; }

StressDerivatives directional_derivatives(const KinematicPoint &kp, double p, double mu, double k,
                                          const NonlinearityModel &model, const Mat2 &grad_du,
                                          double dp) {
    const Mat2 &H = grad_du;
    const Mat2 &F = kp.F;
    const Mat2 &Fi = kp.Finv;
    const Mat2 FiT = transpose(Fi);

    StressDerivatives d;
    d.dJ = kp.J * trace(Fi * H);

    // d(J Finv Finv^T) by the product rule through dJ, d(Finv) = -Finv H Finv.
    const Mat2 G = Fi * FiT;
    const Mat2 dG = d.dJ * G - kp.J * (Fi * H * G) - kp.J * (G * transpose(H) * FiT);

    const Mat2 dE = sym(transpose(F) * H);
    const Mat2 dSigmaEff = 2.0 * mu * dE + model.dc(trace(kp.E)) * trace(dE) * Mat2::identity();
    const Mat2 sigma_eff = svk_stress(kp.E, mu, model);
    const Mat2 sigma = sigma_eff - p * (kp.J * G);

    const Mat2 dSigma = dSigmaEff - p * dG - dp * (kp.J * G);
    d.dPi = H * sigma + F * dSigma;
    d.dK = k * dG;
    return d;
}

}  // namespace porofem
