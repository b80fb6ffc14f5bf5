#include "porofem/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <tuple>

#include "porofem/kinematics.hpp"

namespace porofem {

namespace {

constexpr double kFdStep = 1e-6;

DirichletBC boundary_zero(const Mesh &mesh) {
    DirichletBC bc;
    bc.constrained.assign(2 * mesh.num_vertices(), 0);
    bc.values.assign(2 * mesh.num_vertices(), 0.0);
    for (int v : mesh.boundary_vertices()) {
        bc.constrained[2 * v] = 1;
        bc.constrained[2 * v + 1] = 1;
    }
    return bc;
}

MaterialParams verify_params() {
    MaterialParams p;
    p.mu = 1.0;
    p.alpha = 1.0;
    p.k = 1.0;
    p.c_p = 1.0;
    p.phi = 0.5;
    p.rho_b = 0.7;
    p.rho_f = 0.3;
    p.gravity = {0.1, -0.2};
    return p;
}

ProblemDef verify_def(Regime regime) {
    ProblemDef def;
    def.regime = regime;
    def.params = verify_params();
    def.model = nonlinearity_case(1);
    return def;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double lstsq_slope(const std::vector<double> &logx, const std::vector<double> &logy) {
    const size_t n = logx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += logx[i];
        sy += logy[i];
        sxx += logx[i] * logx[i];
        sxy += logx[i] * logy[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

DiscreteState random_state(const Discretization &disc, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    DiscreteState s = disc.zero_state();
    const double h = disc.mesh().mesh_size();
    for (double &v : s.u) v = scale * h * unit(rng);
    for (double &v : s.q) v = scale * h * unit(rng);
    for (double &v : s.p) v = scale * unit(rng);
    return s;
}

std::vector<double> random_direction(const Discretization &disc, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> d(disc.layout().total());
    for (double &v : d) v = unit(rng);
    return d;
}

double jacobian_fd_error(const Discretization &disc, const ProblemDef &def,
                         const DirichletBC &bc, const DiscreteState &state,
                         const DiscreteState &prev, double tau,
                         const std::vector<double> &direction) {
    const BlockSystem sys = newton_system(disc, def, bc, state, prev, tau);
    const std::vector<double> jv = sys.matrix.multiply(direction);

    auto stacked = [&](const DiscreteState &s) {
        const Residuals r = assemble_residuals(disc, def, bc, s, prev, tau);
        std::vector<double> f(disc.layout().total());
        for (int i = 0; i < disc.layout().nu; ++i) f[i] = r.mech[i];
        for (int i = 0; i < disc.layout().nq; ++i) f[disc.layout().q_offset() + i] = r.darcy[i];
        for (int i = 0; i < disc.layout().np; ++i) f[disc.layout().p_offset() + i] = r.mass[i];
        return f;
    };

    DiscreteState plus = state, minus = state;
    std::vector<double> dp = direction, dm = direction;
    for (double &v : dp) v *= kFdStep;
    for (double &v : dm) v *= -kFdStep;
    add_increment(plus, disc.layout(), dp);
    add_increment(minus, disc.layout(), dm);
    const std::vector<double> fp = stacked(plus);
    const std::vector<double> fm = stacked(minus);

    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < jv.size(); ++i) {
        const double fd = (fp[i] - fm[i]) / (2.0 * kFdStep);
        num += (jv[i] - fd) * (jv[i] - fd);
        den += jv[i] * jv[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

std::vector<CheckResult> verify_jacobian(std::uint64_t seed, int count) {
    std::vector<CheckResult> results;
    for (const Regime regime : {Regime::Small, Regime::Large}) {
        Discretization disc(unit_square_mesh(4));
        const ProblemDef def = verify_def(regime);
        const DirichletBC bc = boundary_zero(disc.mesh());
        double worst = 0.0;
        for (int i = 0; i < count; ++i) {
            const DiscreteState state = random_state(disc, seed + 2 * i, 0.02);
            const DiscreteState prev = random_state(disc, seed + 2 * i + 1, 0.02);
            const std::vector<double> dir = random_direction(disc, seed + 7919 + i);
            worst = std::max(worst,
                             jacobian_fd_error(disc, def, bc, state, prev, 0.1, dir));
        }
        results.push_back({std::string("jacobian_fd_") +
                               (regime == Regime::Small ? "small" : "large"),
                           worst <= 1e-6, "max relative error " + fmt(worst)});
    }
    return results;
}

std::vector<CheckResult> verify_kinematics(std::uint64_t seed) {
    std::vector<CheckResult> results;
    const MaterialParams par = verify_params();
    const NonlinearityModel model = nonlinearity_case(1);

    // Rigid rotations carry no stress.
    {
        double worst = 0.0;
        for (const double theta : {0.3, -1.2, 1.5707963267948966}) {
            const Mat2 g = Mat2::rotation(theta) - Mat2::identity();
            const KinematicPoint kp = KinematicPoint::from_grad_u(g);
            const Mat2 sig_eff = svk_stress(kp.E, par.mu, model);
            const TotalStress ts = total_stresses(kp, sig_eff, 0.0);
            worst = std::max({worst, frobenius_norm(kp.E), frobenius_norm(ts.sigma),
                              frobenius_norm(ts.pi)});
        }
        results.push_back({"rigid_rotation_zero_stress", worst <= 1e-12,
                           "max stress norm " + fmt(worst)});
    }

    // Identity pull-backs.
    {
        const KinematicPoint kp = KinematicPoint::from_grad_u(Mat2::zero());
        const Mat2 K = pullback_permeability(kp, par.k);
        const Vec2 ups = gravity_pullback(kp.F, par.gravity);
        const TotalStress ts = total_stresses(kp, Mat2::zero(), 2.0);
        double worst = frobenius_norm(K - Mat2::diag(par.k, par.k));
        worst = std::max(worst, norm(ups - par.gravity));
        worst = std::max(worst, frobenius_norm(ts.pi + 2.0 * Mat2::identity()));
        worst = std::max(worst, std::abs(kp.J - 1.0));
        results.push_back({"identity_pullbacks", worst <= 1e-14, "max deviation " + fmt(worst)});
    }

    // Small-strain limit: || Pi(eps G, eps p) - sigma_small || = O(eps^2).
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        double worst_order = 1e100;
        for (int trial = 0; trial < 5; ++trial) {
            Mat2 g;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) g[i][j] = unit(rng);
            const double phat = unit(rng);
            std::vector<double> le, ld;
            for (const double eps : {1e-1, 1e-2, 1e-3}) {
                const Mat2 ge = eps * g;
                const double pe = eps * phat;
                const KinematicPoint kp = KinematicPoint::from_grad_u(ge);
                const Mat2 pi = total_stresses(kp, svk_stress(kp.E, par.mu, model), pe).pi;
                const Mat2 sigma_small = 2.0 * par.mu * sym(ge) +
                                         (model.c(trace(ge)) - pe) * Mat2::identity();
                le.push_back(std::log(eps));
                ld.push_back(std::log(frobenius_norm(pi - sigma_small)));
            }
            worst_order = std::min(worst_order, lstsq_slope(le, ld));
        }
        // 3-point log-log fits wobble a few hundredths around the exact
        // order; 0.05 of slack still cleanly separates 2 from 1.
        results.push_back({"small_strain_limit", worst_order >= 1.95,
                           "observed order " + fmt(worst_order)});
    }

    // Analytic directional derivatives vs central differences.
    {
        std::mt19937_64 rng(seed + 17);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Mat2 g, hdir;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    g[i][j] = 0.2 * unit(rng);
                    hdir[i][j] = unit(rng);
                }
            const double p = 0.3 * unit(rng);
            const double dp = unit(rng);
            const KinematicPoint kp = KinematicPoint::from_grad_u(g);
            const StressDerivatives sd =
                directional_derivatives(kp, p, par.mu, par.k, model, hdir, dp);

            auto at = [&](double s) {
                const Mat2 gs = g + s * hdir;
                const double ps = p + s * dp;
                const KinematicPoint kps = KinematicPoint::from_grad_u(gs);
                return std::make_tuple(
                    total_stresses(kps, svk_stress(kps.E, par.mu, model), ps).pi,
                    pullback_permeability(kps, par.k), kps.J);
            };
            const auto [pip, kplus, jp] = at(kFdStep);
            const auto [pim, kminus, jm] = at(-kFdStep);
            const Mat2 fd_pi = (1.0 / (2.0 * kFdStep)) * (pip - pim);
            const Mat2 fd_k = (1.0 / (2.0 * kFdStep)) * (kplus - kminus);
            const double fd_j = (jp - jm) / (2.0 * kFdStep);
            worst = std::max(worst, frobenius_norm(sd.dPi - fd_pi) /
                                        std::max(frobenius_norm(sd.dPi), 1e-12));
            worst = std::max(worst, frobenius_norm(sd.dK - fd_k) /
                                        std::max(frobenius_norm(sd.dK), 1e-12));
            worst = std::max(worst,
                             std::abs(sd.dJ - fd_j) / std::max(std::abs(sd.dJ), 1e-12));
        }
        results.push_back({"directional_derivatives_fd", worst <= 1e-6,
                           "max relative error " + fmt(worst)});
    }
    return results;
}

std::vector<CheckResult> verify_consistency() {
    const MaterialParams par = [] {
        MaterialParams p;
        return p;
    }();
    const NonlinearityModel model = nonlinearity_case(1);
    const ManufacturedSolution exact{par.k};
    const ManufacturedForcing mf{exact, par, model};

    std::vector<double> lh, lr;
    for (const int n : {4, 8, 16}) {
        Discretization disc(unit_square_mesh(n));
        const double h = 1.0 / n;
        const double tau = h;
        const double tn = 0.5;

        ProblemDef def;
        def.regime = Regime::Small;
        def.params = par;
        def.model = model;
        def.f_mech = [&mf](const Vec2 &x, double t) { return mf.f_mech(x, t); };
        def.source = [&mf](const Vec2 &x, double t) { return mf.source(x, t); };

        auto interpolate = [&](double t) {
            DiscreteState s = disc.zero_state();
            s.t = t;
            s.u = interpolate_p1(disc.mesh(), [&](const Vec2 &x) { return exact.u(x, t); });
            s.q = interpolate_rt0(disc.mesh(), [&](const Vec2 &x) { return exact.q(x, t); });
            s.p = interpolate_p0(disc.space(), disc.quad(),
                                 [&](const Vec2 &x) { return exact.p(x, t); });
            return s;
        };
        const DiscreteState state = interpolate(tn);
        const DiscreteState prev = interpolate(tn - tau);
        const DirichletBC bc = boundary_zero(disc.mesh());
        const Residuals r = assemble_residuals(disc, def, bc, state, prev, tau);
        const ResidualNorms rn = residual_norms(disc, r);
        lh.push_back(std::log(h));
        lr.push_back(std::log(rn.total()));
    }
    const double order = lstsq_slope(lh, lr);
    return {{"manufactured_consistency", order >= 1.0, "observed order " + fmt(order)}};
}

}  // namespace porofem
