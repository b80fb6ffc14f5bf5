#include "porofem/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace porofem {

void MaterialParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
    if (!(k > 0.0)) throw std::invalid_argument("mobility k must be positive");
    if (!(c_p >= 0.0)) throw std::invalid_argument("c_p must be non-negative");
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("phi must be in (0, 1)");
}

void NonlinearityModel::estimate_constants(int samples) {
    auto scan = [samples](const std::function<double(double)> &df, double lo, double hi,
                          double &inf_d, double &sup_abs_d, double &lip_d) {
        inf_d = std::numeric_limits<double>::infinity();
        sup_abs_d = 0.0;
        lip_d = 0.0;
        double prev = 0.0;
        const double step = (hi - lo) / (samples - 1);
        for (int i = 0; i < samples; ++i) {
            const double x = lo + step * i;
            const double d = df(x);
            inf_d = std::min(inf_d, d);
            sup_abs_d = std::max(sup_abs_d, std::abs(d));
            if (i > 0) lip_d = std::max(lip_d, std::abs(d - prev) / step);
            prev = d;
        }
    };
    scan(db, p_lo, p_hi, alpha_b, lipschitz_func_b, lipschitz_b);
    scan(dc, xi_lo, xi_hi, alpha_c, lipschitz_func_c, lipschitz_c);
}

NonlinearityModel nonlinearity_case(int case_id) {
    if (case_id < 1 || case_id > 4)
        throw std::invalid_argument("nonlinearity case must be in 1..4");
    NonlinearityModel m;
    m.name = "case" + std::to_string(case_id);
    m.p_lo = 0.0;
    m.p_hi = 1.0 / 16.0;
    m.xi_lo = -0.25;
    m.xi_hi = 0.25;

    const auto expb = [](double p) { return std::exp(p); };
    switch (case_id) {
        case 1:
            m.b = expb;
            m.db = expb;
            m.c = [](double xi) { return xi * xi * xi + xi; };
            m.dc = [](double xi) { return 3.0 * xi * xi + 1.0; };
            break;
        case 2:
            m.b = expb;
            m.db = expb;
            m.c = [](double xi) { return xi * xi * xi; };
            m.dc = [](double xi) { return 3.0 * xi * xi; };
            break;
        case 3:
            // Odd real extension of the 5/3 root term so negative dilations
            // are admissible; the derivative is Hoelder (not Lipschitz) at 0.
            m.b = expb;
            m.db = expb;
            m.c = [](double xi) { return std::copysign(std::pow(std::abs(xi), 5.0 / 3.0), xi) + xi; };
            m.dc = [](double xi) { return (5.0 / 3.0) * std::pow(std::abs(xi), 2.0 / 3.0) + 1.0; };
            m.holder_derivative = true;
            break;
        case 4:
            m.b = [](double p) { return p * p; };
            m.db = [](double p) { return 2.0 * p; };
            m.c = [](double xi) { return xi * xi; };
            m.dc = [](double xi) { return 2.0 * xi; };
            break;
    }
    m.estimate_constants();
    return m;
}

NonlinearityModel linear_model(double b1, double c1) {
    NonlinearityModel m;
    m.name = "linear";
    m.p_lo = -1.0;
    m.p_hi = 1.0;
    m.xi_lo = -1.0;
    m.xi_hi = 1.0;
    m.b = [b1](double p) { return b1 * p; };
    m.db = [b1](double) { return b1; };
    m.c = [c1](double xi) { return c1 * xi; };
    m.dc = [c1](double) { return c1; };
    m.estimate_constants();
    return m;
}

namespace {
// p = t a(x) b(y) with a = x - x^2, b = y - y^2.
inline double fa(double x) { return x * (1.0 - x); }
inline double dfa(double x) { return 1.0 - 2.0 * x; }
constexpr double d2fa = -2.0;
}  // namespace

double ManufacturedSolution::p(const Vec2 &x, double t) const { return t * fa(x.x) * fa(x.y); }

Vec2 ManufacturedSolution::grad_p(const Vec2 &x, double t) const {
    return {t * dfa(x.x) * fa(x.y), t * fa(x.x) * dfa(x.y)};
}

Vec2 ManufacturedSolution::u(const Vec2 &x, double t) const {
    const double g = t * fa(x.x) * fa(x.y);
    return {g, g};
}

Mat2 ManufacturedSolution::grad_u(const Vec2 &x, double t) const {
    const double gx = t * dfa(x.x) * fa(x.y);
    const double gy = t * fa(x.x) * dfa(x.y);
    return {{{{gx, gy}, {gx, gy}}}};
}

double ManufacturedSolution::dp_dt(const Vec2 &x) const { return fa(x.x) * fa(x.y); }

double ManufacturedSolution::div_u_dt(const Vec2 &x) const {
    return dfa(x.x) * fa(x.y) + fa(x.x) * dfa(x.y);
}

double ManufacturedSolution::div_u(const Vec2 &x, double t) const { return t * div_u_dt(x); }

double ManufacturedSolution::div_q(const Vec2 &x, double t) const {
    // -k lap p
    return -k * t * (d2fa * fa(x.y) + fa(x.x) * d2fa);
}

Vec2 ManufacturedSolution::div_eps(const Vec2 &x, double t) const {
    // rows of div sym(grad u) for u1 = u2 = g
    const double gxx = t * d2fa * fa(x.y);
    const double gyy = t * fa(x.x) * d2fa;
    const double gxy = t * dfa(x.x) * dfa(x.y);
    return {gxx + 0.5 * (gyy + gxy), 0.5 * (gxy + gxx) + gyy};
}

Vec2 ManufacturedSolution::grad_div_u(const Vec2 &x, double t) const {
    const double gxx = t * d2fa * fa(x.y);
    const double gyy = t * fa(x.x) * d2fa;
    const double gxy = t * dfa(x.x) * dfa(x.y);
    return {gxx + gxy, gxy + gyy};
}

Vec2 ManufacturedForcing::f_mech(const Vec2 &x, double t) const {
    // -div sigma = -2 mu div eps(u) - c'(div u) grad(div u) + alpha grad p
    const Vec2 de = exact.div_eps(x, t);
    const Vec2 gdiv = exact.grad_div_u(x, t);
    const double dc = model.dc(exact.div_u(x, t));
    const Vec2 gp = exact.grad_p(x, t);
    return -2.0 * params.mu * de - dc * gdiv + params.alpha * gp;
}

double ManufacturedForcing::source(const Vec2 &x, double t) const {
    return model.db(exact.p(x, t)) * exact.dp_dt(x) + params.alpha * exact.div_u_dt(x) +
           exact.div_q(x, t);
}

}  // namespace porofem
