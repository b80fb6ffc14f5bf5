#include "porofem/assembly.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "porofem/errors.hpp"

namespace porofem {

namespace {

// Everything assembly needs about one cell.
struct CellRef {
    int k = 0;
    std::array<int, 3> vids{};
    std::array<int, 3> edges{};
    double area = 0.0;
    const P1Basis *p1 = nullptr;
    const RT0Basis *rt0 = nullptr;
};

CellRef cell_ref(const Discretization &disc, int k) {
    CellRef c;
    c.k = k;
    const Mesh &mesh = disc.mesh();
    c.vids = mesh.cell(k);
    for (int i = 0; i < 3; ++i) c.edges[i] = mesh.cell_edge(k, i);
    c.area = mesh.cell_area(k);
    c.p1 = &disc.space().p1(k);
    c.rt0 = &disc.space().rt0(k);
    return c;
}

Mat2 cell_grad_u(const CellRef &c, std::span<const double> u) {
    Mat2 g;
    for (int a = 0; a < 3; ++a) {
        const Vec2 gl = c.p1->grad[a];
        for (int comp = 0; comp < 2; ++comp) {
            const double coeff = u[2 * c.vids[a] + comp];
            g[comp][0] += coeff * gl.x;
            g[comp][1] += coeff * gl.y;
        }
    }
    return g;
}

Vec2 cell_flux_value(const CellRef &c, std::span<const double> q, const Vec2 &x) {
    Vec2 v{};
    for (int i = 0; i < 3; ++i) v += q[c.edges[i]] * c.rt0->value(i, x);
    return v;
}

// Per-cell material state, small or large regime.
struct PointState {
    Mat2 grad_u;
    double xi = 0.0;  // div u
    double p = 0.0;
    // Large regime only:
    KinematicPoint kp;
    Mat2 K;     // pulled-back mobility
    Mat2 Kinv;
};

PointState eval_point(const ProblemDef &def, const CellRef &c, const DiscreteState &state) {
    PointState ps;
    ps.grad_u = cell_grad_u(c, state.u);
    ps.xi = trace(ps.grad_u);
    ps.p = state.p[c.k];
    if (def.regime == Regime::Large) {
        const Mat2 F = deformation_gradient(ps.grad_u);
        const double J = det(F);
        if (!(J > kAdmissibleJ)) throw ElementInversionError(c.k, J);
        ps.kp = KinematicPoint::from_grad_u(ps.grad_u);
        ps.K = pullback_permeability(ps.kp, def.params.k);
        ps.Kinv = inverse(ps.K);
    } else {
        ps.K = Mat2::diag(def.params.k, def.params.k);
        ps.Kinv = Mat2::diag(1.0 / def.params.k, 1.0 / def.params.k);
    }
    return ps;
}

Vec2 body_force(const ProblemDef &def, const Vec2 &x, double t) {
    if (def.f_mech) return def.f_mech(x, t);
    return def.params.rho_b * def.params.gravity;
}

double source_term(const ProblemDef &def, const Vec2 &x, double t) {
    return def.source ? def.source(x, t) : 0.0;
}

void check_inputs(const Discretization &disc, const DiscreteState &state,
                  const DiscreteState &prev, double tau) {
    const DofLayout &l = disc.layout();
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (static_cast<int>(state.u.size()) != l.nu || static_cast<int>(state.q.size()) != l.nq ||
        static_cast<int>(state.p.size()) != l.np)
        throw std::invalid_argument("state does not match the space dimensions");
    if (static_cast<int>(prev.u.size()) != l.nu || static_cast<int>(prev.q.size()) != l.nq ||
        static_cast<int>(prev.p.size()) != l.np)
        throw std::invalid_argument("previous state does not match the space dimensions");
}

// First Piola-Kirchhoff stress of the current point (large regime).
Mat2 first_pk_stress(const ProblemDef &def, const PointState &ps) {
    const Mat2 sig_eff = svk_stress(ps.kp.E, def.params.mu, def.model);
    return total_stresses(ps.kp, sig_eff, ps.p).pi;
}

// Small-regime total stress sigma = 2 mu eps + c(div u) I - alpha p I.
Mat2 small_stress(const ProblemDef &def, const PointState &ps) {
    return 2.0 * def.params.mu * sym(ps.grad_u) +
           (def.model.c(ps.xi) - def.params.alpha * ps.p) * Mat2::identity();
}

}  // namespace

Discretization::Discretization(Mesh mesh, int quad_order)
    : mesh_(std::make_shared<Mesh>(std::move(mesh))),
      space_(*mesh_),
      quad_(quadrature(quad_order)) {
    layout_.nu = space_.ndof_u();
    layout_.nq = space_.ndof_q();
    layout_.np = space_.ndof_p();

    std::vector<Triplet> tu, tq;
    mass_p_.resize(layout_.np);
    for (int k = 0; k < mesh_->num_cells(); ++k) {
        const CellRef c = cell_ref(*this, k);
        mass_p_[k] = c.area;
        // P1 scalar mass (A/6 diagonal, A/12 off-diagonal), one copy per component.
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const double v = (a == b ? c.area / 6.0 : c.area / 12.0);
                for (int comp = 0; comp < 2; ++comp)
                    tu.push_back({2 * c.vids[a] + comp, 2 * c.vids[b] + comp, v});
            }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double v = 0.0;
                for (int qp = 0; qp < quad_.size(); ++qp) {
                    const Vec2 x = space_.point(k, quad_.points[qp]);
                    v += 2.0 * c.area * quad_.weights[qp] *
                         dot(c.rt0->value(i, x), c.rt0->value(j, x));
                }
                tq.push_back({c.edges[i], c.edges[j], v});
            }
    }
    mass_u_ = SparseMatrix::from_triplets(layout_.nu, std::move(tu));
    mass_q_ = SparseMatrix::from_triplets(layout_.nq, std::move(tq));
    mass_u_fact_ = std::make_unique<Factorization>(mass_u_);
    mass_q_fact_ = std::make_unique<Factorization>(mass_q_);
}

DiscreteState Discretization::zero_state() const {
    DiscreteState s;
    s.u.assign(layout_.nu, 0.0);
    s.q.assign(layout_.nq, 0.0);
    s.p.assign(layout_.np, 0.0);
    return s;
}

namespace {
double quadratic_form(const SparseMatrix &m, std::span<const double> x) {
    const std::vector<double> mx = m.multiply(x);
    return std::inner_product(mx.begin(), mx.end(), x.begin(), 0.0);
}
}  // namespace

double Discretization::norm_u(std::span<const double> u) const {
    return std::sqrt(std::max(0.0, quadratic_form(mass_u_, u)));
}
double Discretization::norm_q(std::span<const double> q) const {
    return std::sqrt(std::max(0.0, quadratic_form(mass_q_, q)));
}
double Discretization::norm_p(std::span<const double> p) const {
    double s = 0.0;
    for (int k = 0; k < layout_.np; ++k) s += mass_p_[k] * p[k] * p[k];
    return std::sqrt(s);
}

double Discretization::repr_norm_u(std::span<const double> f) const {
    const std::vector<double> r = mass_u_fact_->solve(f);
    return std::sqrt(std::max(0.0, std::inner_product(r.begin(), r.end(), f.begin(), 0.0)));
}
double Discretization::repr_norm_q(std::span<const double> f) const {
    const std::vector<double> r = mass_q_fact_->solve(f);
    return std::sqrt(std::max(0.0, std::inner_product(r.begin(), r.end(), f.begin(), 0.0)));
}
double Discretization::repr_norm_p(std::span<const double> f) const {
    double s = 0.0;
    for (int k = 0; k < layout_.np; ++k) s += f[k] * f[k] / mass_p_[k];
    return std::sqrt(s);
}

Residuals assemble_residuals(const Discretization &disc, const ProblemDef &def,
                             const DirichletBC &bc, const DiscreteState &state,
                             const DiscreteState &prev, double tau) {
    check_inputs(disc, state, prev, tau);
    const DofLayout &l = disc.layout();
    const QuadratureRule &quad = disc.quad();
    Residuals r;
    r.mech.assign(l.nu, 0.0);
    r.darcy.assign(l.nq, 0.0);
    r.mass.assign(l.np, 0.0);
    const double t = state.t;

    for (int k = 0; k < disc.mesh().num_cells(); ++k) {
        const CellRef c = cell_ref(disc, k);
        const PointState ps = eval_point(def, c, state);
        const Mat2 grad_u_prev = cell_grad_u(c, prev.u);

        // Mechanics rows: (stress, grad v) - (body, v).
        const Mat2 stress = def.regime == Regime::Large ? first_pk_stress(def, ps)
                                                        : small_stress(def, ps);
        for (int a = 0; a < 3; ++a) {
            const Vec2 sg = stress * c.p1->grad[a];
            for (int comp = 0; comp < 2; ++comp)
                r.mech[2 * c.vids[a] + comp] += c.area * sg[comp];
        }
        for (int qp = 0; qp < quad.size(); ++qp) {
            const auto &bary = quad.points[qp];
            const Vec2 x = disc.space().point(k, bary);
            const Vec2 f = body_force(def, x, t);
            const double w = 2.0 * c.area * quad.weights[qp];
            for (int a = 0; a < 3; ++a)
                for (int comp = 0; comp < 2; ++comp)
                    r.mech[2 * c.vids[a] + comp] -= w * f[comp] * bary[a];
        }

        // Darcy rows: (K^-1 q, z) - (p, div z) - rho_f (Upsilon, z).
        const Vec2 upsilon = def.regime == Regime::Large
                                 ? gravity_pullback(ps.kp.F, def.params.gravity)
                                 : def.params.gravity;
        for (int qp = 0; qp < quad.size(); ++qp) {
            const Vec2 x = disc.space().point(k, quad.points[qp]);
            const double w = 2.0 * c.area * quad.weights[qp];
            const Vec2 kinv_q = ps.Kinv * cell_flux_value(c, state.q, x);
            for (int i = 0; i < 3; ++i) {
                const Vec2 zi = c.rt0->value(i, x);
                r.darcy[c.edges[i]] += w * (dot(kinv_q, zi) - def.params.rho_f * dot(upsilon, zi));
            }
        }
        for (int i = 0; i < 3; ++i)
            r.darcy[c.edges[i]] -= ps.p * disc.mesh().cell_edge_sign(k, i);

        // Mass row: content increment + tau div q - tau S_f.
        double content = 0.0;
        if (def.regime == Regime::Large) {
            const double j_prev = det(deformation_gradient(grad_u_prev));
            const ContentRateCoeffs cc = fluid_content_rate_coeffs(ps.kp, def.params);
            content = cc.dp_coeff * (ps.p - prev.p[k]) + cc.dj_coeff * (ps.kp.J - j_prev);
        } else {
            content = def.model.b(ps.p) - def.model.b(prev.p[k]) +
                      def.params.alpha * (ps.xi - trace(grad_u_prev));
        }
        double div_flux = 0.0;
        for (int i = 0; i < 3; ++i) div_flux += disc.mesh().cell_edge_sign(k, i) * state.q[c.edges[i]];
        double src = 0.0;
        for (int qp = 0; qp < quad.size(); ++qp) {
            const Vec2 x = disc.space().point(k, quad.points[qp]);
            src += 2.0 * c.area * quad.weights[qp] * source_term(def, x, t);
        }
        r.mass[k] += content * c.area + tau * div_flux - tau * src;
    }

    // Identity-constraint rows at prescribed displacement DOFs.
    for (int d = 0; d < l.nu; ++d)
        if (bc.constrained[d]) r.mech[d] = state.u[d] - bc.values[d];
    return r;
}

ResidualNorms residual_norms(const Discretization &disc, const Residuals &r) {
    return {disc.repr_norm_u(r.mech), disc.repr_norm_q(r.darcy), disc.repr_norm_p(r.mass)};
}

namespace {

struct SystemAccumulator {
    std::vector<Triplet> trips;
    const DofLayout *l;
    const DirichletBC *bc;  // null = no displacement constraints in this system

    void add_uu(int row, int col, double v) {
        if (bc && bc->constrained[row]) return;
        trips.push_back({row, col, v});
    }
    void add_up(int row, int col, double v) { add_uu(row, l->p_offset() + col, v); }
    void add_qq(int row, int col, double v) {
        trips.push_back({l->q_offset() + row, l->q_offset() + col, v});
    }
    void add_qu(int row, int col, double v) { trips.push_back({l->q_offset() + row, col, v}); }
    void add_qp(int row, int col, double v) {
        trips.push_back({l->q_offset() + row, l->p_offset() + col, v});
    }
    void add_pp(int row, int col, double v) {
        trips.push_back({l->p_offset() + row, l->p_offset() + col, v});
    }
    void add_pu(int row, int col, double v) { trips.push_back({l->p_offset() + row, col, v}); }
    void add_pq(int row, int col, double v) {
        trips.push_back({l->p_offset() + row, l->q_offset() + col, v});
    }
};

// Shared saddle pairing: (q,p) block -(p, div z), (p,q) block tau (div q, w).
void add_div_pairings(SystemAccumulator &acc, const Discretization &disc, const CellRef &c,
                      double tau) {
    for (int i = 0; i < 3; ++i) {
        const double sgn = disc.mesh().cell_edge_sign(c.k, i);
        acc.add_qp(c.edges[i], c.k, -sgn);
        acc.add_pq(c.k, c.edges[i], tau * sgn);
    }
}

// (K^-1 dq, z) mass-like Darcy block.
void add_darcy_mass(SystemAccumulator &acc, const Discretization &disc, const CellRef &c,
                    const Mat2 &kinv) {
    const QuadratureRule &quad = disc.quad();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = 0.0;
            for (int qp = 0; qp < quad.size(); ++qp) {
                const Vec2 x = disc.space().point(c.k, quad.points[qp]);
                v += 2.0 * c.area * quad.weights[qp] *
                     dot(kinv * c.rt0->value(j, x), c.rt0->value(i, x));
            }
            acc.add_qq(c.edges[i], c.edges[j], v);
        }
}

}  // namespace

std::vector<double> stacked_negated_residuals(const Residuals &r, const DofLayout &l) {
    std::vector<double> rhs(l.total());
    for (int i = 0; i < l.nu; ++i) rhs[i] = -r.mech[i];
    for (int i = 0; i < l.nq; ++i) rhs[l.q_offset() + i] = -r.darcy[i];
    for (int i = 0; i < l.np; ++i) rhs[l.p_offset() + i] = -r.mass[i];
    return rhs;
}

BlockSystem newton_system(const Discretization &disc, const ProblemDef &def,
                          const DirichletBC &bc, const DiscreteState &state,
                          const DiscreteState &prev, double tau) {
    return detail::newton_system_ordered(disc, def, bc, state, prev, tau, {});
}

namespace detail {

BlockSystem newton_system_ordered(const Discretization &disc, const ProblemDef &def,
                                  const DirichletBC &bc, const DiscreteState &state,
                                  const DiscreteState &prev, double tau,
                                  std::span<const int> cell_order) {
    check_inputs(disc, state, prev, tau);
    const DofLayout &l = disc.layout();
    const QuadratureRule &quad = disc.quad();
    SystemAccumulator acc;
    acc.l = &l;
    acc.bc = &bc;

    std::vector<int> natural;
    if (cell_order.empty()) {
        natural.resize(disc.mesh().num_cells());
        std::iota(natural.begin(), natural.end(), 0);
        cell_order = natural;
    }

    for (const int k : cell_order) {
        const CellRef c = cell_ref(disc, k);
        const PointState ps = eval_point(def, c, state);

        if (def.regime == Regime::Small) {
            const double dc = def.model.dc(ps.xi);
            const double db = def.model.db(ps.p);
            for (int a = 0; a < 3; ++a)
                for (int ca = 0; ca < 2; ++ca) {
                    const int row = 2 * c.vids[a] + ca;
                    Mat2 eps_a{};
                    eps_a[ca][0] = c.p1->grad[a].x;
                    eps_a[ca][1] = c.p1->grad[a].y;
                    eps_a = sym(eps_a);
                    for (int b = 0; b < 3; ++b)
                        for (int cb = 0; cb < 2; ++cb) {
                            Mat2 eps_b{};
                            eps_b[cb][0] = c.p1->grad[b].x;
                            eps_b[cb][1] = c.p1->grad[b].y;
                            eps_b = sym(eps_b);
                            const double v =
                                c.area * (2.0 * def.params.mu * ddot(eps_b, eps_a) +
                                          dc * c.p1->grad[b][cb] * c.p1->grad[a][ca]);
                            acc.add_uu(row, 2 * c.vids[b] + cb, v);
                        }
                    acc.add_up(row, c.k, -def.params.alpha * c.area * c.p1->grad[a][ca]);
                    // Mass-row coupling alpha (div du, w).
                    acc.add_pu(c.k, row, def.params.alpha * c.area * c.p1->grad[a][ca]);
                }
            acc.add_pp(c.k, c.k, db * c.area);
            add_darcy_mass(acc, disc, c, ps.Kinv);
        } else {
            const Mat2 FiT = transpose(ps.kp.Finv);
            const ContentRateCoeffs cc = fluid_content_rate_coeffs(ps.kp, def.params);
            const double content_du = def.params.c_p * def.params.phi * (ps.p - prev.p[k]) +
                                      cc.dj_coeff;  // multiplies dJ
            for (int b = 0; b < 3; ++b)
                for (int cb = 0; cb < 2; ++cb) {
                    Mat2 h{};
                    h[cb][0] = c.p1->grad[b].x;
                    h[cb][1] = c.p1->grad[b].y;
                    const StressDerivatives sd = directional_derivatives(
                        ps.kp, ps.p, def.params.mu, def.params.k, def.model, h, 0.0);
                    const int col = 2 * c.vids[b] + cb;
                    for (int a = 0; a < 3; ++a) {
                        const Vec2 dpig = sd.dPi * c.p1->grad[a];
                        for (int ca = 0; ca < 2; ++ca)
                            acc.add_uu(2 * c.vids[a] + ca, col, c.area * dpig[ca]);
                    }
                    // Darcy coupling through K(u) and the gravity pull-back.
                    const Mat2 dkinv = -1.0 * (ps.Kinv * sd.dK * ps.Kinv);
                    for (int qp = 0; qp < quad.size(); ++qp) {
                        const Vec2 x = disc.space().point(k, quad.points[qp]);
                        const double w = 2.0 * c.area * quad.weights[qp];
                        const Vec2 dk_q = dkinv * cell_flux_value(c, state.q, x);
                        const Vec2 dups = def.params.rho_f *
                                          (c.p1->grad[b] * def.params.gravity[cb]);
                        for (int i = 0; i < 3; ++i) {
                            const Vec2 zi = c.rt0->value(i, x);
                            acc.add_qu(c.edges[i], col, w * (dot(dk_q, zi) - dot(dups, zi)));
                        }
                    }
                    // Mass-row coupling through dJ.
                    acc.add_pu(c.k, col,
                               c.area * content_du * ps.kp.J * (FiT * c.p1->grad[b])[cb]);
                }
            // Mechanics-pressure coupling dPi/dp = -J F^-T.
            for (int a = 0; a < 3; ++a) {
                const Vec2 g = FiT * c.p1->grad[a];
                for (int ca = 0; ca < 2; ++ca)
                    acc.add_up(2 * c.vids[a] + ca, c.k, -c.area * ps.kp.J * g[ca]);
            }
            acc.add_pp(c.k, c.k, cc.dp_coeff * c.area);
            add_darcy_mass(acc, disc, c, ps.Kinv);
        }
        add_div_pairings(acc, disc, c, tau);
    }

    for (int d = 0; d < l.nu; ++d)
        if (bc.constrained[d]) acc.trips.push_back({d, d, 1.0});

    BlockSystem sys;
    sys.layout = l;
    sys.matrix = SparseMatrix::from_triplets(l.total(), std::move(acc.trips));
    sys.rhs = stacked_negated_residuals(assemble_residuals(disc, def, bc, state, prev, tau), l);
    return sys;
}

}  // namespace detail

BlockSystem lscheme_system(const Discretization &disc, const ProblemDef &def,
                           const DirichletBC &bc, const DiscreteState &state,
                           const DiscreteState &prev, double tau, const LSchemeParams &lp) {
    check_inputs(disc, state, prev, tau);
    if (!(lp.Lp > 0.0)) throw std::invalid_argument("L-scheme requires positive Lp");
    const DofLayout &l = disc.layout();
    const QuadratureRule &quad = disc.quad();
    SystemAccumulator acc;
    acc.l = &l;
    acc.bc = &bc;

    for (int k = 0; k < disc.mesh().num_cells(); ++k) {
        const CellRef c = cell_ref(disc, k);
        const PointState ps = eval_point(def, c, state);

        for (int a = 0; a < 3; ++a)
            for (int ca = 0; ca < 2; ++ca) {
                const int row = 2 * c.vids[a] + ca;
                for (int b = 0; b < 3; ++b)
                    for (int cb = 0; cb < 2; ++cb) {
                        Mat2 h{};
                        h[cb][0] = c.p1->grad[b].x;
                        h[cb][1] = c.p1->grad[b].y;
                        const Vec2 img = lp.tensor_Lu.apply(h) * c.p1->grad[a];
                        acc.add_uu(row, 2 * c.vids[b] + cb, c.area * img[ca]);
                    }
                const Vec2 lpg = lp.tensor_Lp * c.p1->grad[a];
                acc.add_up(row, c.k, c.area * lpg[ca]);
                acc.add_pu(c.k, row, lp.Lu * c.area * c.p1->grad[a][ca]);
            }

        // Darcy rows: (K(u^{i-1})^-1 dq, z) - (dp, div z) + (Lq du, z).
        add_darcy_mass(acc, disc, c, ps.Kinv);
        for (int qp = 0; qp < quad.size(); ++qp) {
            const auto &bary = quad.points[qp];
            const Vec2 x = disc.space().point(k, bary);
            const double w = 2.0 * c.area * quad.weights[qp];
            for (int i = 0; i < 3; ++i) {
                const Vec2 kz = transpose(lp.tensor_Lq) * c.rt0->value(i, x);
                for (int b = 0; b < 3; ++b)
                    for (int cb = 0; cb < 2; ++cb)
                        acc.add_qu(c.edges[i], 2 * c.vids[b] + cb,
                                   w * bary[b] * (cb == 0 ? kz.x : kz.y));
            }
        }
        acc.add_pp(c.k, c.k, lp.Lp * c.area);
        add_div_pairings(acc, disc, c, tau);
    }

    for (int d = 0; d < l.nu; ++d)
        if (bc.constrained[d]) acc.trips.push_back({d, d, 1.0});

    BlockSystem sys;
    sys.layout = l;
    sys.matrix = SparseMatrix::from_triplets(l.total(), std::move(acc.trips));
    sys.rhs = stacked_negated_residuals(assemble_residuals(disc, def, bc, state, prev, tau), l);
    return sys;
}

FlowSystem splitting_flow_system(const Discretization &disc, const ProblemDef &def,
                                 const DiscreteState &state, const DiscreteState &prev,
                                 double tau, FlowLinearization lin, double Lp) {
    check_inputs(disc, state, prev, tau);
    if (lin == FlowLinearization::ConstantLp && !(Lp > 0.0))
        throw std::invalid_argument("splitting L-scheme requires positive Lp");
    const DofLayout &full = disc.layout();
    DofLayout l;  // (q, p) only: treat q as the "u-free" leading block
    l.nu = 0;
    l.nq = full.nq;
    l.np = full.np;
    SystemAccumulator acc;
    acc.l = &l;
    acc.bc = nullptr;

    for (int k = 0; k < disc.mesh().num_cells(); ++k) {
        const CellRef c = cell_ref(disc, k);
        const PointState ps = eval_point(def, c, state);
        add_darcy_mass(acc, disc, c, ps.Kinv);
        double dpp;
        if (lin == FlowLinearization::ConstantLp) {
            dpp = Lp;
        } else if (def.regime == Regime::Large) {
            dpp = fluid_content_rate_coeffs(ps.kp, def.params).dp_coeff;
        } else {
            dpp = def.model.db(ps.p);
        }
        acc.add_pp(c.k, c.k, dpp * c.area);
        add_div_pairings(acc, disc, c, tau);
    }

    // Residual right-hand side with displacement frozen at state.u (its
    // coupling contribution sits inside F_mass already).
    DirichletBC none;
    none.constrained.assign(full.nu, 0);
    none.values.assign(full.nu, 0.0);
    const Residuals r = assemble_residuals(disc, def, none, state, prev, tau);

    FlowSystem sys;
    sys.nq = l.nq;
    sys.np = l.np;
    sys.matrix = SparseMatrix::from_triplets(l.nq + l.np, std::move(acc.trips));
    sys.rhs.resize(l.nq + l.np);
    for (int i = 0; i < l.nq; ++i) sys.rhs[i] = -r.darcy[i];
    for (int i = 0; i < l.np; ++i) sys.rhs[l.nq + i] = -r.mass[i];
    return sys;
}

MechSystem splitting_mech_system(const Discretization &disc, const ProblemDef &def,
                                 const DirichletBC &bc, const DiscreteState &state,
                                 double tau, double Ls, MechLinearization lin,
                                 const Tensor4 *frozen_tangent) {
    if (Ls < 0.0) throw std::invalid_argument("stabilization Ls must be non-negative");
    if (lin == MechLinearization::ConstantTensor && frozen_tangent == nullptr)
        throw std::invalid_argument("frozen tangent required for the constant-tensor variant");
    const DofLayout &full = disc.layout();
    std::vector<Triplet> trips;

    for (int k = 0; k < disc.mesh().num_cells(); ++k) {
        const CellRef c = cell_ref(disc, k);
        const PointState ps = eval_point(def, c, state);
        for (int b = 0; b < 3; ++b)
            for (int cb = 0; cb < 2; ++cb) {
                Mat2 h{};
                h[cb][0] = c.p1->grad[b].x;
                h[cb][1] = c.p1->grad[b].y;
                Mat2 img;
                if (lin == MechLinearization::ConstantTensor) {
                    img = frozen_tangent->apply(h);
                } else if (def.regime == Regime::Large) {
                    img = directional_derivatives(ps.kp, ps.p, def.params.mu, def.params.k,
                                                  def.model, h, 0.0)
                              .dPi;
                } else {
                    img = 2.0 * def.params.mu * sym(h) +
                          def.model.dc(ps.xi) * trace(h) * Mat2::identity();
                }
                const int col = 2 * c.vids[b] + cb;
                for (int a = 0; a < 3; ++a) {
                    const Vec2 ig = img * c.p1->grad[a];
                    for (int ca = 0; ca < 2; ++ca) {
                        const int row = 2 * c.vids[a] + ca;
                        if (bc.constrained[row]) continue;
                        double v = c.area * ig[ca];
                        // Stabilization Ls (div du, div v).
                        v += Ls * c.area * c.p1->grad[b][cb] * c.p1->grad[a][ca];
                        trips.push_back({row, col, v});
                    }
                }
            }
    }
    for (int d = 0; d < full.nu; ++d)
        if (bc.constrained[d]) trips.push_back({d, d, 1.0});

    // Mechanics residual at (state.u, state.p); the flow variables do not
    // enter F_mech, so reuse the full residual assembly with prev = state.
    const Residuals r = assemble_residuals(disc, def, bc, state, state, tau);

    MechSystem sys;
    sys.matrix = SparseMatrix::from_triplets(full.nu, std::move(trips));
    sys.rhs.resize(full.nu);
    for (int i = 0; i < full.nu; ++i) sys.rhs[i] = -r.mech[i];
    return sys;
}

void apply_bc(DiscreteState &state, const DirichletBC &bc) {
    for (size_t d = 0; d < state.u.size(); ++d)
        if (bc.constrained[d]) state.u[d] = bc.values[d];
}

void add_increment(DiscreteState &state, const DofLayout &layout, std::span<const double> delta) {
    for (int i = 0; i < layout.nu; ++i) state.u[i] += delta[i];
    for (int i = 0; i < layout.nq; ++i) state.q[i] += delta[layout.q_offset() + i];
    for (int i = 0; i < layout.np; ++i) state.p[i] += delta[layout.p_offset() + i];
}

IncrementNorms increment_norms(const Discretization &disc, std::span<const double> delta) {
    const DofLayout &l = disc.layout();
    IncrementNorms n;
    n.du = disc.norm_u(delta.subspan(0, l.nu));
    n.dq = disc.norm_q(delta.subspan(l.q_offset(), l.nq));
    n.dp = disc.norm_p(delta.subspan(l.p_offset(), l.np));
    return n;
}

}  // namespace porofem
