#include "porofem/bench.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace porofem {

const char *to_string(Problem p) {
    return p == Problem::TestProblem1 ? "test1" : "large2d";
}

void ExperimentSpec::validate() const {
    if (!(h > 0.0 && tau > 0.0 && T > 0.0))
        throw std::invalid_argument("h, tau and T must be positive");
    const double steps = T / tau;
    if (std::abs(steps - std::lround(steps)) > 1e-9 || std::lround(steps) < 1)
        throw std::invalid_argument("T must be a positive integer multiple of tau");
    const double n = 1.0 / h;
    if (std::abs(n - std::lround(n)) > 1e-9 || std::lround(n) < 1)
        throw std::invalid_argument("h must be 1/n for a positive integer n");
    if (problem == Problem::TestProblem1 && (case_id < 1 || case_id > 4))
        throw std::invalid_argument("case must be in 1..4");
    if (!(tol > 0.0) || max_iter < 1)
        throw std::invalid_argument("tol must be positive and max_iter >= 1");
    params.validate();
}

ExperimentSpec default_spec(Problem problem) {
    ExperimentSpec s;
    s.problem = problem;
    if (problem == Problem::LargeDeformation2D) {
        s.h = 0.125;
        s.tau = 0.125;
        // Low mobility keeps the flow-mechanics coupling stiff enough that
        // the split schemes genuinely need the stabilization term.
        s.params.k = 0.01;
    }
    return s;
}

ProblemDef make_test_problem_1(int case_id, const MaterialParams &params) {
    ProblemDef def;
    def.regime = Regime::Small;
    def.params = params;
    def.model = nonlinearity_case(case_id);
    ManufacturedForcing mf{ManufacturedSolution{params.k}, params, def.model};
    def.f_mech = [mf](const Vec2 &x, double t) { return mf.f_mech(x, t); };
    def.source = [mf](const Vec2 &x, double t) { return mf.source(x, t); };
    def.bc = nullptr;  // filled per mesh by the runner (all-boundary zero)
    return def;
}

DirichletBC zero_boundary_bc(const Mesh &mesh) {
    DirichletBC bc;
    bc.constrained.assign(2 * mesh.num_vertices(), 0);
    bc.values.assign(2 * mesh.num_vertices(), 0.0);
    for (int v : mesh.boundary_vertices()) {
        bc.constrained[2 * v] = 1;
        bc.constrained[2 * v + 1] = 1;
    }
    return bc;
}

DirichletBC rotation_bc(const Mesh &mesh, double theta) {
    DirichletBC bc;
    bc.constrained.assign(2 * mesh.num_vertices(), 0);
    bc.values.assign(2 * mesh.num_vertices(), 0.0);
    const Vec2 center{0.5, 1.0};
    const Mat2 rot = Mat2::rotation(theta);
    for (int v : mesh.boundary_vertices()) {
        const BoundaryTag tag = mesh.vertex_tag(v);
        if (tag == BoundaryTag::Top) {
            const Vec2 rel = mesh.vertex(v) - center;
            const Vec2 disp = rot * rel - rel;
            bc.constrained[2 * v] = 1;
            bc.constrained[2 * v + 1] = 1;
            bc.values[2 * v] = disp.x;
            bc.values[2 * v + 1] = disp.y;
        } else if (tag == BoundaryTag::Bottom) {
            bc.constrained[2 * v + 1] = 1;
        }
    }
    return bc;
}

ProblemDef make_large_deformation_2d(const MaterialParams &params, Regime regime) {
    ProblemDef def;
    def.regime = regime;
    def.params = params;
    if (regime == Regime::Large) {
        // Constant-coefficient constitutive pair; the mass equation runs on
        // c_p J phi and c_alpha instead of b(.).
        def.model = linear_model(1.0, 1.0);
    } else {
        // Small-deformation limit of the same data: b(p) = c_p phi p matches
        // the linearized fluid content, alpha plays the role of c_alpha.
        def.model = linear_model(params.c_p * params.phi, 1.0);
    }
    return def;
}

SchemeConfig make_scheme_config(const ExperimentSpec &spec, const ProblemDef &def) {
    SchemeConfig cfg;
    cfg.kind = spec.scheme;
    cfg.tol = spec.tol;
    cfg.max_iter = spec.max_iter;

    const NonlinearityModel &model = def.model;
    const MaterialParams &par = def.params;

    // Frozen mechanics tangent: the exact tangent at the zero initial state
    // with the volumetric coefficient raised to the Lipschitz constant of c.
    cfg.tensor_Lu = Tensor4::isotropic(2.0 * par.mu, model.lipschitz_func_c);
    if (def.regime == Regime::Large) {
        cfg.tensor_Lp = -1.0 * Mat2::identity();           // dPi/dp at F = I
        cfg.Lp = spec.Lp.value_or(par.c_p * par.phi);      // dGamma/dp at J = 1
        cfg.Lu = spec.Lu.value_or(par.c_alpha);            // dGamma/dJ
    } else {
        cfg.tensor_Lp = -par.alpha * Mat2::identity();
        cfg.Lp = spec.Lp.value_or(model.lipschitz_func_b);
        cfg.Lu = spec.Lu.value_or(par.alpha);
    }
    cfg.tensor_Lq = Mat2::zero();  // dK vanishes at grad u = 0, grad p = 0

    if (spec.scheme == SchemeKind::SplittingNewton ||
        spec.scheme == SchemeKind::SplittingLScheme) {
        if (spec.Ls) {
            cfg.Ls = *spec.Ls;
        } else if (def.regime == Regime::Large) {
            cfg.Ls = 1.0;
        } else {
            cfg.Ls = recommended_Ls(par, model).value_or(1.0);
        }
    }
    return cfg;
}

namespace {

Mesh mesh_for(double h) {
    return unit_square_mesh(static_cast<int>(std::lround(1.0 / h)));
}

void fill_errors(ReportRow &row, const Discretization &disc, const MaterialParams &params,
                 const DiscreteState &state, double T) {
    const ManufacturedSolution exact{params.k};
    const QuadratureRule &quad = disc.quad();
    double ep2 = 0.0, eu2 = 0.0;
    for (int k = 0; k < disc.mesh().num_cells(); ++k) {
        const auto cell = disc.mesh().cell(k);
        const double area = disc.mesh().cell_area(k);
        for (int qp = 0; qp < quad.size(); ++qp) {
            const auto &bary = quad.points[qp];
            const Vec2 x = disc.space().point(k, bary);
            const double w = 2.0 * area * quad.weights[qp];
            const double dp = state.p[k] - exact.p(x, T);
            Vec2 uh{};
            for (int a = 0; a < 3; ++a) {
                uh.x += bary[a] * state.u[2 * cell[a]];
                uh.y += bary[a] * state.u[2 * cell[a] + 1];
            }
            const Vec2 du = uh - exact.u(x, T);
            ep2 += w * dp * dp;
            eu2 += w * dot(du, du);
        }
    }
    row.err_p = std::sqrt(ep2);
    row.err_u = std::sqrt(eu2);
    row.has_errors = true;
}

ReportRow run_common(const ExperimentSpec &spec, ProblemDef def) {
    spec.validate();
    ReportRow row;
    row.spec = spec;

    Discretization disc(mesh_for(spec.h));
    if (spec.problem == Problem::TestProblem1) {
        def.bc = [&disc](double) { return zero_boundary_bc(disc.mesh()); };
    } else {
        const double theta_final =
            spec.paper_rotation ? std::numbers::pi / 4.0 : spec.theta_final;
        def.bc = [&disc, theta_final](double t) {
            return rotation_bc(disc.mesh(), theta_final * t);
        };
    }

    const SchemeConfig cfg = make_scheme_config(spec, def);
    row.Ls_used = cfg.Ls;
    row.Lp_used = cfg.Lp;
    row.Lu_used = cfg.Lu;

    try {
        TransientResult tr =
            run_transient(disc, def, cfg, disc.zero_state(), spec.tau, spec.T);
        row.final_history = tr.last_history().iters;
        row.status = tr.last_history().status;
        row.iters = tr.last_history().iterations();
        row.fit = fit_convergence_order(tr.last_history());
        row.failed_step = tr.failed_step;
        if (spec.problem == Problem::TestProblem1 && tr.ok())
            fill_errors(row, disc, def.params, tr.state, spec.T);
    } catch (const std::exception &) {
        row.solver_error = true;
    }
    return row;
}

}  // namespace

ReportRow run_test_problem_1(const ExperimentSpec &spec) {
    return run_common(spec, make_test_problem_1(spec.case_id, spec.params));
}

ReportRow run_large_deformation_2d(const ExperimentSpec &spec) {
    return run_common(spec, make_large_deformation_2d(spec.params));
}

ReportRow run_experiment(const ExperimentSpec &spec) {
    return spec.problem == Problem::TestProblem1 ? run_test_problem_1(spec)
                                                 : run_large_deformation_2d(spec);
}

const char *to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Tau: return "tau";
        case SweepAxis::H: return "h";
        case SweepAxis::Ls: return "L_s";
        case SweepAxis::Case: return "case";
        case SweepAxis::Scheme: return "scheme";
    }
    return "?";
}

std::optional<SweepAxis> sweep_axis_from_string(const std::string &name) {
    if (name == "tau") return SweepAxis::Tau;
    if (name == "h") return SweepAxis::H;
    if (name == "L_s" || name == "Ls" || name == "ls") return SweepAxis::Ls;
    if (name == "case") return SweepAxis::Case;
    if (name == "scheme") return SweepAxis::Scheme;
    return std::nullopt;
}

std::vector<ReportRow> sweep(const ExperimentSpec &base, SweepAxis axis,
                             const std::vector<double> &values) {
    std::vector<ReportRow> rows;
    rows.reserve(values.size());
    for (const double v : values) {
        ExperimentSpec spec = base;
        switch (axis) {
            case SweepAxis::Tau: spec.tau = v; break;
            case SweepAxis::H: spec.h = v; break;
            case SweepAxis::Ls: spec.Ls = v; break;
            case SweepAxis::Case: spec.case_id = static_cast<int>(std::lround(v)); break;
            case SweepAxis::Scheme:
                spec.scheme = static_cast<SchemeKind>(static_cast<int>(std::lround(v)));
                break;
        }
        spec.id = base.id + "_" + to_string(axis) + "=" + format_g16(v);
        try {
            rows.push_back(run_experiment(spec));
        } catch (const std::exception &) {
            ReportRow row;
            row.spec = spec;
            row.solver_error = true;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_g16(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16g", v);
    return buf;
}

namespace {

void atomic_write(const std::string &path, const std::string &content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
        os << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string status_string(const ReportRow &row) {
    if (row.solver_error) return "error";
    return to_string(row.status);
}

}  // namespace

void write_summary_csv(const std::string &path, const std::vector<ReportRow> &rows) {
    std::string out = "experiment,scheme,case,h,tau,L_s,iters,order,contraction,err_p,err_u,status\n";
    for (const ReportRow &row : rows) {
        const int case_col = row.spec.problem == Problem::TestProblem1 ? row.spec.case_id : 0;
        out += row.spec.id;
        out += ',';
        out += to_string(row.spec.scheme);
        out += ',';
        out += std::to_string(case_col);
        out += ',';
        out += format_g16(row.spec.h);
        out += ',';
        out += format_g16(row.spec.tau);
        out += ',';
        out += format_g16(row.Ls_used);
        out += ',';
        out += std::to_string(row.iters);
        out += ',';
        out += row.fit.defined ? format_g16(row.fit.order) : "nan";
        out += ',';
        out += row.fit.defined ? format_g16(row.fit.contraction) : "nan";
        out += ',';
        out += row.has_errors ? format_g16(row.err_p) : "nan";
        out += ',';
        out += row.has_errors ? format_g16(row.err_u) : "nan";
        out += ',';
        out += status_string(row);
        out += '\n';
    }
    atomic_write(path, out);
}

void write_iterations_csv(const std::string &path, const std::vector<ReportRow> &rows) {
    std::string out = "experiment,iter,delta_u,delta_q,delta_p,total\n";
    for (const ReportRow &row : rows) {
        int it = 0;
        for (const IterRecord &rec : row.final_history) {
            ++it;
            out += row.spec.id;
            out += ',';
            out += std::to_string(it);
            out += ',';
            out += format_g16(rec.du);
            out += ',';
            out += format_g16(rec.dq);
            out += ',';
            out += format_g16(rec.dp);
            out += ',';
            out += format_g16(rec.total);
            out += '\n';
        }
    }
    atomic_write(path, out);
}

}  // namespace porofem
