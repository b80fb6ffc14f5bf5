#include "porofem/schemes.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "porofem/errors.hpp"
#include "porofem/linsolve.hpp"

namespace porofem {

namespace {
constexpr double kNoiseFloor = 1e-12;
constexpr double kDivergenceGrowth = 1e3;

DirichletBC no_constraints(int nu) {
    DirichletBC bc;
    bc.constrained.assign(nu, 0);
    bc.values.assign(nu, 0.0);
    return bc;
}
}  // namespace

const char *to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::MonolithicNewton: return "monolithic_newton";
        case SchemeKind::SplittingNewton: return "splitting_newton";
        case SchemeKind::MonolithicLScheme: return "monolithic_lscheme";
        case SchemeKind::SplittingLScheme: return "splitting_lscheme";
    }
    return "?";
}

const char *to_string(TermStatus status) {
    switch (status) {
        case TermStatus::Converged: return "converged";
        case TermStatus::MaxIter: return "max_iter";
        case TermStatus::Diverged: return "diverged";
        case TermStatus::ElementInversion: return "element_inversion";
    }
    return "?";
}

void SchemeConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    const bool lscheme =
        kind == SchemeKind::MonolithicLScheme || kind == SchemeKind::SplittingLScheme;
    if (lscheme && !(Lp > 0.0)) throw std::invalid_argument("L-scheme requires positive Lp");
    if (Ls < 0.0) throw std::invalid_argument("stabilization Ls must be non-negative");
}

namespace {

struct StepDriver {
    const Discretization &disc;
    const ProblemDef &def;
    const SchemeConfig &cfg;
    const DirichletBC &bc;
    const DiscreteState &prev;
    double tau;

    ConvergenceHistory hist;
    std::optional<Residuals> carried;  // residuals at the current state, if known

    // Cached factorizations for the constant-matrix schemes.
    std::optional<Factorization> mono_fact;
    std::optional<Factorization> flow_fact;
    std::optional<Factorization> mech_fact;

    Residuals residuals_at(const DiscreteState &state) {
        if (carried) {
            Residuals r = std::move(*carried);
            carried.reset();
            return r;
        }
        return assemble_residuals(disc, def, bc, state, prev, tau);
    }

    void note_factorization(const Factorization &f) {
        ++hist.factorizations;
        if (hist.factorizations == 1) hist.condition_estimate = f.condition_estimate();
    }

    // One monolithic iteration; returns the full increment vector.
    std::vector<double> monolithic_iteration(DiscreteState &state) {
        const bool newton = cfg.kind == SchemeKind::MonolithicNewton;
        // The L-scheme matrix is iteration-independent whenever K is frozen
        // (always in the small regime); reuse the factorization then.
        const bool reusable = !newton && def.regime == Regime::Small;
        std::vector<double> rhs;
        if (reusable && mono_fact) {
            rhs = stacked_negated_residuals(residuals_at(state), disc.layout());
        } else {
            BlockSystem sys = newton ? newton_system(disc, def, bc, state, prev, tau)
                                     : lscheme_system(disc, def, bc, state, prev, tau,
                                                      cfg.lparams());
            carried.reset();
            mono_fact.emplace(sys.matrix);
            note_factorization(*mono_fact);
            rhs = std::move(sys.rhs);
        }
        const std::vector<double> delta = mono_fact->solve(rhs);
        add_increment(state, disc.layout(), delta);
        return delta;
    }

    std::vector<double> splitting_iteration(DiscreteState &state) {
        const bool newton = cfg.kind == SchemeKind::SplittingNewton;
        const DofLayout &l = disc.layout();
        std::vector<double> delta(l.total(), 0.0);

        // Step 1: flow with frozen displacement.  The Newton pressure tangent
        // changes with p^{i-1}; the L-scheme one is constant unless K(u)
        // varies (large regime).
        const bool flow_reusable = !newton && def.regime == Regime::Small;
        std::vector<double> flow_rhs;
        if (flow_reusable && flow_fact) {
            const Residuals r = residuals_at(state);
            flow_rhs.resize(l.nq + l.np);
            for (int i = 0; i < l.nq; ++i) flow_rhs[i] = -r.darcy[i];
            for (int i = 0; i < l.np; ++i) flow_rhs[l.nq + i] = -r.mass[i];
        } else {
            FlowSystem fs = splitting_flow_system(
                disc, def, state, prev, tau,
                newton ? FlowLinearization::NewtonTangent : FlowLinearization::ConstantLp,
                cfg.Lp);
            carried.reset();
            flow_fact.emplace(fs.matrix);
            note_factorization(*flow_fact);
            flow_rhs = std::move(fs.rhs);
        }
        const std::vector<double> dqp = flow_fact->solve(flow_rhs);
        for (int i = 0; i < l.nq; ++i) {
            state.q[i] += dqp[i];
            delta[l.q_offset() + i] = dqp[i];
        }
        for (int i = 0; i < l.np; ++i) {
            state.p[i] += dqp[l.nq + i];
            delta[l.p_offset() + i] = dqp[l.nq + i];
        }
        carried.reset();  // state changed

        // Step 2: mechanics with the updated pressure.
        const bool mech_reusable = !newton;  // frozen tensor, constant matrix
        std::vector<double> mech_rhs;
        if (mech_reusable && mech_fact) {
            const Residuals r = assemble_residuals(disc, def, bc, state, prev, tau);
            mech_rhs.resize(l.nu);
            for (int i = 0; i < l.nu; ++i) mech_rhs[i] = -r.mech[i];
        } else {
            MechSystem ms = splitting_mech_system(
                disc, def, bc, state, tau, cfg.Ls,
                newton ? MechLinearization::NewtonTangent : MechLinearization::ConstantTensor,
                &cfg.tensor_Lu);
            mech_fact.emplace(ms.matrix);
            note_factorization(*mech_fact);
            mech_rhs = std::move(ms.rhs);
        }
        const std::vector<double> du = mech_fact->solve(mech_rhs);
        for (int i = 0; i < l.nu; ++i) {
            state.u[i] += du[i];
            delta[i] = du[i];
        }
        return delta;
    }
};

}  // namespace

std::pair<DiscreteState, ConvergenceHistory> solve_time_step(const Discretization &disc,
                                                             const ProblemDef &def,
                                                             const SchemeConfig &cfg,
                                                             const DiscreteState &prev,
                                                             double t_new, double tau) {
    cfg.validate();
    const DirichletBC bc = def.bc ? def.bc(t_new) : no_constraints(disc.layout().nu);

    DiscreteState state = prev;
    state.t = t_new;
    apply_bc(state, bc);

    StepDriver drv{disc, def, cfg, bc, prev, tau, {}, {}, {}, {}, {}};
    const bool monolithic = cfg.kind == SchemeKind::MonolithicNewton ||
                            cfg.kind == SchemeKind::MonolithicLScheme;

    double first_total = -1.0;
    double residual_floor = -1.0;

    for (int it = 1; it <= cfg.max_iter; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        IterRecord rec;
        try {
            const std::vector<double> delta =
                monolithic ? drv.monolithic_iteration(state) : drv.splitting_iteration(state);
            const IncrementNorms inc = increment_norms(disc, delta);
            rec.du = inc.du;
            rec.dq = inc.dq;
            rec.dp = inc.dp;
            rec.total = inc.total();

            Residuals res = assemble_residuals(disc, def, bc, state, prev, tau);
            const ResidualNorms rn = residual_norms(disc, res);
            rec.res_mech = rn.mech;
            rec.res_darcy = rn.darcy;
            rec.res_mass = rn.mass;
            drv.carried = std::move(res);
        } catch (const ElementInversionError &e) {
            drv.hist.status = TermStatus::ElementInversion;
            drv.hist.inverted_cell = e.cell;
            break;
        }
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        drv.hist.iters.push_back(rec);

        if (first_total < 0.0) first_total = rec.total;
        if (residual_floor < 0.0)
            residual_floor = kNoiseFloor *
                             std::max(1.0, rec.res_mech + rec.res_darcy + rec.res_mass);

        if (rec.total <= cfg.tol ||
            rec.res_mech + rec.res_darcy + rec.res_mass <= residual_floor) {
            drv.hist.status = TermStatus::Converged;
            break;
        }
        if (rec.total >= kDivergenceGrowth * first_total && first_total > 0.0) {
            drv.hist.status = TermStatus::Diverged;
            break;
        }
    }
    return {std::move(state), std::move(drv.hist)};
}

TransientResult run_transient(const Discretization &disc, const ProblemDef &def,
                              const SchemeConfig &cfg, DiscreteState initial, double tau,
                              double T) {
    if (!(tau > 0.0) || !(T > 0.0)) throw std::invalid_argument("tau and T must be positive");
    const double steps_real = T / tau;
    const int nsteps = static_cast<int>(std::lround(steps_real));
    if (nsteps < 1 || std::abs(steps_real - nsteps) > 1e-9)
        throw std::invalid_argument("T must be a positive integer multiple of tau");

    TransientResult result;
    result.state = std::move(initial);
    result.state.t = 0.0;
    for (int n = 1; n <= nsteps; ++n) {
        auto [next, hist] = solve_time_step(disc, def, cfg, result.state, n * tau, tau);
        result.steps.push_back(std::move(hist));
        result.state = std::move(next);
        if (result.steps.back().status != TermStatus::Converged) {
            result.failed_step = n;
            break;
        }
    }
    return result;
}

OrderFit fit_convergence_order(const ConvergenceHistory &history, int window) {
    OrderFit fit;
    if (history.iterations() < 3 || window < 1) return fit;

    std::vector<double> e;
    for (const IterRecord &rec : history.iters)
        if (rec.total > kNoiseFloor) e.push_back(rec.total);
    if (e.size() < 2) return fit;

    const int npairs = std::min<int>(window, static_cast<int>(e.size()) - 1);
    const int begin = static_cast<int>(e.size()) - 1 - npairs;

    double sx = 0, sy = 0, sxx = 0, sxy = 0, logratio = 0;
    for (int i = begin; i + 1 < static_cast<int>(e.size()); ++i) {
        const double x = std::log(e[i]);
        const double y = std::log(e[i + 1]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        logratio += y - x;
    }
    const double n = npairs;
    fit.contraction = std::exp(logratio / n);
    fit.stagnating = fit.contraction >= 0.99;
    // The slope needs at least two points in the (log e_{i-1}, log e_i) plane.
    if (npairs >= 2) {
        const double denom = n * sxx - sx * sx;
        if (std::abs(denom) > 1e-30) {
            fit.order = (n * sxy - sx * sy) / denom;
            fit.defined = true;
        }
    }
    return fit;
}

bool quadratic_recursion_bound_holds(double a, double b, double x0) {
    if (a < 0.0 || b < 0.0 || x0 < 0.0)
        throw std::invalid_argument("quadratic_recursion_bound_holds expects non-negative inputs");
    return a * x0 * x0 + b <= 1.0;
}

std::optional<double> recommended_Ls(const MaterialParams &params,
                                     const NonlinearityModel &model) {
    if (!(model.alpha_b > 0.0)) return std::nullopt;
    return params.alpha * params.alpha / model.alpha_b;
}

}  // namespace porofem
