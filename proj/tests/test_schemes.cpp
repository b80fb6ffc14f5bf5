#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "porofem/bench.hpp"
#include "porofem/errors.hpp"
#include "porofem/schemes.hpp"
#include "porofem/verify.hpp"
#include "test_support.hpp"

using namespace porofem;

namespace {

ConvergenceHistory history_from(std::initializer_list<double> totals) {
    ConvergenceHistory h;
    for (const double t : totals) {
        IterRecord rec;
        rec.total = t;
        h.iters.push_back(rec);
    }
    h.status = TermStatus::Converged;
    return h;
}

// Problem-1 setup on a given mesh with the benchmark forcing.
struct Tp1 {
    Discretization disc;
    ProblemDef def;

    explicit Tp1(int n, int case_id = 1, MaterialParams params = {})
        : disc(unit_square_mesh(n)), def(make_test_problem_1(case_id, params)) {
        def.bc = [this](double) { return zero_boundary_bc(disc.mesh()); };
    }
};

}  // namespace

TEST_CASE("convergence-order fit on constructed sequences") {
    SUBCASE("quadratic sequence") {
        const OrderFit f = fit_convergence_order(history_from({1e-1, 1e-2, 1e-4, 1e-8}));
        REQUIRE(f.defined);
        CHECK(f.order == doctest::Approx(2.0).epsilon(0.025));
    }
    SUBCASE("linear sequence with ratio one half") {
        const OrderFit f = fit_convergence_order(history_from({1e-1, 5e-2, 2.5e-2, 1.25e-2}));
        REQUIRE(f.defined);
        CHECK(f.order == doctest::Approx(1.0).epsilon(0.01));
        CHECK(f.contraction == doctest::Approx(0.5).epsilon(1e-12));
        CHECK_FALSE(f.stagnating);
    }
    SUBCASE("near-stagnation flagged") {
        const OrderFit f =
            fit_convergence_order(history_from({1e-1, 9.999e-2, 9.998e-2, 9.997e-2}));
        CHECK(f.contraction == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(f.stagnating);
    }
    SUBCASE("too few iterations is undefined") {
        CHECK_FALSE(fit_convergence_order(history_from({1e-1, 1e-2})).defined);
        CHECK_FALSE(fit_convergence_order(history_from({})).defined);
    }
    SUBCASE("window restricts the fit to the final pairs") {
        // First pair has slope 3, the last three slope 1.
        const OrderFit f =
            fit_convergence_order(history_from({1e-1, 1e-3, 5e-4, 2.5e-4, 1.25e-4}), 3);
        REQUIRE(f.defined);
        CHECK(f.order == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("quadratic-recursion bound") {
    CHECK(quadratic_recursion_bound_holds(1.0, 0.5, 0.5));
    CHECK(quadratic_recursion_bound_holds(0.0, 1.0, 123.0));
    CHECK_FALSE(quadratic_recursion_bound_holds(4.0, 0.5, 0.5));
    CHECK_THROWS(quadratic_recursion_bound_holds(-1.0, 0.0, 0.0));
}

TEST_CASE("recommended stabilization parameter") {
    MaterialParams params;  // alpha = 1
    SUBCASE("exponential pressure law on the benchmark range") {
        const auto ls = recommended_Ls(params, nonlinearity_case(1));
        REQUIRE(ls.has_value());
        CHECK(*ls == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("uncoupled problem needs none") {
        params.alpha = 0.0;
        const auto ls = recommended_Ls(params, nonlinearity_case(1));
        REQUIRE(ls.has_value());
        CHECK(*ls == 0.0);
    }
    SUBCASE("violated hypothesis reported as unavailable") {
        CHECK_FALSE(recommended_Ls(MaterialParams{}, nonlinearity_case(4)).has_value());
    }
}

TEST_CASE("scheme config validation") {
    SchemeConfig cfg;
    cfg.tol = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = SchemeConfig{};
    cfg.max_iter = 0;
    CHECK_THROWS(cfg.validate());
    cfg = SchemeConfig{};
    cfg.kind = SchemeKind::MonolithicLScheme;
    cfg.Lp = 0.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("linear specialization converges in one iteration") {
    Discretization disc(unit_square_mesh(3));
    ProblemDef def;
    def.regime = Regime::Small;
    def.model = linear_model(0.8, 1.2);
    def.bc = [&disc](double) { return zero_boundary_bc(disc.mesh()); };

    DiscreteState prev = random_state(disc, 11, 0.05);
    prev.t = 0.0;
    SchemeConfig cfg;
    cfg.kind = SchemeKind::MonolithicNewton;
    const auto [state, hist] = solve_time_step(disc, def, cfg, prev, 0.1, 0.1);
    CHECK(hist.status == TermStatus::Converged);
    CHECK(hist.iterations() == 1);
}

TEST_CASE("zero data stays zero with one iteration per step") {
    Tp1 tp(3);
    tp.def.f_mech = nullptr;
    tp.def.source = nullptr;
    SchemeConfig cfg;
    const TransientResult tr =
        run_transient(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.2, 1.0);
    CHECK(tr.ok());
    REQUIRE(tr.steps.size() == 5);
    for (const ConvergenceHistory &h : tr.steps) {
        CHECK(h.status == TermStatus::Converged);
        CHECK(h.iterations() == 1);
    }
    CHECK(tp.disc.norm_u(tr.state.u) == 0.0);
    CHECK(tp.disc.norm_p(tr.state.p) == 0.0);
}

TEST_CASE("a single step equals the transient with N = 1") {
    Tp1 tp(3);
    SchemeConfig cfg;
    const auto [state, hist] = solve_time_step(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.5, 0.5);
    const TransientResult tr =
        run_transient(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.5, 0.5);
    REQUIRE(tr.steps.size() == 1);
    CHECK(tp.disc.norm_u(state.u) == tp.disc.norm_u(tr.state.u));
    CHECK(tp.disc.norm_q(state.q) == tp.disc.norm_q(tr.state.q));
    CHECK(tp.disc.norm_p(state.p) == tp.disc.norm_p(tr.state.p));
}

TEST_CASE("transient validates the step count") {
    Tp1 tp(2);
    SchemeConfig cfg;
    CHECK_THROWS(run_transient(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.3, 1.0));
    CHECK_THROWS(run_transient(tp.disc, tp.def, cfg, tp.disc.zero_state(), -0.1, 1.0));
}

TEST_CASE("frozen L-scheme matrices are factored once per step") {
    Tp1 tp(4);
    const ExperimentSpec spec = default_spec(Problem::TestProblem1);

    SUBCASE("monolithic") {
        ExperimentSpec s = spec;
        s.scheme = SchemeKind::MonolithicLScheme;
        const SchemeConfig cfg = make_scheme_config(s, tp.def);
        const auto [state, hist] = solve_time_step(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 0.1);
        CHECK(hist.status == TermStatus::Converged);
        CHECK(hist.iterations() > 2);
        CHECK(hist.factorizations == 1);
    }
    SUBCASE("splitting: one flow and one mechanics factorization") {
        ExperimentSpec s = spec;
        s.scheme = SchemeKind::SplittingLScheme;
        const SchemeConfig cfg = make_scheme_config(s, tp.def);
        const auto [state, hist] = solve_time_step(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 0.1);
        CHECK(hist.status == TermStatus::Converged);
        CHECK(hist.iterations() > 2);
        CHECK(hist.factorizations == 2);
    }
    SUBCASE("Newton refactors every iteration") {
        ExperimentSpec s = spec;
        const SchemeConfig cfg = make_scheme_config(s, tp.def);
        const auto [state, hist] = solve_time_step(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 0.1);
        CHECK(hist.factorizations == hist.iterations());
    }
}

TEST_CASE("large regime reassembles the flow matrix every iteration") {
    // K depends on the lagged displacement there, so only the frozen
    // mechanics matrix is reused.
    Discretization disc(unit_square_mesh(4));
    MaterialParams params;
    params.k = 0.01;
    ProblemDef def = make_large_deformation_2d(params);
    def.bc = [&disc](double t) {
        return rotation_bc(disc.mesh(), std::numbers::pi / 16.0 * t);
    };
    ExperimentSpec spec = default_spec(Problem::LargeDeformation2D);
    spec.scheme = SchemeKind::SplittingLScheme;
    spec.params = params;
    const SchemeConfig cfg = make_scheme_config(spec, def);
    const auto [state, hist] = solve_time_step(disc, def, cfg, disc.zero_state(), 0.125, 0.125);
    REQUIRE(hist.status == TermStatus::Converged);
    CHECK(hist.factorizations == hist.iterations() + 1);
}

TEST_CASE("benchmark signatures at h = tau = 0.1") {
    Tp1 tp(10);

    SUBCASE("monolithic Newton is quadratic") {
        ExperimentSpec s = default_spec(Problem::TestProblem1);
        const SchemeConfig cfg = make_scheme_config(s, tp.def);
        const TransientResult tr =
            run_transient(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 1.0);
        REQUIRE(tr.ok());
        const OrderFit fit = fit_convergence_order(tr.last_history());
        REQUIRE(fit.defined);
        CHECK(fit.order >= 1.8);
    }
    SUBCASE("splitting L-scheme with the Lipschitz parameters is linear") {
        ExperimentSpec s = default_spec(Problem::TestProblem1);
        s.scheme = SchemeKind::SplittingLScheme;
        const SchemeConfig cfg = make_scheme_config(s, tp.def);
        CHECK(cfg.Lp == doctest::Approx(tp.def.model.lipschitz_func_b));
        const TransientResult tr =
            run_transient(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 1.0);
        REQUIRE(tr.ok());
        const OrderFit fit = fit_convergence_order(tr.last_history());
        REQUIRE(fit.defined);
        CHECK(fit.contraction < 1.0);
        CHECK(fit.order == doctest::Approx(1.0).epsilon(0.3));
    }
}

TEST_CASE("splitting fixed point satisfies the monolithic residuals") {
    Tp1 tp(5);
    ExperimentSpec s = default_spec(Problem::TestProblem1);
    s.scheme = SchemeKind::SplittingNewton;
    const SchemeConfig cfg = make_scheme_config(s, tp.def);
    const auto [state, hist] = solve_time_step(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 0.1);
    REQUIRE(hist.status == TermStatus::Converged);

    const DirichletBC bc = zero_boundary_bc(tp.disc.mesh());
    const Residuals r =
        assemble_residuals(tp.disc, tp.def, bc, state, tp.disc.zero_state(), 0.1);
    CHECK(residual_norms(tp.disc, r).total() <= 10.0 * cfg.tol);
}

TEST_CASE("history invariants") {
    Tp1 tp(5);
    SchemeConfig cfg = make_scheme_config(default_spec(Problem::TestProblem1), tp.def);
    const auto [state, hist] = solve_time_step(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 0.1);
    REQUIRE(hist.status == TermStatus::Converged);
    REQUIRE(hist.iterations() >= 1);
    CHECK(hist.iters.back().total <= cfg.tol);
    CHECK(hist.condition_estimate > 1.0);
    for (const IterRecord &rec : hist.iters) {
        CHECK(rec.total == doctest::Approx(rec.du + rec.dq + rec.dp));
        CHECK(rec.wall_seconds >= 0.0);
    }
}

TEST_CASE("divergence is detected and reported") {
    // An L-scheme with a mechanics tangent far too soft overshoots and grows.
    Tp1 tp(4);
    SchemeConfig cfg;
    cfg.kind = SchemeKind::MonolithicLScheme;
    cfg.tensor_Lu = Tensor4::isotropic(2e-3, 1e-3);
    cfg.tensor_Lp = -Mat2::identity();
    cfg.Lp = 1.0;
    cfg.Lu = 1.0;
    const auto [state, hist] = solve_time_step(tp.disc, tp.def, cfg, tp.disc.zero_state(), 0.1, 0.1);
    CHECK(hist.status == TermStatus::Diverged);
}

TEST_CASE("element inversion surfaces through the transient driver") {
    ExperimentSpec s = default_spec(Problem::LargeDeformation2D);
    s.paper_rotation = true;  // quarter turn on the coarse mesh inverts cells
    const ReportRow row = run_large_deformation_2d(s);
    CHECK_FALSE(row.solver_error);
    CHECK(row.status == TermStatus::ElementInversion);
    CHECK(row.failed_step >= 1);
}
