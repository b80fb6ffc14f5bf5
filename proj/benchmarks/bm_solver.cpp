#include <benchmark/benchmark.h>

#include "porofem/bench.hpp"
#include "porofem/schemes.hpp"

using namespace porofem;

namespace {

struct Setup {
    Discretization disc;
    ProblemDef def;
    DirichletBC bc;
    DiscreteState prev;

    explicit Setup(int n)
        : disc(unit_square_mesh(n)),
          def(make_test_problem_1(1, MaterialParams{})),
          bc(zero_boundary_bc(disc.mesh())),
          prev(disc.zero_state()) {
        def.bc = [this](double) { return bc; };
    }
};

void BM_NewtonAssembly(benchmark::State &state) {
    Setup s(static_cast<int>(state.range(0)));
    DiscreteState cur = s.prev;
    cur.t = 0.1;
    for (auto _ : state) {
        BlockSystem sys = newton_system(s.disc, s.def, s.bc, cur, s.prev, 0.1);
        benchmark::DoNotOptimize(sys.rhs.data());
    }
}

void BM_FactorSolve(benchmark::State &state) {
    Setup s(static_cast<int>(state.range(0)));
    DiscreteState cur = s.prev;
    cur.t = 0.1;
    BlockSystem sys = newton_system(s.disc, s.def, s.bc, cur, s.prev, 0.1);
    for (auto _ : state) {
        Factorization f(sys.matrix);
        std::vector<double> x = f.solve(sys.rhs);
        benchmark::DoNotOptimize(x.data());
    }
}

void BM_TimeStep(benchmark::State &state) {
    Setup s(static_cast<int>(state.range(0)));
    SchemeConfig cfg;
    cfg.kind = SchemeKind::MonolithicNewton;
    for (auto _ : state) {
        auto [next, hist] = solve_time_step(s.disc, s.def, cfg, s.prev, 0.1, 0.1);
        benchmark::DoNotOptimize(hist.iters.data());
    }
}

}  // namespace

BENCHMARK(BM_NewtonAssembly)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_FactorSolve)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_TimeStep)->Arg(8)->Arg(16);
BENCHMARK_MAIN();
