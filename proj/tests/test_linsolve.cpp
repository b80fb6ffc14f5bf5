#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "porofem/bench.hpp"
#include "porofem/errors.hpp"
#include "porofem/verify.hpp"
#include "porofem/linsolve.hpp"
#include "test_support.hpp"

using namespace porofem;

TEST_CASE("triplet assembly accumulates duplicates into sorted CSR") {
    const SparseMatrix m = SparseMatrix::from_triplets(
        3, {{2, 0, 1.0}, {0, 0, 2.0}, {0, 0, 0.5}, {0, 2, -1.0}, {1, 1, 4.0}, {2, 0, 0.25}});
    CHECK(m.coeff(0, 0) == 2.5);
    CHECK(m.coeff(0, 2) == -1.0);
    CHECK(m.coeff(1, 1) == 4.0);
    CHECK(m.coeff(2, 0) == 1.25);
    CHECK(m.coeff(2, 2) == 0.0);
    CHECK(m.nnz() == 4);
    for (int r = 0; r < 3; ++r)
        for (int i = m.row_offsets()[r] + 1; i < m.row_offsets()[r + 1]; ++i)
            CHECK(m.col_indices()[i - 1] < m.col_indices()[i]);

    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST_CASE("identity solve returns the right-hand side") {
    const SparseMatrix eye = SparseMatrix::from_triplets(3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}});
    const Factorization f = lu_factor(eye);
    const std::vector<double> x = f.solve(std::vector<double>{1.0, -2.0, 3.0});
    CHECK(x[0] == 1.0);
    CHECK(x[1] == -2.0);
    CHECK(x[2] == 3.0);
}

TEST_CASE("permutation saddle system needs pivoting") {
    const SparseMatrix a = SparseMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const Factorization f = lu_factor(a);
    const std::vector<double> x = f.solve(std::vector<double>{1.0, 2.0});
    CHECK(x[0] == doctest::Approx(2.0));
    CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("random sparse SPD system solved to 1e-10 relative residual") {
    const int n = 200;
    auto g = testsup::rng(1234);
    std::vector<Triplet> trips;
    // Diagonally dominant band matrix.
    for (int i = 0; i < n; ++i) {
        trips.push_back({i, i, 10.0 + testsup::uniform(g, 0.0, 1.0)});
        for (int off : {1, 7}) {
            if (i + off < n) {
                const double v = testsup::uniform(g, -1.0, 1.0);
                trips.push_back({i, i + off, v});
                trips.push_back({i + off, i, v});
            }
        }
    }
    const SparseMatrix a = SparseMatrix::from_triplets(n, trips);
    std::vector<double> b(n);
    for (double &v : b) v = testsup::uniform(g, -1.0, 1.0);

    const Factorization f = lu_factor(a);
    const std::vector<double> x = f.solve(b);
    const std::vector<double> ax = a.multiply(x);
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (ax[i] - b[i]) * (ax[i] - b[i]);
        den += b[i] * b[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("zero right-hand side gives the zero solution") {
    const SparseMatrix a = SparseMatrix::from_triplets(2, {{0, 0, 3.0}, {0, 1, 1.0}, {1, 1, 2.0}});
    const Factorization f = lu_factor(a);
    const std::vector<double> x = f.solve(std::vector<double>{0.0, 0.0});
    CHECK(x[0] == 0.0);
    CHECK(x[1] == 0.0);
}

TEST_CASE("factorization reuse: solves are independent") {
    const SparseMatrix a =
        SparseMatrix::from_triplets(2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
    const Factorization f = lu_factor(a);
    const std::vector<double> b1{1.0, 0.0};
    const std::vector<double> b2{0.0, 1.0};
    const std::vector<double> x1 = f.solve(b1);
    const std::vector<double> x2 = f.solve(b2);
    const std::vector<double> x1_again = f.solve(b1);
    CHECK(x1[0] == x1_again[0]);
    CHECK(x1[1] == x1_again[1]);
    // x1 and x2 are columns of the inverse of [[2,1],[1,3]] = [[0.6,-0.2],[-0.2,0.4]].
    CHECK(x1[0] == doctest::Approx(0.6));
    CHECK(x2[0] == doctest::Approx(-0.2));
}

TEST_CASE("singular matrix reports the failing row") {
    // Row 1 is structurally empty.
    try {
        lu_factor(SparseMatrix::from_triplets(3, {{0, 0, 1.0}, {2, 2, 1.0}, {0, 2, 1.0}}));
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError &e) {
        CHECK(e.pivot_row == 1);
    }
}

TEST_CASE("benchmark systems solve to 1e-10 relative residual at h = 1/32") {
    Discretization disc(unit_square_mesh(32));
    ProblemDef def = make_test_problem_1(1, MaterialParams{});
    const DirichletBC bc = zero_boundary_bc(disc.mesh());
    DiscreteState state = random_state(disc, 7, 0.02);
    apply_bc(state, bc);
    const DiscreteState prev = disc.zero_state();
    state.t = 0.1;
    const BlockSystem sys = newton_system(disc, def, bc, state, prev, 0.1);
    const std::vector<double> x = Factorization(sys.matrix).solve(sys.rhs);
    const std::vector<double> ax = sys.matrix.multiply(x);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ax.size(); ++i) {
        num += (ax[i] - sys.rhs[i]) * (ax[i] - sys.rhs[i]);
        den += sys.rhs[i] * sys.rhs[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-10);
}

TEST_CASE("condition estimate tracks the diagonal spread") {
    const SparseMatrix well = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, 1.0}});
    CHECK(lu_factor(well).condition_estimate() == doctest::Approx(1.0));

    const SparseMatrix ill = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, 1e-8}});
    const double cond = lu_factor(ill).condition_estimate();
    CHECK(cond >= 1e7);
    CHECK(cond <= 1e9);
}
