#include "porofem/linsolve.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "porofem/errors.hpp"

namespace porofem {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
    for (const Triplet &t : triplets)
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw std::out_of_range("triplet index out of range");
    // Stable sort keeps equal (row, col) entries in insertion order, so the
    // accumulated value is a fixed left-to-right sum.
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet &a, const Triplet &b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m;
    m.n_ = n;
    m.row_offsets_.assign(n + 1, 0);
    for (size_t i = 0; i < triplets.size();) {
        size_t j = i;
        double v = 0.0;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col) {
            v += triplets[j].value;
            ++j;
        }
        m.col_indices_.push_back(triplets[i].col);
        m.values_.push_back(v);
        ++m.row_offsets_[triplets[i].row + 1];
        i = j;
    }
    std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());
    return m;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (int r = 0; r < n_; ++r) {
        double s = 0.0;
        for (int idx = row_offsets_[r]; idx < row_offsets_[r + 1]; ++idx)
            s += values_[idx] * x[col_indices_[idx]];
        y[r] = s;
    }
    return y;
}

double SparseMatrix::coeff(int row, int col) const {
    for (int idx = row_offsets_[row]; idx < row_offsets_[row + 1]; ++idx)
        if (col_indices_[idx] == col) return values_[idx];
    return 0.0;
}

struct Factorization::Impl {
    Eigen::SparseMatrix<double> a;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    double norm1 = 0.0;
};

namespace {

// Structurally empty row/column makes the first failing pivot obvious;
// reported ahead of the factorization backend's message.
int find_structural_defect(const SparseMatrix &a) {
    const int n = a.size();
    std::vector<char> col_seen(n, 0);
    for (int r = 0; r < n; ++r) {
        bool any = false;
        for (int idx = a.row_offsets()[r]; idx < a.row_offsets()[r + 1]; ++idx) {
            if (a.values()[idx] != 0.0) {
                any = true;
                col_seen[a.col_indices()[idx]] = 1;
            }
        }
        if (!any) return r;
    }
    for (int c = 0; c < n; ++c)
        if (!col_seen[c]) return c;
    return -1;
}

}  // namespace

Factorization::Factorization(const SparseMatrix &a) : impl_(std::make_unique<Impl>()) {
    const int n = a.size();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(a.nnz());
    for (int r = 0; r < n; ++r)
        for (int idx = a.row_offsets()[r]; idx < a.row_offsets()[r + 1]; ++idx)
            trips.emplace_back(r, a.col_indices()[idx], a.values()[idx]);
    impl_->a.resize(n, n);
    impl_->a.setFromTriplets(trips.begin(), trips.end());
    impl_->a.makeCompressed();
    // 1-norm for the condition estimate.
    std::vector<double> colsum(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int idx = a.row_offsets()[r]; idx < a.row_offsets()[r + 1]; ++idx)
            colsum[a.col_indices()[idx]] += std::abs(a.values()[idx]);
    impl_->norm1 = colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());

    impl_->lu.analyzePattern(impl_->a);
    impl_->lu.factorize(impl_->a);
    if (impl_->lu.info() != Eigen::Success) {
        const int defect = find_structural_defect(a);
        throw SingularMatrixError(
            "singular matrix: " + std::string(impl_->lu.lastErrorMessage()) +
                (defect >= 0 ? " (first failing pivot row " + std::to_string(defect) + ")" : ""),
            defect);
    }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization &&) noexcept = default;
Factorization &Factorization::operator=(Factorization &&) noexcept = default;

int Factorization::size() const { return static_cast<int>(impl_->a.rows()); }

std::vector<double> Factorization::solve(std::span<const double> b) const {
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    Eigen::VectorXd x = impl_->lu.solve(rhs);
    return {x.data(), x.data() + x.size()};
}

double Factorization::condition_estimate() const {
    // Hager's 1-norm estimator for ||A^-1||, a few forward/transpose solves.
    const int n = size();
    if (n == 0) return 0.0;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    double est = 0.0;
    for (int iter = 0; iter < 5; ++iter) {
        Eigen::VectorXd y = impl_->lu.solve(x);
        est = y.lpNorm<1>();
        Eigen::VectorXd xi(n);
        for (int i = 0; i < n; ++i) xi[i] = y[i] >= 0.0 ? 1.0 : -1.0;
        Eigen::VectorXd z = impl_->lu.adjoint().solve(xi);
        int jmax = 0;
        z.cwiseAbs().maxCoeff(&jmax);
        if (std::abs(z[jmax]) <= z.dot(x)) break;
        x.setZero();
        x[jmax] = 1.0;
    }
    return est * impl_->norm1;
}

Factorization lu_factor(const SparseMatrix &a) { return Factorization(a); }

}  // namespace porofem
