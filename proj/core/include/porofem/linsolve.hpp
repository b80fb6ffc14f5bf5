#pragma once

#include <memory>
#include <span>
#include <vector>

namespace porofem {

struct Triplet {
    int row;
    int col;
    double value;
};

// Row-compressed square sparse matrix.  Column indices are sorted and unique
// per row; duplicate triplets are accumulated in a fixed (row, col, insertion)
// order so assembled values do not depend on container internals.
class SparseMatrix {
  public:
    SparseMatrix() = default;
    static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);

    int size() const { return n_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    const std::vector<int> &row_offsets() const { return row_offsets_; }
    const std::vector<int> &col_indices() const { return col_indices_; }
    const std::vector<double> &values() const { return values_; }

    std::vector<double> multiply(std::span<const double> x) const;

    // Entry lookup (0 when not stored); intended for tests and diagnostics.
    double coeff(int row, int col) const;

  private:
    int n_ = 0;
    std::vector<int> row_offsets_;
    std::vector<int> col_indices_;
    std::vector<double> values_;
};

// Sparse LU with partial pivoting and a fill-reducing column ordering,
// computed once per matrix.  Immutable after construction; concurrent solves
// with distinct right-hand sides are safe.
class Factorization {
  public:
    explicit Factorization(const SparseMatrix &a);  // throws SingularMatrixError
    ~Factorization();
    Factorization(Factorization &&) noexcept;
    Factorization &operator=(Factorization &&) noexcept;

    std::vector<double> solve(std::span<const double> b) const;

    // Cheap 1-norm condition estimate (Hager-style, a handful of solves).
    double condition_estimate() const;

    int size() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Factorization lu_factor(const SparseMatrix &a);

}  // namespace porofem
