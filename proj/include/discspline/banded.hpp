#pragma once

#include <Eigen/Dense>
#include <vector>

#include "discspline/grid.hpp"

namespace discspline {

// General banded matrix with explicit half-bandwidths. Entries outside the
// band are identically zero. Storage is dense per row over the band window.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(int n_rows, int n_cols, int lower_bw, int upper_bw);

    static BandedMatrix diagonal(const Eigen::VectorXd& d);

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    int lower_bw() const { return lower_; }
    int upper_bw() const { return upper_; }

    double operator()(int i, int j) const;
    // Writing outside the band throws; the band is fixed at construction.
    void set(int i, int j, double v);
    void add(int i, int j, double v);

    Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
    Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& v) const;

    BandedMatrix transpose() const;
    // Banded product; the result band widths add.
    BandedMatrix matmul(const BandedMatrix& other) const;
    // this^T * other, without forming the transpose.
    BandedMatrix gram(const BandedMatrix& other) const;

    // Rows in `keep` (0-based, increasing) retained.
    BandedMatrix take_rows(const std::vector<int>& keep) const;

    Eigen::MatrixXd to_dense() const;

private:
    int width() const { return lower_ + upper_ + 1; }
    int n_rows_ = 0, n_cols_ = 0, lower_ = 0, upper_ = 0;
    std::vector<double> data_;
};

// Cholesky factorization of a symmetric positive definite banded matrix.
// The factor keeps the lower bandwidth of A; solve is O(n * bw^2).
class BandedCholesky {
public:
    explicit BandedCholesky(const BandedMatrix& A, const Tolerances& tol = {});
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

private:
    int n_ = 0, bw_ = 0;
    std::vector<double> fac_;  // lower factor, row-major band storage
};

// Solves A x = rhs for symmetric positive definite banded A.
// Throws std::runtime_error on a non-SPD pivot.
Eigen::VectorXd banded_solve(const BandedMatrix& A, const Eigen::VectorXd& rhs,
                             const Tolerances& tol = {});

// kappa(M) = lambda_max(M^T M) / lambda_min(M^T M), +infinity when the
// computed lambda_min is nonpositive. Throws std::domain_error when M is empty.
double condition_number(const Eigen::MatrixXd& M);

}  // namespace discspline
