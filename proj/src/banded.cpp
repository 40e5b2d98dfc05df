#include "discspline/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace discspline {

BandedMatrix::BandedMatrix(int n_rows, int n_cols, int lower_bw, int upper_bw)
    : n_rows_(n_rows), n_cols_(n_cols), lower_(lower_bw), upper_(upper_bw) {
    if (n_rows <= 0 || n_cols <= 0 || lower_bw < 0 || upper_bw < 0)
        throw std::domain_error("BandedMatrix: bad dimensions");
    data_.assign(static_cast<size_t>(n_rows) * width(), 0.0);
}

BandedMatrix BandedMatrix::diagonal(const Eigen::VectorXd& d) {
    BandedMatrix D(static_cast<int>(d.size()), static_cast<int>(d.size()), 0, 0);
    for (int i = 0; i < d.size(); ++i) D.set(i, i, d[i]);
    return D;
}

double BandedMatrix::operator()(int i, int j) const {
    if (i < 0 || i >= n_rows_ || j < 0 || j >= n_cols_) return 0.0;
    int off = j - i;
    if (off < -lower_ || off > upper_) return 0.0;
    return data_[static_cast<size_t>(i) * width() + (off + lower_)];
}

void BandedMatrix::set(int i, int j, double v) {
    int off = j - i;
    if (i < 0 || i >= n_rows_ || j < 0 || j >= n_cols_ || off < -lower_ || off > upper_)
        throw std::domain_error("BandedMatrix::set outside band");
    data_[static_cast<size_t>(i) * width() + (off + lower_)] = v;
}

void BandedMatrix::add(int i, int j, double v) {
    int off = j - i;
    if (i < 0 || i >= n_rows_ || j < 0 || j >= n_cols_ || off < -lower_ || off > upper_)
        throw std::domain_error("BandedMatrix::add outside band");
    data_[static_cast<size_t>(i) * width() + (off + lower_)] += v;
}

Eigen::VectorXd BandedMatrix::multiply(const Eigen::VectorXd& v) const {
    if (v.size() != n_cols_) throw std::domain_error("BandedMatrix::multiply size mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_rows_);
    for (int i = 0; i < n_rows_; ++i) {
        int jlo = std::max(0, i - lower_), jhi = std::min(n_cols_ - 1, i + upper_);
        double s = 0.0;
        for (int j = jlo; j <= jhi; ++j)
            s += data_[static_cast<size_t>(i) * width() + (j - i + lower_)] * v[j];
        out[i] = s;
    }
    return out;
}

Eigen::VectorXd BandedMatrix::multiply_transpose(const Eigen::VectorXd& v) const {
    if (v.size() != n_rows_) throw std::domain_error("BandedMatrix::multiply_transpose size mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_cols_);
    for (int i = 0; i < n_rows_; ++i) {
        int jlo = std::max(0, i - lower_), jhi = std::min(n_cols_ - 1, i + upper_);
        for (int j = jlo; j <= jhi; ++j)
            out[j] += data_[static_cast<size_t>(i) * width() + (j - i + lower_)] * v[i];
    }
    return out;
}

BandedMatrix BandedMatrix::transpose() const {
    BandedMatrix T(n_cols_, n_rows_, upper_, lower_);
    for (int i = 0; i < n_rows_; ++i) {
        int jlo = std::max(0, i - lower_), jhi = std::min(n_cols_ - 1, i + upper_);
        for (int j = jlo; j <= jhi; ++j) T.set(j, i, (*this)(i, j));
    }
    return T;
}

BandedMatrix BandedMatrix::matmul(const BandedMatrix& other) const {
    if (n_cols_ != other.n_rows_) throw std::domain_error("BandedMatrix::matmul size mismatch");
    BandedMatrix C(n_rows_, other.n_cols_, lower_ + other.lower_, upper_ + other.upper_);
    for (int i = 0; i < n_rows_; ++i) {
        int plo = std::max(0, i - lower_), phi = std::min(n_cols_ - 1, i + upper_);
        for (int p = plo; p <= phi; ++p) {
            double aip = (*this)(i, p);
            if (aip == 0.0) continue;
            int jlo = std::max(0, p - other.lower_), jhi = std::min(other.n_cols_ - 1, p + other.upper_);
            for (int j = jlo; j <= jhi; ++j) C.add(i, j, aip * other(p, j));
        }
    }
    return C;
}

BandedMatrix BandedMatrix::gram(const BandedMatrix& other) const {
    if (n_rows_ != other.n_rows_) throw std::domain_error("BandedMatrix::gram size mismatch");
    BandedMatrix C(n_cols_, other.n_cols_, lower_ + other.upper_, upper_ + other.lower_);
    for (int p = 0; p < n_rows_; ++p) {
        int ilo = std::max(0, p - lower_), ihi = std::min(n_cols_ - 1, p + upper_);
        int jlo = std::max(0, p - other.lower_), jhi = std::min(other.n_cols_ - 1, p + other.upper_);
        for (int i = ilo; i <= ihi; ++i) {
            double api = (*this)(p, i);
            if (api == 0.0) continue;
            for (int j = jlo; j <= jhi; ++j) C.add(i, j, api * other(p, j));
        }
    }
    return C;
}

BandedMatrix BandedMatrix::take_rows(const std::vector<int>& keep) const {
    if (keep.empty()) throw std::domain_error("BandedMatrix::take_rows: empty selection");
    // Row p of the result is row keep[p] of *this; offsets can grow by the
    // largest index shift, so recompute band widths conservatively.
    int lo = 0, hi = 0;
    for (size_t p = 0; p < keep.size(); ++p) {
        int i = keep[p];
        lo = std::max(lo, static_cast<int>(p) - std::max(0, i - lower_));
        hi = std::max(hi, std::min(n_cols_ - 1, i + upper_) - static_cast<int>(p));
    }
    BandedMatrix R(static_cast<int>(keep.size()), n_cols_, lo, hi);
    for (size_t p = 0; p < keep.size(); ++p) {
        int i = keep[p];
        int jlo = std::max(0, i - lower_), jhi = std::min(n_cols_ - 1, i + upper_);
        for (int j = jlo; j <= jhi; ++j) {
            double v = (*this)(i, j);
            if (v != 0.0) R.set(static_cast<int>(p), j, v);
        }
    }
    return R;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_rows_, n_cols_);
    for (int i = 0; i < n_rows_; ++i) {
        int jlo = std::max(0, i - lower_), jhi = std::min(n_cols_ - 1, i + upper_);
        for (int j = jlo; j <= jhi; ++j) M(i, j) = (*this)(i, j);
    }
    return M;
}

BandedCholesky::BandedCholesky(const BandedMatrix& A, const Tolerances& tol) {
    if (A.rows() != A.cols()) throw std::domain_error("BandedCholesky: matrix not square");
    n_ = A.rows();
    bw_ = std::max(A.lower_bw(), A.upper_bw());
    fac_.assign(static_cast<size_t>(n_) * (bw_ + 1), 0.0);
    auto L = [&](int i, int j) -> double& {
        return fac_[static_cast<size_t>(i) * (bw_ + 1) + (j - i + bw_)];
    };
    double scale = 0.0;
    for (int i = 0; i < n_; ++i) scale = std::max(scale, std::abs(A(i, i)));
    const double floor = tol.pivot_floor * std::max(1.0, scale);
    for (int j = 0; j < n_; ++j) {
        double d = A(j, j);
        for (int p = std::max(0, j - bw_); p < j; ++p) d -= L(j, p) * L(j, p);
        if (!(d > floor)) throw std::runtime_error("BandedCholesky: non-SPD pivot");
        double ljj = std::sqrt(d);
        L(j, j) = ljj;
        for (int i = j + 1; i <= std::min(n_ - 1, j + bw_); ++i) {
            double s = A(i, j);
            for (int p = std::max(0, i - bw_); p < j; ++p) s -= L(i, p) * L(j, p);
            L(i, j) = s / ljj;
        }
    }
}

Eigen::VectorXd BandedCholesky::solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != n_) throw std::domain_error("BandedCholesky::solve size mismatch");
    auto L = [&](int i, int j) {
        return fac_[static_cast<size_t>(i) * (bw_ + 1) + (j - i + bw_)];
    };
    Eigen::VectorXd x = rhs;
    for (int i = 0; i < n_; ++i) {
        double s = x[i];
        for (int j = std::max(0, i - bw_); j < i; ++j) s -= L(i, j) * x[j];
        x[i] = s / L(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j <= std::min(n_ - 1, i + bw_); ++j) s -= L(j, i) * x[j];
        x[i] = s / L(i, i);
    }
    return x;
}

Eigen::VectorXd banded_solve(const BandedMatrix& A, const Eigen::VectorXd& rhs,
                             const Tolerances& tol) {
    return BandedCholesky(A, tol).solve(rhs);
}

double condition_number(const Eigen::MatrixXd& M) {
    if (M.size() == 0) throw std::domain_error("condition_number: empty matrix");
    Eigen::MatrixXd G = M.transpose() * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0) return std::numeric_limits<double>::infinity();
    return lmax / lmin;
}

}  // namespace discspline
