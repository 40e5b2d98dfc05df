#include "discspline/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace discspline {

double tv_functional(const Eigen::VectorXd& theta, const DesignGrid& grid, int k) {
    if (theta.size() != grid.size()) throw std::domain_error("tv_functional: theta length != n");
    PenaltyOperators ops = build_penalty_ops(grid, k + 1);
    Eigen::VectorXd d = ops.D.multiply(theta);
    double s = 0.0;
    for (int i = 0; i < d.size(); ++i) s += std::abs(ops.W[i] * d[i]);
    return s;
}

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Row/column recursion entries use a checked accessor: out-of-range is zero.
double acc(const Eigen::MatrixXd& A, int i, int j) {
    if (i < 0 || j < 0 || i >= A.rows() || j >= A.cols()) return 0.0;
    return A(i, j);
}

}  // namespace

SobolevMatrices sobolev_V(const DesignGrid& grid, int m, const Eigen::MatrixXd& M_override) {
    const int n = grid.size();
    const int k = 2 * m - 1;
    if (m < 1 || k > n - 1) throw std::domain_error("sobolev_V: order out of range");
    const int nm = n - m;

    SobolevMatrices out;
    out.m = m;

    if (M_override.size() > 0) {
        if (M_override.rows() != nm || M_override.cols() != nm)
            throw std::domain_error("sobolev_V: M_override has wrong dimensions");
        out.M = M_override;
    } else {
        // Closed form for M_ij = integral of (D^m h_{i+m})(D^m h_{j+m}): a sum
        // of boundary-evaluation differences of derivative products, evaluated
        // with one-sided limits. Unified over the two index regimes since the
        // top-order derivative of the shorter member is identically one on the
        // evaluation range.
        FFBasisSpec spec(grid, k);
        out.M.resize(nm, nm);
        for (int i = 0; i < nm; ++i) {
            const int ci = i + m;  // 0-based basis column of h_{i+m}
            const double s = (i < m) ? grid.a() : grid[ci - 1];
            for (int j = 0; j <= i; ++j) {
                const int cj = j + m;
                const int L = std::min(i + 1, m);
                auto expr = [&](double x, int side) {
                    double sum = 0.0;
                    double sign = 1.0;
                    for (int l = 1; l <= L; ++l) {
                        sum += sign * ffb_deriv_eval_one_sided(spec, ci, m + l - 1, x, side) *
                               ffb_deriv_eval_one_sided(spec, cj, m - l, x, side);
                        sign = -sign;
                    }
                    return sum;
                };
                double v = expr(grid.b(), -1) - expr(s, +1);
                out.M(i, j) = v;
                out.M(j, i) = v;
            }
        }
    }

    // 2m-step recursion: m row steps then m column steps of scaled
    // differences, the last step of each half unscaled.
    Eigen::MatrixXd A = out.M;
    for (int l = 1; l <= m - 1; ++l) {
        Eigen::MatrixXd B(nm, nm);
        for (int i = 0; i < nm; ++i)
            for (int j = 0; j < nm; ++j)
                B(i, j) = (i <= m - l - 1)
                              ? A(i, j)
                              : (acc(A, i, j) - acc(A, i + 1, j)) * (2 * m - l) /
                                    (grid[i + m] - grid[i - (m - l)]);
        A = std::move(B);
    }
    {
        Eigen::MatrixXd B(nm, nm);
        for (int i = 0; i < nm; ++i)
            for (int j = 0; j < nm; ++j) B(i, j) = acc(A, i, j) - acc(A, i + 1, j);
        A = std::move(B);
    }
    for (int l = 1; l <= m - 1; ++l) {
        Eigen::MatrixXd B(nm, nm);
        for (int i = 0; i < nm; ++i)
            for (int j = 0; j < nm; ++j)
                B(i, j) = (j <= m - l - 1)
                              ? A(i, j)
                              : (acc(A, i, j) - acc(A, i, j + 1)) * (2 * m - l) /
                                    (grid[j + m] - grid[j - (m - l)]);
        A = std::move(B);
    }
    {
        Eigen::MatrixXd B(nm, nm);
        for (int i = 0; i < nm; ++i)
            for (int j = 0; j < nm; ++j) B(i, j) = acc(A, i, j) - acc(A, i, j + 1);
        A = std::move(B);
    }

    // The result must be banded with total bandwidth 2m-1.
    double scale = A.cwiseAbs().maxCoeff();
    for (int i = 0; i < nm; ++i)
        for (int j = 0; j < nm; ++j)
            if (std::abs(i - j) >= m && std::abs(A(i, j)) > 1e-9 * std::max(1.0, scale))
                throw std::runtime_error("sobolev_V: recursion did not produce the claimed bandwidth");

    out.V = BandedMatrix(nm, nm, m - 1, m - 1);
    for (int i = 0; i < nm; ++i)
        for (int j = std::max(0, i - (m - 1)); j <= std::min(nm - 1, i + (m - 1)); ++j)
            out.V.set(i, j, A(i, j));

    if (m <= 2) out.K_inv = k_matrix_inv(grid, m);
    return out;
}

BandedMatrix k_matrix_inv(const DesignGrid& grid, int m) {
    const int n = grid.size();
    if (m == 1) {
        Eigen::VectorXd d(n - 1);
        for (int i = 0; i < n - 1; ++i) d[i] = 1.0 / (grid[i + 1] - grid[i]);
        return BandedMatrix::diagonal(d);
    }
    if (m == 2) {
        if (n < 4) throw std::domain_error("k_matrix_inv: need n >= 4 for m=2");
        BandedMatrix K(n - 2, n - 2, 1, 1);
        for (int i = 0; i < n - 2; ++i) {
            K.set(i, i, 4.0 / (3.0 * (grid[i + 2] - grid[i])));
            if (i >= 1) {
                double off = 2.0 * (grid[i + 1] - grid[i]) /
                             (3.0 * (grid[i + 2] - grid[i]) * (grid[i + 1] - grid[i - 1]));
                K.set(i, i - 1, off);
                K.set(i - 1, i, off);
            }
        }
        return K;
    }
    throw std::domain_error("k_matrix_inv: only m in {1,2} is supported");
}

std::pair<double, double> spectral_similarity_check(const DesignGrid& grid) {
    const int n = grid.size();
    if (n < 4) throw std::domain_error("spectral_similarity_check: need n >= 4");
    BandedMatrix K2inv = k_matrix_inv(grid, 2);
    Eigen::VectorXd w(n - 2);
    for (int i = 0; i < n - 2; ++i) w[i] = (grid[i + 2] - grid[i]) / 2.0;
    BandedMatrix W = BandedMatrix::diagonal(w);
    BandedMatrix A = W.matmul(K2inv).matmul(W);

    std::mt19937_64 rng(0xD15C5EEDull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 200; ++rep) {
        Eigen::VectorXd u(n - 2);
        for (int i = 0; i < n - 2; ++i) u[i] = gauss(rng);
        double num = u.dot(A.multiply(u));
        double den = u.dot(W.multiply(u));
        double ratio = num / den;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    if (lo < 1.0 / 3.0 - 1e-9 || hi > 1.0 + 1e-9)
        throw std::runtime_error("spectral_similarity_check: sampled ratio escaped [1/3, 1]");
    return {lo, hi};
}

double basis_distance_check(const DesignGrid& grid, int k, int mesh_points) {
    const int n = grid.size();
    if (k < 0 || k > n - 1) throw std::domain_error("basis_distance_check: bad degree");
    if (k <= 1) return 0.0;  // the two bases coincide
    FFBasisSpec spec(grid, k);
    double delta = 0.0;
    for (int i = 0; i + 1 < n; ++i) delta = std::max(delta, grid[i + 1] - grid[i]);
    const double width = grid.b() - grid.a();
    double worst = 0.0;
    for (int j = k + 1; j < n; ++j) {
        const double knot = grid[j - 1];
        for (int t = 0; t < mesh_points; ++t) {
            double x = grid.a() + width * (t + 0.5) / mesh_points;
            double tp = 0.0;
            if (x > knot) {
                tp = 1.0;
                for (int l = 0; l < k; ++l) tp *= x - knot;
                tp /= factorial(k);
            }
            worst = std::max(worst, std::abs(tp - ffb_eval(spec, j, x)));
        }
    }
    double bound = k * std::pow(width, k - 1) / factorial(k - 1) * delta;
    if (worst > bound)
        throw std::runtime_error("basis_distance_check: sup-distance bound violated");
    return worst;
}

}  // namespace discspline
