#include "discspline/ff_basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "discspline/divided_diff.hpp"

namespace discspline {

static double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

FFBasisSpec::FFBasisSpec(DesignGrid grid, int degree)
    : grid_(std::move(grid)), k_(degree), dense_(true) {
    if (k_ < 0 || k_ > grid_.size() - 1) throw std::domain_error("FFBasisSpec: bad degree");
    knots_.resize(static_cast<size_t>(grid_.size() - k_ - 1));
    for (size_t j = 0; j < knots_.size(); ++j) knots_[j] = k_ + static_cast<int>(j);
}

FFBasisSpec::FFBasisSpec(DesignGrid grid, int degree, std::vector<int> knot_idx)
    : grid_(std::move(grid)), k_(degree), dense_(false), knots_(std::move(knot_idx)) {
    if (k_ < 0 || k_ > grid_.size() - 1) throw std::domain_error("FFBasisSpec: bad degree");
    if (knots_.empty()) throw std::domain_error("FFBasisSpec: need at least one knot");
    for (size_t j = 0; j < knots_.size(); ++j) {
        if (j > 0 && knots_[j] <= knots_[j - 1])
            throw std::domain_error("FFBasisSpec: knot indices must increase");
        if (knots_[j] < k_ || knots_[j] > grid_.size() - 2)
            throw std::domain_error("FFBasisSpec: knot outside the admissible window");
    }
    // The dense knot set is just that; normalize.
    dense_ = (static_cast<int>(knots_.size()) == grid_.size() - k_ - 1);
}

int FFBasisSpec::dim() const { return static_cast<int>(knots_.size()) + k_ + 1; }

int FFBasisSpec::dense_column(int j) const {
    if (j < 0 || j >= dim()) throw std::domain_error("FFBasisSpec: basis index out of range");
    if (j <= k_) return j;
    return knots_[static_cast<size_t>(j - k_ - 1)] + 1;
}

double ffb_eval(const FFBasisSpec& spec, int j, double x) {
    const DesignGrid& g = spec.grid();
    const int k = spec.degree();
    if (x < g.a() || x > g.b()) throw std::domain_error("ffb_eval: x outside [a,b]");
    const int col = spec.dense_column(j);  // validates j
    if (col <= k) {
        double p = 1.0;
        for (int l = 0; l < col; ++l) p *= x - g[l];
        return p / factorial(col);
    }
    // Truncated Newton polynomial with knot at x_{col-1}.
    if (!(x > g[col - 1])) return 0.0;
    double p = 1.0;
    for (int l = col - k; l < col; ++l) p *= x - g[l];
    return p / factorial(k);
}

// Elementary symmetric polynomial values e_0..e_rmax of the given factors.
static std::vector<double> elem_symmetric(const std::vector<double>& factors, int rmax) {
    std::vector<double> e(static_cast<size_t>(rmax) + 1, 0.0);
    e[0] = 1.0;
    for (double f : factors)
        for (int r = rmax; r >= 1; --r) e[static_cast<size_t>(r)] += f * e[static_cast<size_t>(r - 1)];
    return e;
}

static double ffb_deriv_impl(const FFBasisSpec& spec, int j, int d, double x, int side) {
    const DesignGrid& g = spec.grid();
    const int k = spec.degree();
    if (x < g.a() || x > g.b()) throw std::domain_error("ffb_deriv_eval: x outside [a,b]");
    if (d < 0 || d > k) throw std::domain_error("ffb_deriv_eval: derivative order out of range");
    const int col = spec.dense_column(j);
    if (col <= k) {
        // Polynomial member of degree col.
        if (d > col) return 0.0;
        std::vector<double> factors(static_cast<size_t>(col));
        for (int l = 0; l < col; ++l) factors[static_cast<size_t>(l)] = x - g[l];
        auto e = elem_symmetric(factors, col - d);
        return factorial(d) / factorial(col) * e[static_cast<size_t>(col - d)];
    }
    const double knot = g[col - 1];
    const bool active = (side > 0) ? (x >= knot) : (x > knot);
    if (!active) return 0.0;
    std::vector<double> factors(static_cast<size_t>(k));
    for (int l = col - k; l < col; ++l) factors[static_cast<size_t>(l - (col - k))] = x - g[l];
    auto e = elem_symmetric(factors, k - d);
    return factorial(d) / factorial(k) * e[static_cast<size_t>(k - d)];
}

double ffb_deriv_eval(const FFBasisSpec& spec, int j, int d, double x) {
    return ffb_deriv_impl(spec, j, d, x, -1);
}

double ffb_deriv_eval_one_sided(const FFBasisSpec& spec, int j, int d, double x, int side) {
    return ffb_deriv_impl(spec, j, d, x, side);
}

PenaltyOperators build_penalty_ops(const DesignGrid& grid, int m) {
    const int n = grid.size();
    if (m < 1 || m > n - 1) throw std::domain_error("build_penalty_ops: order out of range");
    PenaltyOperators ops;
    ops.order = m;

    // Extended matrix via the recursion B^1 = Z^{-1} Bbar_{n,1},
    // B^k = (Z^k)^{-1} Bbar_{n,k} B^{k-1}.
    BandedMatrix B(n, n, 1, 0);
    B.set(0, 0, 1.0);
    for (int i = 1; i < n; ++i) {
        double w = grid[i] - grid[i - 1];
        B.set(i, i - 1, -1.0 / w);
        B.set(i, i, 1.0 / w);
    }
    for (int ord = 2; ord <= m; ++ord) {
        BandedMatrix Bbar(n, n, 1, 0);  // identity head of size ord, simple differences below
        for (int i = 0; i < ord; ++i) Bbar.set(i, i, 1.0);
        for (int i = ord; i < n; ++i) {
            Bbar.set(i, i, 1.0);
            Bbar.set(i, i - 1, -1.0);
        }
        BandedMatrix next = Bbar.matmul(B);
        for (int i = ord; i < n; ++i) {
            double w = (grid[i] - grid[i - ord]) / ord;
            for (int c = std::max(0, i - next.lower_bw()); c <= i; ++c) {
                double v = next(i, c);
                if (v != 0.0) next.set(i, c, v / w);
            }
        }
        // Trim to the structural band of width ord+1.
        BandedMatrix trimmed(n, n, ord, 0);
        for (int i = 0; i < n; ++i)
            for (int c = std::max(0, i - ord); c <= i; ++c)
                if (next(i, c) != 0.0) trimmed.set(i, c, next(i, c));
        B = std::move(trimmed);
    }
    ops.B = B;

    std::vector<int> tail(static_cast<size_t>(n - m));
    for (int i = 0; i < n - m; ++i) tail[static_cast<size_t>(i)] = m + i;
    ops.D = B.take_rows(tail);

    ops.W.resize(n - m);
    for (int i = 0; i < n - m; ++i) ops.W[i] = (grid[i + m] - grid[i]) / m;
    ops.Z.resize(n);
    for (int i = 0; i < n; ++i) ops.Z[i] = (i < m) ? 1.0 : (grid[i] - grid[i - m]) / m;

    ops.C = BandedMatrix::diagonal(ops.W).matmul(ops.D);
    return ops;
}

void fast_h_mult(const FFBasisSpec& spec, Eigen::VectorXd& v, HVariant variant,
                 FlopCount* flops) {
    if (!spec.dense())
        throw std::domain_error("fast_h_mult: dense knot set required (use the submatrix identity)");
    const DesignGrid& g = spec.grid();
    const int n = g.size();
    const int k = spec.degree();
    if (v.size() != n) throw std::domain_error("fast_h_mult: vector length != n");
    FlopCount local;
    FlopCount& fc = flops ? *flops : local;

    // Gap scale vectors (x_{(i+1):n} - x_{1:(n-i)})/i depend only on the grid
    // and are precomputable; only their application counts toward the budget.
    std::vector<Eigen::VectorXd> scale(static_cast<size_t>(k) + 1);
    for (int i = 1; i <= k; ++i) {
        scale[static_cast<size_t>(i)].resize(n - i);
        for (int t = i; t < n; ++t)
            scale[static_cast<size_t>(i)][t - i] = (g[t] - g[t - i]) / i;
    }
    auto scale_up = [&](int i) {
        for (int t = i; t < n; ++t) {
            v[t] *= scale[static_cast<size_t>(i)][t - i];
            fc.mults++;
        }
    };
    auto scale_down = [&](int i) {
        for (int t = i; t < n; ++t) {
            v[t] /= scale[static_cast<size_t>(i)][t - i];
            fc.divs++;
        }
    };

    switch (variant) {
        case HVariant::H:
            for (int i = k; i >= 0; --i) {
                for (int t = i + 1; t < n; ++t) { v[t] += v[t - 1]; fc.adds++; }
                if (i != 0) scale_up(i);
            }
            break;
        case HVariant::H_inv:
            for (int i = 0; i <= k; ++i) {
                if (i != 0) scale_down(i);
                for (int t = n - 1; t >= i + 1; --t) { v[t] -= v[t - 1]; fc.subs++; }
            }
            break;
        case HVariant::H_T:
            for (int i = 0; i <= k; ++i) {
                if (i != 0) scale_up(i);
                for (int t = n - 2; t >= i; --t) { v[t] += v[t + 1]; fc.adds++; }
            }
            break;
        case HVariant::H_inv_T:
            for (int i = k; i >= 0; --i) {
                // Reverse difference lands in positions [i, n-1); the last entry is kept.
                for (int t = i; t <= n - 2; ++t) { v[t] -= v[t + 1]; fc.subs++; }
                if (i != 0) scale_down(i);
            }
            break;
    }
}

Eigen::MatrixXd dense_basis_matrix(const FFBasisSpec& spec) {
    const int n = spec.grid().size();
    if (n > 2000) throw std::domain_error("dense_basis_matrix: verification path capped at n <= 2000");
    Eigen::MatrixXd H(n, spec.dim());
    for (int j = 0; j < spec.dim(); ++j)
        for (int i = 0; i < n; ++i) H(i, j) = ffb_eval(spec, j, spec.grid()[i]);
    return H;
}

double verify_inverse_identity(const DesignGrid& grid, int k) {
    // Verification-only path: the products mix entries of size 1/gap^{k+1}
    // cancelling to 0/1, so everything runs in extended precision to keep the
    // check's own rounding below the gate.
    const int n = grid.size();
    using ld = long double;
    std::vector<ld> x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = grid[i];

    // Extended derivative rows of order k+1: row p holds ord! times the
    // divided difference weights over the trailing window.
    auto b_row = [&](int p, std::vector<ld>& w, int& lo) {
        int ord = std::min(p, k + 1);
        lo = p - ord;
        w.assign(static_cast<size_t>(ord) + 1, 0.0L);
        ld fact = 1.0L;
        for (int t = 2; t <= ord; ++t) fact *= t;
        for (int t = 0; t <= ord; ++t) {
            ld denom = 1.0L;
            for (int s = 0; s <= ord; ++s)
                if (s != t) denom *= x[static_cast<size_t>(lo + t)] - x[static_cast<size_t>(lo + s)];
            w[static_cast<size_t>(t)] = fact / denom;
        }
    };

    double dev = 0.0;
    std::vector<ld> col(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        // column of the basis matrix via the in-place cumulative sums
        for (int i = 0; i < n; ++i) col[static_cast<size_t>(i)] = (i == j) ? 1.0L : 0.0L;
        for (int i = k; i >= 0; --i) {
            for (int t = i + 1; t < n; ++t) col[static_cast<size_t>(t)] += col[static_cast<size_t>(t - 1)];
            if (i != 0)
                for (int t = i; t < n; ++t)
                    col[static_cast<size_t>(t)] *= (x[static_cast<size_t>(t)] - x[static_cast<size_t>(t - i)]) / i;
        }
        for (int p = 0; p < n; ++p) {
            std::vector<ld> w;
            int lo;
            b_row(p, w, lo);
            ld acc = 0.0L;
            for (size_t t = 0; t < w.size(); ++t) acc += w[t] * col[static_cast<size_t>(lo) + t];
            ld z = (p < k + 1) ? 1.0L
                               : (x[static_cast<size_t>(p)] - x[static_cast<size_t>(p - k - 1)]) / (k + 1);
            ld entry = z * acc - (p == j ? 1.0L : 0.0L);
            dev = std::max(dev, static_cast<double>(entry < 0 ? -entry : entry));
        }
    }
    return dev;
}

}  // namespace discspline
