#include "discspline/db_splines.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "discspline/divided_diff.hpp"

namespace discspline {

double DBSplineBasis::value(int i, int j) const {
    const Eigen::VectorXd& col = col_values[static_cast<size_t>(j)];
    int off = i - first_row[static_cast<size_t>(j)];
    if (off < 0 || off >= col.size()) return 0.0;
    return col[off];
}

Eigen::MatrixXd DBSplineBasis::to_dense() const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(spec.grid().size(), dim());
    for (int j = 0; j < dim(); ++j) {
        const auto& col = col_values[static_cast<size_t>(j)];
        for (int t = 0; t < col.size(); ++t) M(first_row[static_cast<size_t>(j)] + t, j) = col[t];
    }
    return M;
}

Eigen::VectorXd DBSplineBasis::multiply(const Eigen::VectorXd& coef) const {
    if (coef.size() != dim()) throw std::domain_error("DBSplineBasis::multiply size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(spec.grid().size());
    for (int j = 0; j < dim(); ++j) {
        const auto& col = col_values[static_cast<size_t>(j)];
        for (int t = 0; t < col.size(); ++t)
            y[first_row[static_cast<size_t>(j)] + t] += col[t] * coef[j];
    }
    return y;
}

Eigen::VectorXd DBSplineBasis::multiply_transpose(const Eigen::VectorXd& y) const {
    if (y.size() != spec.grid().size())
        throw std::domain_error("DBSplineBasis::multiply_transpose size mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (int j = 0; j < dim(); ++j) {
        const auto& col = col_values[static_cast<size_t>(j)];
        double s = 0.0;
        for (int t = 0; t < col.size(); ++t) s += col[t] * y[first_row[static_cast<size_t>(j)] + t];
        out[j] = s;
    }
    return out;
}

BandedMatrix DBSplineBasis::gram(const Eigen::VectorXd& w) const {
    auto window_end = [&](int j) {
        return first_row[static_cast<size_t>(j)] + static_cast<int>(col_values[static_cast<size_t>(j)].size());
    };
    int bw = 0;
    for (int j1 = 0; j1 < dim(); ++j1)
        for (int j2 = j1 + 1; j2 < dim(); ++j2)
            if (std::max(first_row[static_cast<size_t>(j1)], first_row[static_cast<size_t>(j2)]) <
                std::min(window_end(j1), window_end(j2)))
                bw = std::max(bw, j2 - j1);
    BandedMatrix G(dim(), dim(), bw, bw);
    for (int j1 = 0; j1 < dim(); ++j1) {
        for (int j2 = j1; j2 <= std::min(dim() - 1, j1 + bw); ++j2) {
            int lo = std::max(first_row[static_cast<size_t>(j1)], first_row[static_cast<size_t>(j2)]);
            int hi = std::min(window_end(j1), window_end(j2));
            double s = 0.0;
            for (int i = lo; i < hi; ++i) {
                double wi = (w.size() > 0) ? w[i] : 1.0;
                s += wi * value(i, j1) * value(i, j2);
            }
            G.set(j1, j2, s);
            if (j2 != j1) G.set(j2, j1, s);
        }
    }
    return G;
}

// Extended design points: the grid, then k+1 synthetic points past the right
// end, spaced by the mean gap (starting at b when b lies beyond the grid).
static std::vector<double> extend_right(const DesignGrid& g, int k) {
    const int n = g.size();
    std::vector<double> ext(g.points());
    double gap = g.mean_gap();
    double first = (g.b() > g[n - 1]) ? g.b() : g[n - 1] + gap;
    ext.push_back(first);
    for (int t = 1; t <= k; ++t) ext.push_back(first + t * gap);
    return ext;
}

DBSplineBasis dbs_values_dense(const DesignGrid& grid, int k, bool crosscheck) {
    const int n = grid.size();
    if (n < k + 2) throw std::domain_error("dbs_values_dense: need n >= k+2");
    DBSplineBasis basis{FFBasisSpec(grid, k), {}, {}, {}};
    basis.first_row.resize(static_cast<size_t>(n));
    basis.col_values.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        basis.first_row[static_cast<size_t>(j)] = j;
        basis.col_values[static_cast<size_t>(j)] = Eigen::VectorXd::Ones(1);
    }
    if (crosscheck) {
        // Divided-difference construction with synthetic boundary points
        // x_{-(k-1)} < ... < x_0 = a on the left and x_n past the right end:
        // the normalized truncated-Newton divided differences must hit the
        // identity at the design points.
        double gap = grid.mean_gap();
        double right = (grid.b() > grid[n - 1]) ? grid.b() : grid[n - 1] + gap;
        double left0 = (grid.a() < grid[0]) ? grid.a() : grid[0] - gap;  // the point just left of the grid
        auto pt = [&](int q) {  // extended point for q in [-k, n]
            if (q < 0) return left0 + (q + 1) * gap;
            if (q < n) return grid[q];
            return right;
        };
        for (int j = 0; j < n; ++j) {
            std::vector<double> centers(static_cast<size_t>(k) + 2);
            for (int t = 0; t <= k + 1; ++t) centers[static_cast<size_t>(t)] = pt(j - k + t);
            Centers cs(centers);
            double norm = pt(j + 1) - pt(j - k);
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd vals(k + 2);
                for (int t = 0; t <= k + 1; ++t) {
                    double z = pt(j - k + t);
                    double eta = 1.0;
                    for (int l = i - k + 1; l <= i; ++l) eta *= z - pt(l);
                    vals[t] = (z > grid[i]) ? eta : 0.0;
                }
                double v = norm * divided_difference(vals, cs);
                double want = (i == j) ? 1.0 : 0.0;
                if (std::abs(v - want) > 1e-8)
                    throw std::runtime_error("dbs_values_dense: divided-difference cross-check failed");
            }
        }
    }
    return basis;
}

DBSplineBasis dbs_values_sparse(const DesignGrid& grid, int k, const std::vector<int>& knot_idx) {
    const int n = grid.size();
    const int r = static_cast<int>(knot_idx.size());
    if (r < k + 2)
        throw std::domain_error("dbs_values_sparse: need at least k+2 knots for local support");
    FFBasisSpec spec(grid, k, knot_idx);  // validates the admissibility window
    if (spec.dense()) return dbs_values_dense(grid, k);

    std::vector<double> ext = extend_right(grid, k);
    const int next = static_cast<int>(ext.size());  // n + k + 1
    std::vector<int> kx = knot_idx;                 // extended knot indices
    for (int t = 0; t <= k; ++t) kx.push_back(n + t);
    std::vector<char> is_knot(static_cast<size_t>(next), 0);
    for (int q : kx) is_knot[static_cast<size_t>(q)] = 1;

    DBSplineBasis basis{spec, {}, {}, {ext.begin() + n, ext.end()}};
    const int dim = spec.dim();
    basis.first_row.resize(static_cast<size_t>(dim));
    basis.col_values.resize(static_cast<size_t>(dim));

    // One column's square local system: each window of k+2 consecutive
    // extended design points whose second-to-last point is not a knot gives a
    // vanishing divided difference; `one_at` is the single unit evaluation.
    auto solve_column = [&](const std::vector<int>& unknowns, int one_at,
                            const std::vector<int>& eq_last) -> Eigen::VectorXd {
        if (unknowns.size() != eq_last.size())
            throw std::logic_error("dbs_values_sparse: local system is not square");
        const int L = static_cast<int>(unknowns.size());
        if (L == 0) return Eigen::VectorXd();
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L, L);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L);
        for (int row = 0; row < L; ++row) {
            int p = eq_last[static_cast<size_t>(row)];
            std::vector<double> centers(static_cast<size_t>(k) + 2);
            for (int t = 0; t <= k + 1; ++t)
                centers[static_cast<size_t>(t)] = ext[static_cast<size_t>(p - k - 1 + t)];
            Eigen::VectorXd w = dd_weights(Centers(centers));
            for (int t = 0; t <= k + 1; ++t) {
                int q = p - k - 1 + t;
                auto it = std::lower_bound(unknowns.begin(), unknowns.end(), q);
                if (it != unknowns.end() && *it == q)
                    A(row, static_cast<int>(it - unknowns.begin())) += w[t];
                else if (q == one_at)
                    rhs[row] -= w[t];
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible())
            throw std::runtime_error("dbs_values_sparse: singular local system");
        return lu.solve(rhs);
    };

    // Left boundary columns j = 0..k: unit value at x_j, zeros around the
    // (j+1)-st knot and left of x_j.
    for (int j = 0; j <= k; ++j) {
        const int kj = knot_idx[static_cast<size_t>(j)];
        std::vector<int> unknowns;
        for (int q = j + 1; q <= kj - k; ++q) unknowns.push_back(q);
        std::vector<int> eq_last;
        for (int p = k + 1; p <= kj; ++p)
            if (!is_knot[static_cast<size_t>(p - 1)]) eq_last.push_back(p);
        Eigen::VectorXd sol = solve_column(unknowns, j, eq_last);
        int lo = j, hi = std::max(j, kj - k);
        Eigen::VectorXd col = Eigen::VectorXd::Zero(hi - lo + 1);
        col[0] = 1.0;
        for (size_t u = 0; u < unknowns.size(); ++u) col[unknowns[u] - lo] = sol[static_cast<int>(u)];
        basis.first_row[static_cast<size_t>(j)] = lo;
        basis.col_values[static_cast<size_t>(j)] = std::move(col);
    }

    // Middle and right columns j = k+1+t over the knot window kx[t..t+k+1];
    // unit value at the second knot of the window.
    for (int t = 0; t < r; ++t) {
        const int j = k + 1 + t;
        const int lo_knot = kx[static_cast<size_t>(t)];
        const int hi_knot = kx[static_cast<size_t>(t + k + 1)];
        const int one_at = kx[static_cast<size_t>(t + 1)];
        std::vector<int> unknowns;
        for (int q = lo_knot + 1; q <= hi_knot - k; ++q)
            if (q != one_at) unknowns.push_back(q);
        std::vector<int> eq_last;
        for (int p = lo_knot + 2; p <= hi_knot; ++p)
            if (!is_knot[static_cast<size_t>(p - 1)]) eq_last.push_back(p);
        Eigen::VectorXd sol = solve_column(unknowns, one_at, eq_last);
        int lo = lo_knot + 1;
        int hi = std::min(n - 1, hi_knot - k);
        Eigen::VectorXd col = Eigen::VectorXd::Zero(hi - lo + 1);
        if (one_at <= hi) col[one_at - lo] = 1.0;
        for (size_t u = 0; u < unknowns.size(); ++u) {
            int q = unknowns[u];
            if (q <= hi) col[q - lo] = sol[static_cast<int>(u)];
        }
        basis.first_row[static_cast<size_t>(j)] = lo;
        basis.col_values[static_cast<size_t>(j)] = std::move(col);
    }
    return basis;
}

double dbs_eval(const DBSplineBasis& basis, int j, double x) {
    const DesignGrid& g = basis.spec.grid();
    const int n = g.size();
    const int k = basis.spec.degree();
    if (j < 0 || j >= basis.dim()) throw std::domain_error("dbs_eval: index out of range");
    if (x < g.a() || x > g.b()) throw std::domain_error("dbs_eval: x outside [a,b]");

    // Support window.
    double lo, hi;
    if (basis.spec.dense()) {
        lo = (j <= k) ? g.a() : g[j - 1];
        hi = (j >= n - k - 1) ? g.b() : g[j + k];
    } else {
        const auto& kidx = basis.spec.knot_indices();
        const int r = static_cast<int>(kidx.size());
        if (j <= k) {
            lo = g.a();
            hi = g[kidx[static_cast<size_t>(j)]];
        } else {
            int t = j - k - 1;
            lo = g[kidx[static_cast<size_t>(t)]];
            hi = (t + k + 1 < r) ? g[kidx[static_cast<size_t>(t + k + 1)]] : g.b();
        }
    }
    if (x < lo || x > hi) return 0.0;

    if (basis.spec.dense()) {
        // Explicit falling factorial expansion of the column.
        Eigen::VectorXd acol = Eigen::VectorXd::Zero(n);
        acol[j] = 1.0;
        fast_h_mult(basis.spec, acol, HVariant::H_inv);
        double s = 0.0;
        for (int i = j; i <= std::min(j + k + 1, n - 1); ++i)
            s += acol[i] * ffb_eval(basis.spec, i, x);
        return s;
    }

    // Sparse: implicit interpolation of the stored design evaluations,
    // restricted to the local window of k+2 centers around x.
    const auto& pts = g.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), x);
    if (it != pts.end() && *it == x) return basis.value(static_cast<int>(it - pts.begin()), j);
    int clo;
    if (x < g[k]) {
        clo = 0;
    } else {
        int i = static_cast<int>(it - pts.begin());
        if (i >= n) i = n - 1;
        clo = i - k;
    }
    std::vector<double> centers(static_cast<size_t>(k) + 2);
    for (int t = 0; t <= k; ++t) centers[static_cast<size_t>(t)] = g[clo + t];
    centers[static_cast<size_t>(k) + 1] = x;
    Eigen::VectorXd w = dd_weights(Centers(centers));
    double s = 0.0;
    for (int t = 0; t <= k; ++t) s += w[t] * basis.value(clo + t, j);
    return -s / w[k + 1];
}

NaturalBasis natural_basis(const DesignGrid& grid, int k) {
    const int n = grid.size();
    if (k % 2 == 0) throw std::domain_error("natural_basis: degree must be odd");
    const int m = (k + 1) / 2;
    if (n < 2 * k + 2) throw std::domain_error("natural_basis: need n >= 2k+2");
    const int dim = n - k - 1;
    NaturalBasis nb{grid, k, Eigen::MatrixXd::Zero(n, dim)};
    // Left combinations: polynomial weights x_i^j over the first k+1
    // DB-splines (whose evaluations are the identity).
    for (int j = 0; j < m; ++j)
        for (int i = 0; i <= k; ++i) nb.values(i, j) = std::pow(grid[i], j);
    // Middle DB-splines.
    for (int j = k + 1; j <= n - k - 2; ++j) nb.values(j, m + (j - k - 1)) = 1.0;
    // Right combinations anchored at x_{n-k-2}.
    const int base = dim - m;
    for (int j = 0; j < m; ++j)
        for (int i = n - k - 1; i < n; ++i)
            nb.values(i, base + j) = std::pow(grid[i] - grid[n - k - 2], j);
    return nb;
}

Eigen::VectorXd project_ls(const Eigen::VectorXd& y, const DesignGrid& grid, int k,
                           const std::vector<int>& knot_idx, LsRoute route) {
    const int n = grid.size();
    if (y.size() != n) throw std::domain_error("project_ls: y length != n");
    FFBasisSpec sparse_spec(grid, k, knot_idx);

    if (route == LsRoute::FF) {
        Eigen::MatrixXd H(n, sparse_spec.dim());
        for (int j = 0; j < sparse_spec.dim(); ++j)
            for (int i = 0; i < n; ++i) H(i, j) = ffb_eval(sparse_spec, j, grid[i]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(H);
        if (qr.rank() < sparse_spec.dim())
            throw std::runtime_error("project_ls: rank-deficient system (route FF)");
        return H * qr.solve(y);
    }

    if (route == LsRoute::DD) {
        FFBasisSpec dense_spec(grid, k);
        // Rows of H^{-1} = Z^{k+1} B^{k+1} outside the retained column set.
        std::vector<char> in_J(static_cast<size_t>(n), 0);
        for (int j = 0; j < sparse_spec.dim(); ++j)
            in_J[static_cast<size_t>(sparse_spec.dense_column(j))] = 1;
        std::vector<int> Jc;
        for (int i = 0; i < n; ++i)
            if (!in_J[static_cast<size_t>(i)]) Jc.push_back(i);
        PenaltyOperators ops = build_penalty_ops(grid, k + 1);
        BandedMatrix A = BandedMatrix::diagonal(ops.Z).matmul(ops.B);
        BandedMatrix A2 = A.take_rows(Jc);
        BandedMatrix G = A2.transpose().gram(A2.transpose());  // A2 A2^T
        Eigen::VectorXd w;
        try {
            w = banded_solve(G, A2.multiply(y));
        } catch (const std::runtime_error&) {
            throw std::runtime_error("project_ls: rank-deficient system (route DD)");
        }
        return y - A2.multiply_transpose(w);
    }

    DBSplineBasis N = dbs_values_sparse(grid, k, knot_idx);
    BandedMatrix G = N.gram();
    Eigen::VectorXd coef;
    try {
        coef = banded_solve(G, N.multiply_transpose(y));
    } catch (const std::runtime_error&) {
        throw std::runtime_error("project_ls: rank-deficient system (route DB)");
    }
    return N.multiply(coef);
}

namespace {

double gram_condition(const Eigen::MatrixXd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0) return std::numeric_limits<double>::infinity();
    return lmax / lmin;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t m = v.size() / 2;
    if (v.size() % 2 == 1) return v[m];
    double a = v[m - 1], b = v[m];
    if (std::isinf(a) && std::isinf(b)) return a;
    return 0.5 * (a + b);
}

}  // namespace

std::vector<CondBenchRow> cond_benchmark(int n, int k, int r, const std::string& design,
                                         int reps, std::uint64_t seed,
                                         const std::vector<LsRoute>& routes) {
    if (n < 50) throw std::domain_error("cond_benchmark: n too small");
    if (design != "even" && design != "random")
        throw std::domain_error("cond_benchmark: design must be 'even' or 'random'");

    std::vector<std::vector<double>> kappa(routes.size(), std::vector<double>(static_cast<size_t>(reps)));

    auto run_rep = [&](int rep) {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(rep + 1));
        std::vector<double> pts(static_cast<size_t>(n));
        if (design == "even") {
            for (int i = 0; i < n; ++i) pts[static_cast<size_t>(i)] = static_cast<double>(i) / (n - 1);
        } else {
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (int i = 0; i < n; ++i) pts[static_cast<size_t>(i)] = unif(rng);
            std::sort(pts.begin(), pts.end());
        }
        DesignGrid grid(pts, 0.0, 1.0);
        // Knots drawn uniformly without replacement from the admissible window.
        std::vector<int> window;
        for (int i = k; i <= n - 2; ++i) window.push_back(i);
        std::shuffle(window.begin(), window.end(), rng);
        std::vector<int> knots(window.begin(), window.begin() + r);
        std::sort(knots.begin(), knots.end());

        FFBasisSpec spec(grid, k, knots);
        for (size_t rt = 0; rt < routes.size(); ++rt) {
            switch (routes[rt]) {
                case LsRoute::FF: {
                    Eigen::MatrixXd H(n, spec.dim());
                    for (int j = 0; j < spec.dim(); ++j)
                        for (int i = 0; i < n; ++i) H(i, j) = ffb_eval(spec, j, grid[i]);
                    kappa[rt][static_cast<size_t>(rep)] = gram_condition(H.transpose() * H);
                    break;
                }
                case LsRoute::DD: {
                    std::vector<char> in_J(static_cast<size_t>(n), 0);
                    for (int j = 0; j < spec.dim(); ++j)
                        in_J[static_cast<size_t>(spec.dense_column(j))] = 1;
                    std::vector<int> Jc;
                    for (int i = 0; i < n; ++i)
                        if (!in_J[static_cast<size_t>(i)]) Jc.push_back(i);
                    PenaltyOperators ops = build_penalty_ops(grid, k + 1);
                    BandedMatrix A2 = BandedMatrix::diagonal(ops.Z).matmul(ops.B).take_rows(Jc);
                    BandedMatrix G = A2.transpose().gram(A2.transpose());
                    kappa[rt][static_cast<size_t>(rep)] = gram_condition(G.to_dense());
                    break;
                }
                case LsRoute::DB: {
                    DBSplineBasis N = dbs_values_sparse(grid, k, knots);
                    kappa[rt][static_cast<size_t>(rep)] = gram_condition(N.gram().to_dense());
                    break;
                }
            }
        }
    };

    // Deterministic per-repetition seeding; repetitions fan out over threads.
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(reps));
    std::vector<std::thread> pool;
    std::atomic<int> next_rep{0};
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int rep = next_rep.fetch_add(1);
                if (rep >= reps) return;
                run_rep(rep);
            }
        });
    for (auto& th : pool) th.join();

    std::vector<CondBenchRow> rows;
    for (size_t rt = 0; rt < routes.size(); ++rt) {
        double med = median_of(kappa[rt]);
        std::vector<double> dev;
        for (double v : kappa[rt]) {
            if (std::isinf(v) && std::isinf(med)) dev.push_back(0.0);
            else dev.push_back(std::abs(v - med));
        }
        std::string name = routes[rt] == LsRoute::FF ? "FF" : routes[rt] == LsRoute::DD ? "DD" : "DB";
        rows.push_back({n, design, name, med, median_of(dev)});
    }
    return rows;
}

}  // namespace discspline
