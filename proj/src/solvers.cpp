#include "discspline/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "discspline/banded.hpp"
#include "discspline/db_splines.hpp"
#include "discspline/ff_basis.hpp"
#include "discspline/functionals.hpp"

namespace discspline {

Eigen::VectorXd tv_denoise_1d(const Eigen::VectorXd& b, double gamma) {
    const int n = static_cast<int>(b.size());
    if (n == 0) throw std::domain_error("tv_denoise_1d: empty input");
    if (gamma < 0.0) throw std::domain_error("tv_denoise_1d: negative penalty");
    if (n == 1 || gamma == 0.0) return b;

    // Taut string through the tube [W_t - gamma, W_t + gamma] around the
    // prefix sums, pinned at (0,0) and (n, W_n); the solution is its slope
    // sequence. Hulls are rebuilt from the anchor after each committed
    // segment.
    Eigen::VectorXd W(n + 1);
    W[0] = 0.0;
    for (int t = 0; t < n; ++t) W[t + 1] = W[t] + b[t];

    Eigen::VectorXd z(n);
    int at = 0;        // anchor index
    double ay = 0.0;   // anchor height

    std::vector<std::pair<int, double>> gcm, lcm;  // breakpoints (t, height)
    auto slope = [&](const std::pair<int, double>& p, const std::pair<int, double>& q) {
        return (q.second - p.second) / (q.first - p.first);
    };

    while (at < n) {
        gcm.clear();
        lcm.clear();
        bool committed = false;
        for (int t = at + 1; t <= n && !committed; ++t) {
            double uy = (t == n) ? W[n] : W[t] + gamma;
            double ly = (t == n) ? W[n] : W[t] - gamma;
            // Convex minorant of the upper tube: slopes increase.
            gcm.emplace_back(t, uy);
            while (gcm.size() >= 2) {
                auto& p2 = gcm[gcm.size() - 1];
                auto& p1 = gcm[gcm.size() - 2];
                std::pair<int, double> p0 =
                    (gcm.size() >= 3) ? gcm[gcm.size() - 3] : std::make_pair(at, ay);
                if (slope(p0, p1) >= slope(p1, p2))
                    gcm.erase(gcm.end() - 2);
                else
                    break;
            }
            // Concave majorant of the lower tube: slopes decrease.
            lcm.emplace_back(t, ly);
            while (lcm.size() >= 2) {
                auto& p2 = lcm[lcm.size() - 1];
                auto& p1 = lcm[lcm.size() - 2];
                std::pair<int, double> p0 =
                    (lcm.size() >= 3) ? lcm[lcm.size() - 3] : std::make_pair(at, ay);
                if (slope(p0, p1) <= slope(p1, p2))
                    lcm.erase(lcm.end() - 2);
                else
                    break;
            }
            double su = slope({at, ay}, gcm.front());
            double sl = slope({at, ay}, lcm.front());
            if (su < sl) {
                // The string is forced to a bound; the earlier breakpoint binds.
                bool upper = gcm.front().first < lcm.front().first;
                auto bp = upper ? gcm.front() : lcm.front();
                double s = upper ? su : sl;
                for (int q = at; q < bp.first; ++q) z[q] = s;
                at = bp.first;
                ay = bp.second;
                committed = true;
            }
        }
        if (!committed) {
            double s = (W[n] - ay) / (n - at);
            for (int q = at; q < n; ++q) z[q] = s;
            at = n;
        }
    }
    return z;
}

namespace {

// Dual certificate residual for 1/2||y - theta||^2 + lambda ||C theta||_1:
// fit the unconstrained multiplier, then measure stationarity, box
// feasibility, and sign agreement on the active rows.
// Least-squares multiplier fit with a tiny ridge: the Gram may be singular
// (e.g. the reduced natural-spline operator has a polynomial null space).
Eigen::VectorXd ridge_gram_solve(const BandedMatrix& G, const Eigen::VectorXd& rhs) {
    double scale = 0.0;
    for (int i = 0; i < G.rows(); ++i) scale = std::max(scale, std::abs(G(i, i)));
    BandedMatrix R(G.rows(), G.cols(), G.lower_bw(), G.upper_bw());
    for (int i = 0; i < G.rows(); ++i)
        for (int j = std::max(0, i - G.lower_bw()); j <= std::min(G.cols() - 1, i + G.upper_bw()); ++j)
            R.set(i, j, G(i, j) + (i == j ? 1e-12 * std::max(1.0, scale) : 0.0));
    return banded_solve(R, rhs);
}

double tf_kkt_residual(const Eigen::VectorXd& y, const Eigen::VectorXd& theta, double lambda,
                       const BandedMatrix& C, const std::vector<int>& active,
                       Eigen::VectorXd* multiplier = nullptr) {
    Eigen::VectorXd v = y - theta;
    BandedMatrix G = C.transpose().gram(C.transpose());  // C C^T
    Eigen::VectorXd u = ridge_gram_solve(G, C.multiply(v));
    double r = (v - C.multiply_transpose(u)).lpNorm<Eigen::Infinity>();
    double box = std::max(0.0, u.lpNorm<Eigen::Infinity>() - lambda);
    double sign_res = 0.0;
    Eigen::VectorXd c = C.multiply(theta);
    for (int i : active) sign_res = std::max(sign_res, std::abs(u[i] - lambda * (c[i] > 0 ? 1.0 : -1.0)));
    if (multiplier) *multiplier = u;
    return std::max({r, box, sign_res});
}

std::vector<int> active_rows(const Eigen::VectorXd& c) {
    double scale = std::max(1.0, c.lpNorm<Eigen::Infinity>());
    std::vector<int> act;
    for (int i = 0; i < c.size(); ++i)
        if (std::abs(c[i]) > 1e-8 * scale) act.push_back(i);
    return act;
}

// Projection of y onto the space of degree-k discrete splines with the given
// knots (possibly none, meaning plain degree-k polynomials): the banded
// system in the non-knot rows of the extended inverse.
Eigen::VectorXd project_dd(const Eigen::VectorXd& y, const DesignGrid& grid, int k,
                           const std::vector<int>& knot_idx) {
    const int n = grid.size();
    std::vector<char> in_J(static_cast<size_t>(n), 0);
    for (int j = 0; j <= k; ++j) in_J[static_cast<size_t>(j)] = 1;
    for (int q : knot_idx) in_J[static_cast<size_t>(q + 1)] = 1;
    std::vector<int> Jc;
    for (int i = 0; i < n; ++i)
        if (!in_J[static_cast<size_t>(i)]) Jc.push_back(i);
    if (Jc.empty()) return y;
    PenaltyOperators ops = build_penalty_ops(grid, k + 1);
    BandedMatrix A2 = BandedMatrix::diagonal(ops.Z).matmul(ops.B).take_rows(Jc);
    BandedMatrix G = A2.transpose().gram(A2.transpose());
    Eigen::VectorXd w = banded_solve(G, A2.multiply(y));
    return y - A2.multiply_transpose(w);
}

// theta-update system N^T (I + rho D^T D) N for the working-set mode.
BandedMatrix db_theta_gram(const DBSplineBasis& N, const BandedMatrix& S) {
    const int n = S.rows();
    const int dim = N.dim();
    // Column windows of S*N grow by the bandwidth of S.
    std::vector<Eigen::VectorXd> sn(static_cast<size_t>(dim));
    std::vector<int> sn_first(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        int f = N.first_row[static_cast<size_t>(j)];
        int e = f + static_cast<int>(N.col_values[static_cast<size_t>(j)].size());
        int lo = std::max(0, f - S.lower_bw());
        int hi = std::min(n, e + S.upper_bw());
        Eigen::VectorXd col = Eigen::VectorXd::Zero(hi - lo);
        for (int i = lo; i < hi; ++i) {
            double s = 0.0;
            for (int c = std::max(f, i - S.lower_bw()); c < std::min(e, i + S.upper_bw() + 1); ++c)
                s += S(i, c) * N.value(c, j);
            col[i - lo] = s;
        }
        sn[static_cast<size_t>(j)] = std::move(col);
        sn_first[static_cast<size_t>(j)] = lo;
    }
    int bw = 0;
    for (int j1 = 0; j1 < dim; ++j1)
        for (int j2 = j1 + 1; j2 < dim; ++j2) {
            int lo = std::max(N.first_row[static_cast<size_t>(j1)], sn_first[static_cast<size_t>(j2)]);
            int hi = std::min(N.first_row[static_cast<size_t>(j1)] +
                                  static_cast<int>(N.col_values[static_cast<size_t>(j1)].size()),
                              sn_first[static_cast<size_t>(j2)] +
                                  static_cast<int>(sn[static_cast<size_t>(j2)].size()));
            if (lo < hi) bw = std::max(bw, j2 - j1);
        }
    BandedMatrix G(dim, dim, bw, bw);
    for (int j1 = 0; j1 < dim; ++j1)
        for (int j2 = std::max(0, j1 - bw); j2 <= std::min(dim - 1, j1 + bw); ++j2) {
            int lo = std::max(N.first_row[static_cast<size_t>(j1)], sn_first[static_cast<size_t>(j2)]);
            int hi = std::min(N.first_row[static_cast<size_t>(j1)] +
                                  static_cast<int>(N.col_values[static_cast<size_t>(j1)].size()),
                              sn_first[static_cast<size_t>(j2)] +
                                  static_cast<int>(sn[static_cast<size_t>(j2)].size()));
            double s = 0.0;
            for (int i = lo; i < hi; ++i)
                s += N.value(i, j1) * sn[static_cast<size_t>(j2)][i - sn_first[static_cast<size_t>(j2)]];
            G.set(j1, j2, s);
        }
    return G;
}

struct AdmmState {
    Eigen::VectorXd theta, z, u;
    int iters = 0;
    bool converged = false;
    double primal = 0.0, dual = 0.0;
    std::vector<double> primal_history;
};

}  // namespace

FitResult trend_filter(const Eigen::VectorXd& y, const DesignGrid& grid, int k,
                       const SolverConfig& cfg) {
    const int n = grid.size();
    if (y.size() != n) throw std::domain_error("trend_filter: y length != n");
    if (k < 0 || k > n - 2) throw std::domain_error("trend_filter: degree out of range");
    const double lambda = cfg.lambda;
    if (lambda < 0.0) throw std::domain_error("trend_filter: negative lambda");

    PenaltyOperators full = build_penalty_ops(grid, k + 1);
    auto finish = [&](Eigen::VectorXd theta, const AdmmState* st) {
        FitResult out;
        Eigen::VectorXd c = full.C.multiply(theta);
        if (st) {
            // The z-block of the splitting is exactly piecewise constant, so
            // its jump set identifies the active rows crisply; thresholding
            // C theta instead would pick up solver noise.
            Eigen::VectorXd dz(st->z.size() - 1);
            for (int i = 0; i + 1 < st->z.size(); ++i) dz[i] = st->z[i + 1] - st->z[i];
            double zs = std::max(1.0, dz.lpNorm<Eigen::Infinity>());
            out.active_set.clear();
            for (int i = 0; i < dz.size(); ++i)
                if (std::abs(dz[i]) > 1e-12 * zs) out.active_set.push_back(i);
        } else {
            out.active_set = active_rows(c);
        }
        if (cfg.polish && lambda > 0.0) {
            // y - lambda C_I^T sign(...) projected onto the active-knot space.
            Eigen::VectorXd signs = Eigen::VectorXd::Zero(c.size());
            for (int i : out.active_set) signs[i] = lambda * (c[i] > 0 ? 1.0 : -1.0);
            Eigen::VectorXd adj = full.C.multiply_transpose(signs);
            std::vector<int> knots;
            for (int i : out.active_set) knots.push_back(i + k);
            Eigen::VectorXd polished;
            if (static_cast<int>(knots.size()) >= k + 2) {
                DBSplineBasis N = dbs_values_sparse(grid, k, knots);
                BandedMatrix G = N.gram();
                polished = N.multiply(banded_solve(G, N.multiply_transpose(y - adj)));
            } else {
                polished = project_dd(y - adj, grid, k, knots);
            }
            // The closed form is exact only for the true active set and
            // signs; a misidentified set can hurt, so keep the polish only
            // when it does not raise the objective.
            auto obj = [&](const Eigen::VectorXd& th) {
                return 0.5 * (y - th).squaredNorm() + lambda * full.C.multiply(th).lpNorm<1>();
            };
            if (obj(polished) <= obj(theta)) {
                theta = polished;
                c = full.C.multiply(theta);
                out.active_set = active_rows(c);
            }
        }
        out.theta_hat = theta;
        out.penalty = c.lpNorm<1>();
        out.objective = 0.5 * (y - theta).squaredNorm() + lambda * out.penalty;
        out.kkt_residual = (lambda > 0.0)
                               ? tf_kkt_residual(y, theta, lambda, full.C, out.active_set)
                               : (y - theta).lpNorm<Eigen::Infinity>();
        if (st) {
            out.iters = st->iters;
            out.converged = st->converged;
            out.primal_residual = st->primal;
            out.dual_residual = st->dual;
            out.primal_residual_history = st->primal_history;
        }
        return out;
    };

    if (lambda == 0.0) return finish(y, nullptr);
    if (k == 0) {
        // Plain total variation denoising: the weighted operator reduces to
        // simple differences, solved exactly.
        return finish(tv_denoise_1d(y, lambda), nullptr);
    }
    {
        // Beyond the critical penalty weight the solution is exactly the
        // degree-k polynomial projection; certified by the dual fit, whose
        // residual vanishes because y minus its projection lies in row(C^T).
        BandedMatrix G = full.C.transpose().gram(full.C.transpose());
        Eigen::VectorXd ustar = ridge_gram_solve(G, full.C.multiply(y));
        if (ustar.lpNorm<Eigen::Infinity>() <= lambda)
            return finish(project_dd(y, grid, k, {}), nullptr);
    }

    // The iteration runs on a unit-mean-gap reparametrization of the design:
    // with x' = c x, the weighted operator picks up c^{-k}, so lambda' =
    // lambda c^k leaves the objective unchanged while the difference matrices
    // stay near unit scale. The returned fit is identical either way.
    const double cscale = (n - 1) / (grid[n - 1] - grid[0]);
    std::vector<double> spts(grid.points());
    for (double& p : spts) p *= cscale;
    DesignGrid sgrid(spts, grid.a() * cscale, grid.b() * cscale);
    const double lam = lambda * std::pow(cscale, k);
    const double rho = (cfg.rho > 0.0 ? cfg.rho : lambda) * std::pow(cscale, k);

    PenaltyOperators lower = build_penalty_ops(sgrid, k);
    const BandedMatrix& D = lower.D;  // (n-k) x n

    // Solves (I + rho D^T D) theta = r through the dual-sized system
    // (rho^{-1} I + D D^T) w = D r, theta = r - D^T w; the dual form keeps
    // the pivot range independent of rho.
    BandedMatrix S = D.transpose().gram(D.transpose());  // D D^T
    for (int i = 0; i < n - k; ++i) S.add(i, i, 1.0 / rho);
    BandedCholesky Sfac(S);
    auto theta_solve = [&](const Eigen::VectorXd& r) {
        return Eigen::VectorXd(r - D.multiply_transpose(Sfac.solve(D.multiply(r))));
    };

    // I + rho D^T D in banded form, used by the working-set variant.
    BandedMatrix Q = D.gram(D);
    BandedMatrix M(n, n, Q.lower_bw(), Q.upper_bw());
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - Q.lower_bw()); j <= std::min(n - 1, i + Q.upper_bw()); ++j)
            M.set(i, j, rho * Q(i, j) + (i == j ? 1.0 : 0.0));

    const double eps_abs = cfg.tol_primal;
    const double eps_abs_dual = cfg.tol_dual;
    const double eps_rel = 1e-6;

    auto run_admm = [&](AdmmState& st, const DBSplineBasis* Nws) {
        BandedMatrix Gws;
        bool has_ws = (Nws != nullptr);
        BandedCholesky* ws_fac = nullptr;
        std::unique_ptr<BandedCholesky> ws_fac_holder;
        if (has_ws) {
            Gws = db_theta_gram(*Nws, M);
            ws_fac_holder = std::make_unique<BandedCholesky>(Gws);
            ws_fac = ws_fac_holder.get();
        }
        for (; st.iters < cfg.max_iter; ) {
            st.iters++;
            Eigen::VectorXd rhs = y + rho * D.multiply_transpose(st.z + st.u);
            if (has_ws)
                st.theta = Nws->multiply(ws_fac->solve(Nws->multiply_transpose(rhs)));
            else
                st.theta = theta_solve(rhs);
            Eigen::VectorXd Dth = D.multiply(st.theta);
            Eigen::VectorXd z_old = st.z;
            st.z = tv_denoise_1d(Dth - st.u, lam / rho);
            st.u += st.z - Dth;
            st.primal = (st.z - Dth).norm();
            st.dual = rho * D.multiply_transpose(st.z - z_old).norm();
            st.primal_history.push_back(st.primal);
            double eps_pri = std::sqrt(static_cast<double>(n - k)) * eps_abs +
                             eps_rel * std::max(st.z.norm(), Dth.norm());
            double eps_dua = std::sqrt(static_cast<double>(n)) * eps_abs_dual +
                             eps_rel * rho * D.multiply_transpose(st.u).norm();
            if (st.primal <= eps_pri && st.dual <= eps_dua) {
                st.converged = true;
                break;
            }
        }
    };

    AdmmState st;
    st.theta = y;
    st.z = D.multiply(st.theta);
    st.u = Eigen::VectorXd::Zero(n - k);

    if (!cfg.db_admm) {
        run_admm(st, nullptr);
        return finish(st.theta, &st);
    }

    // Working-active-set mode: a short standard warm-up picks the set, the
    // theta-update then runs through the DB-spline basis on those knots; a
    // full KKT check expands the set and reruns until it passes.
    int warmup = std::min(20, cfg.max_iter);
    for (int it = 0; it < warmup; ++it) {
        Eigen::VectorXd rhs = y + rho * D.multiply_transpose(st.z + st.u);
        st.theta = theta_solve(rhs);
        Eigen::VectorXd Dth = D.multiply(st.theta);
        st.z = tv_denoise_1d(Dth - st.u, lam / rho);
        st.u += st.z - Dth;
        st.primal = (st.z - Dth).norm();
        st.primal_history.push_back(st.primal);
        st.iters++;
    }
    std::vector<char> in_ws(static_cast<size_t>(n - k - 1), 0);
    auto ws_from_z = [&]() {
        Eigen::VectorXd dz(st.z.size() - 1);
        for (int i = 0; i + 1 < st.z.size(); ++i) dz[i] = st.z[i + 1] - st.z[i];
        for (int i : active_rows(dz)) in_ws[static_cast<size_t>(i)] = 1;
    };
    ws_from_z();
    for (int round = 0; round < n; ++round) {
        std::vector<int> knots;
        for (int i = 0; i < n - k - 1; ++i)
            if (in_ws[static_cast<size_t>(i)]) knots.push_back(i + k);
        if (static_cast<int>(knots.size()) < k + 2 || static_cast<int>(knots.size()) == n - k - 1) {
            run_admm(st, nullptr);  // set too small or already full: plain updates
        } else {
            DBSplineBasis N = dbs_values_sparse(sgrid, k, knots);
            st.converged = false;
            run_admm(st, &N);
        }
        // Full-problem KKT check; expand by the violating rows once per round.
        Eigen::VectorXd c = full.C.multiply(st.theta);
        Eigen::VectorXd mult;
        double res = tf_kkt_residual(y, st.theta, lambda, full.C, active_rows(c), &mult);
        bool ok = res <= 1e-6 * std::max(1.0, y.lpNorm<Eigen::Infinity>());
        if (ok) break;
        bool grew = false;
        for (int i = 0; i < mult.size(); ++i)
            if (std::abs(mult[i]) > lambda * (1.0 + 1e-9) && !in_ws[static_cast<size_t>(i)]) {
                in_ws[static_cast<size_t>(i)] = 1;
                grew = true;
            }
        for (int i : active_rows(c))
            if (!in_ws[static_cast<size_t>(i)]) {
                in_ws[static_cast<size_t>(i)] = 1;
                grew = true;
            }
        if (!grew) break;
    }
    return finish(st.theta, &st);
}

FitResult natural_trend_filter(const Eigen::VectorXd& y, const DesignGrid& grid, int k,
                               const SolverConfig& cfg) {
    const int n = grid.size();
    if (y.size() != n) throw std::domain_error("natural_trend_filter: y length != n");
    if (k % 2 == 0) throw std::domain_error("natural_trend_filter: degree must be odd");
    const int m = (k + 1) / 2;
    if (n < 2 * k + 2) throw std::domain_error("natural_trend_filter: need n >= 2k+2");
    const double lambda = cfg.lambda;

    // theta = E phi: boundary coordinates are degree-(m-1) polynomial
    // extensions of their inner neighbors (Lagrange weights).
    const int nf = n - 2 * m;
    BandedMatrix E(n, nf, 3 * m - 1, m - 1);
    auto lagrange_row = [&](int target, int node0) {
        // weights of p(x_target) given values at nodes pts[node0..node0+m-1]
        Eigen::VectorXd w(m);
        for (int t = 0; t < m; ++t) {
            double v = 1.0;
            for (int s = 0; s < m; ++s)
                if (s != t) v *= (grid[target] - grid[node0 + s]) / (grid[node0 + t] - grid[node0 + s]);
            w[t] = v;
        }
        return w;
    };
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd w = lagrange_row(i, m);
        for (int t = 0; t < m; ++t) E.set(i, t, w[t]);
    }
    for (int i = m; i < n - m; ++i) E.set(i, i - m, 1.0);
    for (int i = n - m; i < n; ++i) {
        Eigen::VectorXd w = lagrange_row(i, n - 2 * m);
        for (int t = 0; t < m; ++t) E.set(i, nf - m + t, w[t]);
    }

    PenaltyOperators full = build_penalty_ops(grid, k + 1);
    auto finish = [&](const Eigen::VectorXd& theta, const AdmmState* st) {
        FitResult out;
        out.theta_hat = theta;
        Eigen::VectorXd c = full.C.multiply(theta);
        out.active_set = active_rows(c);
        out.penalty = c.lpNorm<1>();
        out.objective = 0.5 * (y - theta).squaredNorm() + lambda * out.penalty;
        if (st) {
            out.iters = st->iters;
            out.converged = st->converged;
            out.primal_residual = st->primal;
            out.dual_residual = st->dual;
            out.primal_residual_history = st->primal_history;
        }
        return out;
    };

    BandedMatrix EtE = E.gram(E);
    if (lambda == 0.0) {
        Eigen::VectorXd phi = banded_solve(EtE, E.multiply_transpose(y));
        FitResult out = finish(E.multiply(phi), nullptr);
        out.kkt_residual = (E.multiply_transpose(y - out.theta_hat)).lpNorm<Eigen::Infinity>();
        return out;
    }

    // Same unit-mean-gap reparametrization as trend_filter; E is built from
    // Lagrange weight ratios and is scale-invariant.
    const double cscale = (n - 1) / (grid[n - 1] - grid[0]);
    std::vector<double> spts(grid.points());
    for (double& p : spts) p *= cscale;
    DesignGrid sgrid(spts, grid.a() * cscale, grid.b() * cscale);
    const double lam = lambda * std::pow(cscale, k);
    const double rho = (cfg.rho > 0.0 ? cfg.rho : lambda) * std::pow(cscale, k);
    PenaltyOperators lower = build_penalty_ops(sgrid, k);
    BandedMatrix G0 = lower.D.matmul(E);  // (n-k) x nf
    BandedMatrix Q = G0.gram(G0);
    BandedMatrix M(nf, nf, std::max(EtE.lower_bw(), Q.lower_bw()),
                   std::max(EtE.upper_bw(), Q.upper_bw()));
    for (int i = 0; i < nf; ++i)
        for (int j = std::max(0, i - M.lower_bw()); j <= std::min(nf - 1, i + M.upper_bw()); ++j)
            M.set(i, j, EtE(i, j) + rho * Q(i, j));
    BandedCholesky Mfac(M);

    const double eps_rel = 1e-6;
    AdmmState st;
    Eigen::VectorXd phi = banded_solve(EtE, E.multiply_transpose(y));
    st.z = G0.multiply(phi);
    st.u = Eigen::VectorXd::Zero(n - k);
    for (; st.iters < cfg.max_iter;) {
        st.iters++;
        phi = Mfac.solve(E.multiply_transpose(y) + rho * G0.multiply_transpose(st.z + st.u));
        Eigen::VectorXd Gphi = G0.multiply(phi);
        Eigen::VectorXd z_old = st.z;
        st.z = tv_denoise_1d(Gphi - st.u, lam / rho);
        st.u += st.z - Gphi;
        st.primal = (st.z - Gphi).norm();
        st.dual = rho * G0.multiply_transpose(st.z - z_old).norm();
        st.primal_history.push_back(st.primal);
        double eps_pri = std::sqrt(static_cast<double>(n - k)) * cfg.tol_primal +
                         eps_rel * std::max(st.z.norm(), Gphi.norm());
        double eps_dua = std::sqrt(static_cast<double>(nf)) * cfg.tol_dual +
                         eps_rel * rho * G0.multiply_transpose(st.u).norm();
        if (st.primal <= eps_pri && st.dual <= eps_dua) {
            st.converged = true;
            break;
        }
    }
    st.theta = E.multiply(phi);
    FitResult out = finish(st.theta, &st);
    // Reduced-problem stationarity: E^T (y - theta) must be a feasible
    // combination of the penalty rows.
    BandedMatrix Cr(n - k - 1, n - k, 0, 1);
    for (int i = 0; i < n - k - 1; ++i) {
        Cr.set(i, i, -1.0);
        Cr.set(i, i + 1, 1.0);
    }
    BandedMatrix Chat = Cr.matmul(G0);
    BandedMatrix Gc = Chat.transpose().gram(Chat.transpose());
    Eigen::VectorXd g = E.multiply_transpose(y - st.theta);
    Eigen::VectorXd u = ridge_gram_solve(Gc, Chat.multiply(g));
    double r = (g - Chat.multiply_transpose(u)).lpNorm<Eigen::Infinity>();
    double box = std::max(0.0, u.lpNorm<Eigen::Infinity>() - lam);
    out.kkt_residual = std::max(r, box);
    return out;
}

FitResult bw_filter(const Eigen::VectorXd& y, const DesignGrid& grid, int m,
                    double lambda, bool weighted) {
    const int n = grid.size();
    if (y.size() != n) throw std::domain_error("bw_filter: y length != n");
    if (m < 1 || m > n - 1) throw std::domain_error("bw_filter: order out of range");
    if (lambda < 0.0) throw std::domain_error("bw_filter: negative lambda");
    PenaltyOperators ops = build_penalty_ops(grid, m);
    BandedMatrix Q = weighted ? ops.D.gram(BandedMatrix::diagonal(ops.W).matmul(ops.D))
                              : ops.D.gram(ops.D);
    BandedMatrix M(n, n, Q.lower_bw(), Q.upper_bw());
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - Q.lower_bw()); j <= std::min(n - 1, i + Q.upper_bw()); ++j)
            M.set(i, j, lambda * Q(i, j) + (i == j ? 1.0 : 0.0));
    FitResult out;
    out.theta_hat = banded_solve(M, y);
    Eigen::VectorXd d = ops.D.multiply(out.theta_hat);
    double quad = 0.0;
    for (int i = 0; i < d.size(); ++i) quad += (weighted ? ops.W[i] : 1.0) * d[i] * d[i];
    out.penalty = 0.5 * quad;
    out.objective = 0.5 * (y - out.theta_hat).squaredNorm() + lambda * out.penalty;
    out.kkt_residual =
        (out.theta_hat - y + lambda * Q.multiply(out.theta_hat)).lpNorm<Eigen::Infinity>();
    out.iters = 1;
    return out;
}

FitResult smoothing_spline(const Eigen::VectorXd& y, const DesignGrid& grid, int m,
                           double lambda) {
    const int n = grid.size();
    if (y.size() != n) throw std::domain_error("smoothing_spline: y length != n");
    if (m != 1 && m != 2) throw std::domain_error("smoothing_spline: only m in {1,2} is supported");
    if (lambda < 0.0) throw std::domain_error("smoothing_spline: negative lambda");
    PenaltyOperators ops = build_penalty_ops(grid, m);
    BandedMatrix Kinv = k_matrix_inv(grid, m);
    // gamma = K D theta solves (K^{-1} + lambda D D^T) gamma = D y, then
    // theta = y - lambda D^T gamma.
    BandedMatrix DDt = ops.D.transpose().gram(ops.D.transpose());
    BandedMatrix S(n - m, n - m, std::max(Kinv.lower_bw(), DDt.lower_bw()),
                   std::max(Kinv.upper_bw(), DDt.upper_bw()));
    for (int i = 0; i < n - m; ++i)
        for (int j = std::max(0, i - S.lower_bw()); j <= std::min(n - m - 1, i + S.upper_bw()); ++j)
            S.set(i, j, Kinv(i, j) + lambda * DDt(i, j));
    Eigen::VectorXd gamma = banded_solve(S, ops.D.multiply(y));
    FitResult out;
    out.theta_hat = y - lambda * ops.D.multiply_transpose(gamma);
    Eigen::VectorXd d = ops.D.multiply(out.theta_hat);
    Eigen::VectorXd Kd = banded_solve(Kinv, d);  // K d
    out.penalty = 0.5 * d.dot(Kd);
    out.objective = 0.5 * (y - out.theta_hat).squaredNorm() + lambda * out.penalty;
    out.kkt_residual =
        (out.theta_hat - y + lambda * ops.D.multiply_transpose(Kd)).lpNorm<Eigen::Infinity>();
    out.iters = 1;
    return out;
}

std::pair<double, double> ss_bw_distance_check(const Eigen::VectorXd& y, const DesignGrid& grid,
                                               double lambda_a, double lambda_b) {
    if (lambda_b < 3.0 * lambda_a * (1.0 - 1e-12))
        throw std::domain_error("ss_bw_distance_check: requires lambda_b >= 3 lambda_a");
    FitResult ss = smoothing_spline(y, grid, 2, lambda_a);
    FitResult bw = bw_filter(y, grid, 2, lambda_b, /*weighted=*/true);
    double lhs = (ss.theta_hat - bw.theta_hat).squaredNorm();
    PenaltyOperators ops = build_penalty_ops(grid, 2);
    BandedMatrix Kinv = k_matrix_inv(grid, 2);
    Eigen::VectorXd d = ops.D.multiply(ss.theta_hat);
    double sobolev = d.dot(banded_solve(Kinv, d));
    double rhs = lambda_b / 3.0 * sobolev;
    if (lhs > rhs + 1e-9 * std::max(1.0, rhs))
        throw std::runtime_error("ss_bw_distance_check: distance bound violated");
    return {lhs, rhs};
}

}  // namespace discspline
