#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "discspline/db_splines.hpp"
#include "discspline/discrete_calculus.hpp"
#include "discspline/interpolate.hpp"
#include "test_helpers.hpp"

using namespace discspline;

TEST_CASE("dense evaluations are the identity, including the dd cross-check") {
    auto g = testutil::random_grid(12, 5, 10.0, 0.05, 0.95);  // a < x_0, x_{n-1} < b
    DesignGrid wide(std::vector<double>(g.points()), 0.0, 1.0);
    for (int k = 0; k <= 3; ++k) {
        DBSplineBasis basis = dbs_values_dense(wide, k, /*crosscheck=*/true);
        CHECK(basis.value(4, 4) == doctest::Approx(1.0));
        CHECK(basis.value(3, 4) == doctest::Approx(0.0));
        Eigen::MatrixXd M = basis.to_dense();
        CHECK((M - Eigen::MatrixXd::Identity(12, 12)).norm() < 1e-12);
    }
}

TEST_CASE("dense evaluation off the grid: partition at design points and support") {
    std::mt19937_64 rng(31);
    for (int k = 1; k <= 3; ++k) {
        auto g = testutil::random_grid(16, 700 + static_cast<unsigned>(k));
        DBSplineBasis basis = dbs_values_dense(g, k);
        // reproduces arbitrary values at design points by construction
        Eigen::VectorXd theta = testutil::random_vector(16, 44 + k);
        for (int i = 0; i < 16; ++i) {
            double s = 0.0;
            for (int j = 0; j < 16; ++j) s += basis.value(i, j) * theta[j];
            CHECK(s == doctest::Approx(theta[i]));
        }
        // off-grid: expansions agree with the interpolant of unit vectors
        FFBasisSpec spec(g, k);
        std::uniform_real_distribution<double> ux(g.a(), g.b());
        for (int j : {0, 2, 8, 15}) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(16);
            e[j] = 1.0;
            for (int rep = 0; rep < 30; ++rep) {
                double x = ux(rng);
                CHECK(std::abs(dbs_eval(basis, j, x) - interp_implicit(e, spec, x)) < 1e-8);
            }
            // zero outside the support window
            double lo = (j <= k) ? g.a() : g[j - 1];
            double hi = (j >= 16 - k - 1) ? g.b() : g[j + k];
            for (int rep = 0; rep < 60; ++rep) {
                double x = ux(rng);
                if (x < lo || x > hi) CHECK(dbs_eval(basis, j, x) == 0.0);
            }
        }
    }
}

TEST_CASE("interior members ripple negative near the right end of their support") {
    auto g = testutil::uniform_grid(16);
    DBSplineBasis basis = dbs_values_dense(g, 2);
    int j = 7;  // interior member, support (x_{j-1}, x_{j+2}]
    bool negative_seen = false;
    for (int t = 1; t < 100; ++t) {
        double x = g[j + 1] + (g[j + 2] - g[j + 1]) * t / 100.0;
        if (dbs_eval(basis, j, x) < 0.0) negative_seen = true;
    }
    CHECK(negative_seen);
}

TEST_CASE("dense columns are discrete splines: k-th discrete derivative constant between knots") {
    auto g = testutil::random_grid(14, 3);
    int k = 2;
    DBSplineBasis basis = dbs_values_dense(g, k);
    FFBasisSpec spec(g, k);
    for (int j : {3, 6, 10}) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(14);
        e[j] = 1.0;
        Eigen::VectorXd alpha = dual_coefficients(e, spec);
        // jumps (nonzero tail coefficients) only inside the support window
        for (int i = k + 1; i < 14; ++i)
            if (std::abs(alpha[i]) > 1e-8) {
                CHECK(i >= j);
                CHECK(i <= std::min(j + k + 1, 13));
            }
    }
}

TEST_CASE("sparse evaluations: dense knot set reduces to the identity") {
    auto g = testutil::random_grid(12, 9);
    int k = 2;
    std::vector<int> all;
    for (int i = k; i <= 10; ++i) all.push_back(i);
    DBSplineBasis basis = dbs_values_sparse(g, k, all);
    CHECK((basis.to_dense() - Eigen::MatrixXd::Identity(12, 12)).norm() < 1e-10);
}

TEST_CASE("sparse evaluations: defining constraints and support windows") {
    std::mt19937_64 rng(13);
    for (int k = 1; k <= 3; ++k) {
        const int n = 50;
        auto g = testutil::random_grid(n, 220 + static_cast<unsigned>(k));
        // 8 knots drawn from the admissible window
        std::vector<int> window;
        for (int i = k; i <= n - 2; ++i) window.push_back(i);
        std::shuffle(window.begin(), window.end(), rng);
        std::vector<int> knots(window.begin(), window.begin() + 8);
        std::sort(knots.begin(), knots.end());
        DBSplineBasis basis = dbs_values_sparse(g, k, knots);
        const int r = 8;
        CHECK(basis.dim() == r + k + 1);

        // unit-at-knot constraints for the middle members
        for (int t = 0; t + 1 < r; ++t) {
            int j = k + 1 + t;
            CHECK(basis.value(knots[static_cast<size_t>(t + 1)], j) == doctest::Approx(1.0));
            CHECK(basis.value(knots[static_cast<size_t>(t)], j) == doctest::Approx(0.0));
        }
        // left members: unit at x_j, zeros around their defining knot
        for (int j = 0; j <= k; ++j) {
            CHECK(basis.value(j, j) == doctest::Approx(1.0));
            for (int q = 0; q < j; ++q) CHECK(basis.value(q, j) == doctest::Approx(0.0));
            int kj = knots[static_cast<size_t>(j)];
            for (int q = kj - k + 1; q <= std::min(kj + 1, n - 1); ++q)
                if (q >= 0) CHECK(basis.value(q, j) == doctest::Approx(0.0));
        }
        // support: nonzero rows lie within the window of the locality result
        for (int j = 0; j < basis.dim(); ++j) {
            double lo = (j <= k) ? g.a() : g[knots[static_cast<size_t>(j - k - 1)]];
            double hi = (j <= k) ? g[knots[static_cast<size_t>(j)]]
                                 : (j - k - 1 + k + 1 < r) ? g[knots[static_cast<size_t>(j)]] : g.b();
            for (int i = 0; i < n; ++i)
                if (std::abs(basis.value(i, j)) > 1e-8)
                    CHECK((g[i] >= lo && g[i] <= hi));
        }
    }
}

TEST_CASE("sparse columns lie in the spline space: vanishing dual tail off the knots") {
    auto g = testutil::random_grid(40, 27);
    int k = 2;
    std::vector<int> knots{4, 11, 19, 24, 31, 36};
    DBSplineBasis basis = dbs_values_sparse(g, k, knots);
    FFBasisSpec dense(g, k);
    std::set<int> allowed{0, 1, 2};
    for (int q : knots) allowed.insert(q + 1);
    Eigen::MatrixXd M = basis.to_dense();
    for (int j = 0; j < basis.dim(); ++j) {
        Eigen::VectorXd alpha = dual_coefficients(M.col(j), dense);
        for (int i = 0; i < 40; ++i)
            if (!allowed.count(i)) CHECK(std::abs(alpha[i]) < 1e-7);
    }
}

TEST_CASE("natural basis: dimension, boundary derivatives, and support separation") {
    for (int k : {1, 3}) {
        const int n = 30;
        auto g = testutil::random_grid(n, 600 + static_cast<unsigned>(k));
        NaturalBasis nb = natural_basis(g, k);
        CHECK(nb.values.cols() == n - k - 1);
        int m = (k + 1) / 2;
        for (int j = 0; j < nb.values.cols(); ++j) {
            GridFunction f(g, nb.values.col(j));
            for (int ell = m; ell <= k; ++ell) {
                // discrete derivatives of orders m..k vanish at both ends
                CHECK(std::abs(discrete_deriv(f, ell, g[k])) < 1e-8);
                CHECK(std::abs(discrete_deriv(f, ell, g[n - 1])) < 1e-8);
            }
        }
        // left members evaluate to zero at the right-side design points
        for (int j = 0; j < m; ++j)
            for (int i = n - k - 1; i < n - 1; ++i) CHECK(nb.values(i, j) == 0.0);
    }
    CHECK_THROWS_AS(natural_basis(testutil::uniform_grid(30), 2), std::domain_error);
}

TEST_CASE("natural basis with k=1 extends constantly at the left boundary") {
    auto g = testutil::random_grid(12, 8);
    NaturalBasis nb = natural_basis(g, 1);
    // first column: ones at the two leftmost design points
    CHECK(nb.values(0, 0) == doctest::Approx(1.0));
    CHECK(nb.values(1, 0) == doctest::Approx(1.0));
    FFBasisSpec spec(g, 1);
    Eigen::VectorXd theta = nb.values.col(0);
    DiscreteSplineFit fit = make_fit(theta, spec);
    for (double frac : {0.0, 0.3, 0.9})
        CHECK(interp_explicit(fit, g[0] + frac * (g[1] - g[0])) == doctest::Approx(1.0));
}

TEST_CASE("projection routes agree and are idempotent") {
    std::mt19937_64 rng(17);
    const int n = 200, k = 3;
    auto g = testutil::random_grid(n, 71);
    std::vector<int> window;
    for (int i = k; i <= n - 2; ++i) window.push_back(i);
    std::shuffle(window.begin(), window.end(), rng);
    std::vector<int> knots(window.begin(), window.begin() + 20);
    std::sort(knots.begin(), knots.end());

    // y already in the span stays fixed under every route
    FFBasisSpec spec(g, k, knots);
    Eigen::VectorXd coef = testutil::random_vector(spec.dim(), 5);
    Eigen::VectorXd y_in = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < spec.dim(); ++j)
        for (int i = 0; i < n; ++i) y_in[i] += coef[j] * ffb_eval(spec, j, g[i]);
    for (auto route : {LsRoute::FF, LsRoute::DD, LsRoute::DB}) {
        Eigen::VectorXd yh = project_ls(y_in, g, k, knots, route);
        CHECK((yh - y_in).norm() <= 1e-6 * y_in.norm());
    }

    Eigen::VectorXd y = testutil::random_vector(n, 6);
    Eigen::VectorXd dd = project_ls(y, g, k, knots, LsRoute::DD);
    Eigen::VectorXd db = project_ls(y, g, k, knots, LsRoute::DB);
    CHECK((dd - db).norm() <= 1e-6 * y.norm());

    // residual orthogonality against the local basis
    DBSplineBasis N = dbs_values_sparse(g, k, knots);
    Eigen::VectorXd resid = N.multiply_transpose(y - db);
    CHECK(resid.lpNorm<Eigen::Infinity>() <= 1e-6 * y.norm());
}

TEST_CASE("conditioning benchmark at n=100: every route finite, output shape") {
    auto rows = cond_benchmark(100, 3, 10, "even", 5, 42);
    CHECK(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.n == 100);
        CHECK(std::isfinite(r.median_kappa));
    }
    // deterministic given the seed
    auto again = cond_benchmark(100, 3, 10, "even", 5, 42);
    for (size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].median_kappa == doctest::Approx(again[i].median_kappa));
}
