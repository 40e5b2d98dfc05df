#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "discspline/divided_diff.hpp"
#include "test_helpers.hpp"

using namespace discspline;

namespace {

// Independent Lagrange-form interpolation oracle.
double lagrange_eval(const std::vector<double>& xs, const Eigen::VectorXd& ys, double x) {
    double s = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double l = 1.0;
        for (size_t j = 0; j < xs.size(); ++j)
            if (j != i) l *= (x - xs[j]) / (xs[i] - xs[j]);
        s += ys[static_cast<long>(i)] * l;
    }
    return s;
}

Eigen::VectorXd sample(double (*f)(double), const std::vector<double>& xs) {
    Eigen::VectorXd v(static_cast<long>(xs.size()));
    for (size_t i = 0; i < xs.size(); ++i) v[static_cast<long>(i)] = f(xs[i]);
    return v;
}

}  // namespace

TEST_CASE("divided difference of a cubic at four centers is its leading coefficient") {
    std::vector<double> c{0.0, 1.0, 2.0, 3.0};
    auto cube = [](double z) { return z * z * z; };
    Eigen::VectorXd v = sample(+cube, c);
    CHECK(divided_difference(v, Centers(c)) == doctest::Approx(1.0));
}

TEST_CASE("first-order cases") {
    CHECK(divided_difference(sample([](double z) { return z * z; }, {0.0, 1.0}), Centers({0.0, 1.0})) ==
          doctest::Approx(1.0));
    Eigen::VectorXd one(1);
    one[0] = 42.0;
    CHECK(divided_difference(one, Centers({5.0})) == doctest::Approx(42.0));  // order 0 = evaluation
}

TEST_CASE("divided differences of Newton polynomials hit one only at the matching order") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    for (int r = 0; r <= 4; ++r) {
        for (int j = 1; j <= 6; ++j) {
            std::vector<double> t(static_cast<size_t>(std::max(r, j)) + 1);
            for (auto& z : t) z = ux(rng);
            std::sort(t.begin(), t.end());
            std::vector<double> eta_centers(t.begin(), t.begin() + r);
            std::vector<double> dd_centers(t.begin(), t.begin() + j);
            Eigen::VectorXd vals(j);
            for (int i = 0; i < j; ++i) vals[i] = newton_poly_eval(dd_centers[static_cast<size_t>(i)], eta_centers);
            double got = divided_difference(vals, Centers(dd_centers));
            double want = (j == r + 1) ? 1.0 : 0.0;
            CHECK(std::abs(got - want) < 1e-8);
        }
    }
}

TEST_CASE("dd_weights explicit values and consistency with the recursion") {
    Eigen::VectorXd w = dd_weights(Centers({0.0, 1.0, 3.0}));
    CHECK(w[0] == doctest::Approx(1.0 / 3.0));
    CHECK(w[1] == doctest::Approx(-0.5));
    CHECK(w[2] == doctest::Approx(1.0 / 6.0));

    Eigen::VectorXd w2 = dd_weights(Centers({0.0, 1.0}));
    CHECK(w2[0] == doctest::Approx(-1.0));
    CHECK(w2[1] == doctest::Approx(1.0));

    // weights reproduce the recursive divided difference on monomials
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        int r = 2 + static_cast<int>(rng() % 4);
        std::vector<double> c(static_cast<size_t>(r));
        for (auto& z : c) z = ux(rng);
        std::sort(c.begin(), c.end());
        bool distinct = true;
        for (size_t i = 1; i < c.size(); ++i) distinct &= c[i] != c[i - 1];
        if (!distinct) continue;
        Centers cs(c);
        Eigen::VectorXd w3 = dd_weights(cs);
        CHECK(std::abs(w3.sum()) < 1e-8);  // constants are annihilated
        for (int deg = 0; deg < r; ++deg) {
            Eigen::VectorXd v(r);
            for (int i = 0; i < r; ++i) v[i] = std::pow(c[static_cast<size_t>(i)], deg);
            CHECK(std::abs(w3.dot(v) - divided_difference_recursive(v, cs)) < 1e-9);
        }
    }
}

TEST_CASE("permutation invariance") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ux(0.0, 2.0);
    for (int rep = 0; rep < 40; ++rep) {
        int r = 2 + static_cast<int>(rng() % 4);
        std::vector<double> c;
        while (static_cast<int>(c.size()) < r) {
            double z = ux(rng);
            if (std::find(c.begin(), c.end(), z) == c.end()) c.push_back(z);
        }
        Eigen::VectorXd v = testutil::random_vector(r, 1000 + rep);
        double base = divided_difference(v, Centers(c));
        std::vector<int> perm(static_cast<size_t>(r));
        for (int i = 0; i < r; ++i) perm[static_cast<size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> pc(static_cast<size_t>(r));
        Eigen::VectorXd pv(r);
        for (int i = 0; i < r; ++i) {
            pc[static_cast<size_t>(i)] = c[static_cast<size_t>(perm[static_cast<size_t>(i)])];
            pv[i] = v[perm[static_cast<size_t>(i)]];
        }
        CHECK(testutil::rel_err(divided_difference(pv, Centers(pc)), base) < 1e-10);
    }
}

TEST_CASE("annihilation of low-degree polynomials") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int k = 1; k <= 4; ++k) {
        std::vector<double> c(static_cast<size_t>(k) + 2);
        for (auto& z : c) z = ux(rng);
        std::sort(c.begin(), c.end());
        bool ok = true;
        for (size_t i = 1; i < c.size(); ++i) ok &= c[i] - c[i - 1] > 1e-4;
        if (!ok) continue;
        Eigen::VectorXd coef = testutil::random_vector(k + 1, 77 + k);
        Eigen::VectorXd v(k + 2);
        for (int i = 0; i < k + 2; ++i) {
            double z = c[static_cast<size_t>(i)], p = 0.0, zp = 1.0;
            for (int d = 0; d <= k; ++d) {
                p += coef[d] * zp;
                zp *= z;
            }
            v[i] = p;
        }
        CHECK(std::abs(divided_difference(v, Centers(c))) < 1e-8);
    }
}

TEST_CASE("Newton polynomial evaluation") {
    CHECK(newton_poly_eval(5.0, std::vector<double>{}) == doctest::Approx(1.0));
    CHECK(newton_poly_eval(5.0, Centers({1.0, 2.0})) == doctest::Approx(12.0));
    CHECK(newton_poly_eval(1.0, Centers({1.0, 2.0, 7.0})) == doctest::Approx(0.0));
}

TEST_CASE("Newton interpolation") {
    {
        Eigen::VectorXd v(3);
        v << 0.0, 1.0, 4.0;  // z^2 at 0,1,2
        CHECK(newton_interpolate(v, Centers({0.0, 1.0, 2.0}), 3.0) == doctest::Approx(9.0));
    }
    {
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
        CHECK(newton_interpolate(ones, Centers({0.3, 1.7, 2.9}), -4.0) == doctest::Approx(1.0));
    }
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> c(4);
        for (auto& z : c) z = ux(rng);
        std::sort(c.begin(), c.end());
        bool ok = true;
        for (size_t i = 1; i < c.size(); ++i) ok &= c[i] - c[i - 1] > 1e-3;
        if (!ok) continue;
        Eigen::VectorXd v = testutil::random_vector(4, 500 + rep);
        double x = ux(rng);
        CHECK(std::abs(newton_interpolate(v, Centers(c), x) - lagrange_eval(c, v, x)) < 1e-10);
        for (int i = 0; i < 4; ++i)
            CHECK(testutil::rel_err(newton_interpolate(v, Centers(c), c[static_cast<size_t>(i)]), v[i]) <
                  1e-10);
    }
}

TEST_CASE("duplicate centers are rejected") {
    CHECK_THROWS_AS(Centers({1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(Centers({0.0, 2.0, 2.0}), std::domain_error);
}
