#include "discspline/discrete_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "discspline/divided_diff.hpp"
#include "discspline/ff_basis.hpp"

namespace discspline {

GridFunction::GridFunction(DesignGrid g, Eigen::VectorXd v,
                           std::optional<std::pair<double, double>> e)
    : grid(std::move(g)), values(std::move(v)), extra(std::move(e)) {
    if (values.size() != grid.size())
        throw std::domain_error("GridFunction: values length != grid size");
}

double GridFunction::value_at(double x) const {
    const auto& pts = grid.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), x);
    if (it != pts.end() && *it == x) return values[static_cast<int>(it - pts.begin())];
    if (extra && extra->first == x) return extra->second;
    throw std::domain_error("GridFunction: no evaluation available at query point");
}

static double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double discrete_deriv(const GridFunction& f, int k, double x) {
    const int n = f.grid.size();
    if (k < 1 || k > n - 1) throw std::domain_error("discrete_deriv: order out of range");
    const int i = f.grid.locate(x);
    const double fx = f.value_at(x);
    if (i == 0) return fx;
    const int order = std::min(i, k);  // order falls off near the left boundary
    std::vector<double> c(static_cast<size_t>(order) + 1);
    Eigen::VectorXd vals(order + 1);
    for (int t = 0; t < order; ++t) {
        c[static_cast<size_t>(t)] = f.grid[i - order + t];
        vals[t] = f.values[i - order + t];
    }
    c[static_cast<size_t>(order)] = x;
    vals[order] = fx;
    return factorial(order) * divided_difference(vals, Centers(c));
}

double discrete_integ(const GridFunction& f, int k, double x) {
    const int n = f.grid.size();
    if (k < 1 || k > n - 1) throw std::domain_error("discrete_integ: order out of range");
    const int i = f.grid.locate(x);
    const double fx = f.value_at(x);
    if (i == 0) return fx;
    FFBasisSpec lower(f.grid, k - 1);  // degree k-1 falling factorial basis
    double s = 0.0;
    if (i >= k) {
        for (int c = 0; c < k; ++c) s += ffb_eval(lower, c, x) * f.values[c];
        for (int c = k; c < i; ++c)
            s += ffb_eval(lower, c, x) * (f.grid[c] - f.grid[c - k]) / k * f.values[c];
        s += ffb_eval(lower, i, x) * (x - f.grid[i - k]) / k * fx;
    } else {
        for (int c = 0; c < i; ++c) s += ffb_eval(lower, c, x) * f.values[c];
        s += ffb_eval(lower, i, x) * fx;
    }
    return s;
}

namespace detail {

namespace {

// Function carried as values at the design points plus one query evaluation.
struct Vals {
    Eigen::VectorXd v;
    double x;
    double fx;
    int xi;  // locate(x)
};

Vals make_vals(const GridFunction& f, double x) {
    return Vals{f.values, x, f.value_at(x), f.grid.locate(x)};
}

// Simple difference over the reduced point set pts[s..n-1].
void simple_diff(const DesignGrid& g, int s, Vals& u) {
    const int n = g.size();
    if (u.x > g[s]) u.fx -= u.v[u.xi - 1];
    for (int p = n - 1; p > s; --p) u.v[p] -= u.v[p - 1];
}

// Cumulative sum over the reduced point set pts[s..n-1].
void cum_sum(const DesignGrid& g, int s, Vals& u) {
    const int n = g.size();
    if (u.x > g[s]) {
        double pre = 0.0;
        for (int p = s; p < u.xi; ++p) pre += u.v[p];
        u.fx += pre;
    }
    double acc = 0.0;
    for (int p = s; p < n; ++p) {
        acc += u.v[p];
        u.v[p] = acc;
    }
}

// Weight map of order k, or its inverse.
void weight_map(const DesignGrid& g, int k, bool inverse, Vals& u) {
    const int n = g.size();
    for (int p = k; p < n; ++p) {
        double w = (g[p] - g[p - k]) / k;
        u.v[p] = inverse ? u.v[p] / w : u.v[p] * w;
    }
    if (u.xi >= k) {
        double w = (u.x - g[u.xi - k]) / k;
        u.fx = inverse ? u.fx / w : u.fx * w;
    }
}

}  // namespace

double discrete_deriv_recursive(const GridFunction& f, int k, double x) {
    Vals u = make_vals(f, x);
    for (int ord = 1; ord <= k; ++ord) {
        simple_diff(f.grid, ord - 1, u);
        weight_map(f.grid, ord, /*inverse=*/true, u);
    }
    return u.fx;
}

double discrete_integ_recursive(const GridFunction& f, int k, double x) {
    Vals u = make_vals(f, x);
    for (int ord = k; ord >= 1; --ord) {
        weight_map(f.grid, ord, /*inverse=*/false, u);
        cum_sum(f.grid, ord - 1, u);
    }
    return u.fx;
}

}  // namespace detail

}  // namespace discspline
