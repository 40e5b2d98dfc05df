#include "discspline/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "discspline/divided_diff.hpp"

namespace discspline {

Eigen::VectorXd dual_coefficients(const Eigen::VectorXd& theta, const FFBasisSpec& spec) {
    if (theta.size() != spec.grid().size())
        throw std::domain_error("dual_coefficients: theta length != n");
    if (!spec.dense())
        throw std::domain_error("dual_coefficients: dense knot set required");
    Eigen::VectorXd alpha = theta;
    fast_h_mult(spec, alpha, HVariant::H_inv);
    return alpha;
}

DiscreteSplineFit make_fit(const Eigen::VectorXd& theta, const FFBasisSpec& spec,
                           double active_tol) {
    DiscreteSplineFit fit{spec, theta, dual_coefficients(theta, spec), {}};
    const int k = spec.degree();
    double scale = 0.0;
    for (int j = k + 1; j < fit.alpha.size(); ++j) scale = std::max(scale, std::abs(fit.alpha[j]));
    for (int j = k + 1; j < fit.alpha.size(); ++j)
        if (std::abs(fit.alpha[j]) > active_tol * std::max(1.0, scale))
            fit.active_knots.push_back(j);
    return fit;
}

double interp_explicit(const DiscreteSplineFit& fit, double x) {
    const int k = fit.spec.degree();
    if (x < fit.spec.grid().a() || x > fit.spec.grid().b())
        throw std::domain_error("interp_explicit: x outside [a,b]");
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += fit.alpha[j] * ffb_eval(fit.spec, j, x);
    for (int j : fit.active_knots) s += fit.alpha[j] * ffb_eval(fit.spec, j, x);
    return s;
}

std::int64_t& implicit_weight_ops() {
    thread_local std::int64_t count = 0;
    return count;
}

double interp_implicit(const Eigen::VectorXd& theta, const FFBasisSpec& spec, double x) {
    const DesignGrid& g = spec.grid();
    const int n = g.size();
    const int k = spec.degree();
    if (theta.size() != n) throw std::domain_error("interp_implicit: theta length != n");
    if (x < g.a() || x > g.b()) throw std::domain_error("interp_implicit: x outside [a,b]");

    const auto& pts = g.points();
    auto it = std::lower_bound(pts.begin(), pts.end(), x);
    if (it != pts.end() && *it == x) return theta[static_cast<int>(it - pts.begin())];

    // Pick the k+2 centers indexing the single-unknown system.
    int lo;
    if (x < g[k]) {
        lo = 0;  // the left polynomial piece: centers x_0..x_k
    } else {
        int i = static_cast<int>(it - pts.begin());  // smallest index with x_i > x; n if beyond
        if (i >= n) i = n - 1;                       // right extrapolation by the last piece
        lo = i - k;
    }
    std::vector<double> centers(static_cast<size_t>(k) + 2);
    for (int t = 0; t <= k; ++t) {
        centers[static_cast<size_t>(t)] = g[lo + t];
        if (std::abs(x - g[lo + t]) < 1e-12 * (g.b() - g.a()))
            throw std::domain_error("interp_implicit: query too close to a design point");
    }
    centers[static_cast<size_t>(k) + 1] = x;
    Eigen::VectorXd w = dd_weights(Centers(centers));
    implicit_weight_ops()++;
    double s = 0.0;
    for (int t = 0; t <= k; ++t) s += w[t] * theta[lo + t];
    return -s / w[k + 1];
}

}  // namespace discspline
