#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "discspline/grid.hpp"

namespace discspline {

// A function known through its values at the design points, plus at most one
// extra off-grid evaluation (x, f(x)). The discrete operators consume exactly
// these n+1 evaluations.
struct GridFunction {
    DesignGrid grid;
    Eigen::VectorXd values;  // f(x_i), i = 0..n-1
    std::optional<std::pair<double, double>> extra;  // (x, f(x)) off the grid

    GridFunction(DesignGrid g, Eigen::VectorXd v,
                 std::optional<std::pair<double, double>> e = std::nullopt);

    // f at a query point: a design point uses the stored value, the extra
    // point its stored value; anything else is an error.
    double value_at(double x) const;
};

// k-th discrete derivative of f at x: a scaled sliding divided difference,
// with order fall-off left of x_k and plain evaluation left of x_0.
double discrete_deriv(const GridFunction& f, int k, double x);

// k-th discrete integral of f at x, the exact two-sided inverse of
// discrete_deriv; evaluated through the explicit linear-combination form.
double discrete_integ(const GridFunction& f, int k, double x);

namespace detail {
// Recursive (cumulative-sum) form of the discrete integral, retained as an
// independent route for cross-checks.
double discrete_integ_recursive(const GridFunction& f, int k, double x);
// Recursive form of the discrete derivative, likewise for cross-checks.
double discrete_deriv_recursive(const GridFunction& f, int k, double x);
}  // namespace detail

}  // namespace discspline
