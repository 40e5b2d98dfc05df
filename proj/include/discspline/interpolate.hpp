#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "discspline/ff_basis.hpp"

namespace discspline {

// Dual views of a fitted function: values theta at the design points and
// falling factorial coefficients alpha, with theta = H alpha. active_knots
// holds the 0-based basis indices j > k whose coefficient is nonzero (the
// interpolant's k-th discrete derivative jumps at x_{j-1}).
struct DiscreteSplineFit {
    FFBasisSpec spec;
    Eigen::VectorXd theta;
    Eigen::VectorXd alpha;
    std::vector<int> active_knots;
};

// alpha = Z^{k+1} B^{k+1} theta via the fast inverse transform; the i-th
// entry is the dual functional of the i-th basis member applied to theta.
Eigen::VectorXd dual_coefficients(const Eigen::VectorXd& theta, const FFBasisSpec& spec);

DiscreteSplineFit make_fit(const Eigen::VectorXd& theta, const FFBasisSpec& spec,
                           double active_tol = 1e-10);

// Interpolant value through the basis expansion (head polynomials plus the
// active truncated members).
double interp_explicit(const DiscreteSplineFit& fit, double x);

// Implicit interpolation: one local divided-difference system in the single
// unknown f(x); O(k) arithmetic after locating x. Design points return the
// stored value. Queries beyond x_{n-1} use the last polynomial piece.
double interp_implicit(const Eigen::VectorXd& theta, const FFBasisSpec& spec, double x);

// Number of local weight computations performed by interp_implicit on this
// thread; tests assert exactly one per query.
std::int64_t& implicit_weight_ops();

}  // namespace discspline
