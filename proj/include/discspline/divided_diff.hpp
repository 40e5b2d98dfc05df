#pragma once

#include <Eigen/Dense>
#include <vector>

namespace discspline {

// Distinct centers z_1, ..., z_r for divided differences. Order is free;
// duplicates are a hard error.
class Centers {
public:
    explicit Centers(std::vector<double> values);
    int size() const { return static_cast<int>(vals_.size()); }
    double operator[](int i) const { return vals_[static_cast<size_t>(i)]; }
    const std::vector<double>& values() const { return vals_; }

private:
    std::vector<double> vals_;
};

// Order-(r-1) divided difference f[z_1,...,z_r] of the sampled values;
// order 0 is plain evaluation. Invariant to simultaneous permutation of
// centers and values. Computed through the explicit weight formula.
double divided_difference(const Eigen::VectorXd& f_values, const Centers& centers);

// Same quantity through the two-term recursion; kept for cross-checks.
double divided_difference_recursive(const Eigen::VectorXd& f_values, const Centers& centers);

// Weights w with f[z_1,...,z_r] = sum_i w_i f(z_i); w_i = 1/prod_{j!=i}(z_i-z_j).
Eigen::VectorXd dd_weights(const Centers& centers);

// Newton polynomial eta(x; t_{1:r}) = prod_j (x - t_j); the empty product is 1.
double newton_poly_eval(double x, const Centers& centers);
double newton_poly_eval(double x, const std::vector<double>& centers);

// Newton's divided difference interpolation: evaluates the unique polynomial
// through (centers, values) at x. Reproduces the data at the centers.
double newton_interpolate(const Eigen::VectorXd& values, const Centers& centers, double x);

}  // namespace discspline
