#pragma once

#include <Eigen/Dense>
#include <utility>

#include "discspline/banded.hpp"
#include "discspline/ff_basis.hpp"
#include "discspline/grid.hpp"

namespace discspline {

// Total variation of the k-th derivative of the discrete-spline interpolant
// of theta: the weighted l1 norm of the (k+1)-st discrete derivatives,
// equivalently the sum of absolute adjacent differences of k-th ones.
double tv_functional(const Eigen::VectorXd& theta, const DesignGrid& grid, int k);

// Exact quadratic representation of the squared L2 norm of the m-th
// derivative over the discrete-spline space of degree k = 2m-1:
//   integral (D^m f)^2 = (D^m theta)^T V (D^m theta).
// V is symmetric with total bandwidth 2m-1; M is the Gram matrix of the m-th
// derivatives of the trailing basis members that seeds the 2m-step recursion.
struct SobolevMatrices {
    int m = 0;
    BandedMatrix V;
    Eigen::MatrixXd M;
    BandedMatrix K_inv;  // spline analogue, filled for m in {1,2}
};

// Builds M from its boundary-evaluation closed form (or takes M_override,
// e.g. for a general linear functional in place of the integral), runs the
// row/column recursion, and verifies the claimed bandwidth.
SobolevMatrices sobolev_V(const DesignGrid& grid, int m,
                          const Eigen::MatrixXd& M_override = {});

// Banded inverse of the spline quadratic-form matrix: diagonal for m=1,
// tridiagonal for m=2.
BandedMatrix k_matrix_inv(const DesignGrid& grid, int m);

// Rayleigh quotients u^T (W2 K2inv W2) u / u^T W2 u over random u, with
// W2 = diag((x_{i+2}-x_i)/2); every ratio must lie in [1/3, 1]. Returns
// (smallest, largest) sampled ratio and throws if the range is violated.
std::pair<double, double> spectral_similarity_check(const DesignGrid& grid);

// Sup-distance estimate between the truncated power and falling factorial
// bases on a probe mesh, checked against the k (b-a)^{k-1} delta_n / (k-1)!
// bound (delta_n the maximum gap). Returns the estimate; throws on violation.
double basis_distance_check(const DesignGrid& grid, int k, int mesh_points = 1000);

}  // namespace discspline
