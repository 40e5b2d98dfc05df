#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "discspline/grid.hpp"

namespace discspline {

struct SolverConfig {
    double lambda = 0.0;
    double rho = 0.0;          // <= 0 picks the scale-matched default rho = lambda
    int max_iter = 100000;
    double tol_primal = 1e-8;  // absolute residual components; a fixed 1e-6
    double tol_dual = 1e-8;    // relative component is combined in
    bool polish = false;
    bool db_admm = false;      // working-active-set mode with the DB-spline
                               // preconditioned theta-update
};

struct FitResult {
    Eigen::VectorXd theta_hat;
    double objective = 0.0;
    double penalty = 0.0;              // l1 penalty value, or half the quadratic form
    std::vector<int> active_set;       // rows of C^{k+1} with nonzero weighted differences
    double kkt_residual = 0.0;
    int iters = 0;
    bool converged = true;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    std::vector<double> primal_residual_history;
};

// Exact minimizer of 1/2 ||z - b||^2 + gamma * sum |z_{i+1} - z_i|
// by the taut string method.
Eigen::VectorXd tv_denoise_1d(const Eigen::VectorXd& b, double gamma);

// l1 trend filtering of degree k: 1/2 ||y - theta||^2 + lambda ||C^{k+1} theta||_1,
// solved by ADMM on the split z = D^k theta (k = 0 reduces to exact total
// variation denoising). Optional DB-spline polish of the converged solution.
FitResult trend_filter(const Eigen::VectorXd& y, const DesignGrid& grid, int k,
                       const SolverConfig& cfg);

// Trend filtering restricted to discrete natural splines (odd k = 2m-1):
// boundary blocks of theta are degree-(m-1) polynomial extensions of their
// neighbors; solved by eliminating the constrained coordinates.
FitResult natural_trend_filter(const Eigen::VectorXd& y, const DesignGrid& grid, int k,
                               const SolverConfig& cfg);

// Ridge-type filter on m-th discrete derivatives: solves
// (I + lambda D^T W D) theta = y (weighted) or (I + lambda D^T D) theta = y.
FitResult bw_filter(const Eigen::VectorXd& y, const DesignGrid& grid, int m,
                    double lambda, bool weighted);

// Smoothing spline solution theta = (I + lambda D^T K D)^{-1} y for m in
// {1,2}, computed without densifying K (Reinsch-style elimination).
FitResult smoothing_spline(const Eigen::VectorXd& y, const DesignGrid& grid, int m,
                           double lambda);

// Distance bound between the m=2 smoothing spline (parameter lambda_a) and
// weighted filter (parameter lambda_b >= 3 lambda_a): returns (lhs, rhs) of
//   || theta_ss - theta_bw ||^2 <= (lambda_b / 3) * integral (D^2 f_ss)^2,
// throwing if the inequality fails beyond rounding.
std::pair<double, double> ss_bw_distance_check(const Eigen::VectorXd& y, const DesignGrid& grid,
                                               double lambda_a, double lambda_b);

}  // namespace discspline
