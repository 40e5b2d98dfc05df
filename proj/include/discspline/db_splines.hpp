#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "discspline/ff_basis.hpp"

namespace discspline {

// Locally supported discrete-spline basis. Each column j holds the design
// point evaluations N_j(x_i); per the support structure every column is
// nonzero only on a contiguous row window, stored explicitly.
struct DBSplineBasis {
    FFBasisSpec spec;
    std::vector<int> first_row;              // first structurally nonzero row per column
    std::vector<Eigen::VectorXd> col_values; // values on the window
    std::vector<double> boundary_right;      // synthetic design points beyond x_{n-1}

    int dim() const { return static_cast<int>(col_values.size()); }
    double value(int i, int j) const;        // N_j(x_i)
    Eigen::MatrixXd to_dense() const;
    Eigen::VectorXd multiply(const Eigen::VectorXd& coef) const;           // N * coef
    Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& y) const;    // N^T * y
    // N^T diag(w) N as a banded matrix (w empty means identity).
    BandedMatrix gram(const Eigen::VectorXd& w = {}) const;
};

// Dense knot set: the evaluations are exactly the identity. When crosscheck
// is set, the divided-difference construction with synthetic left boundary
// points is verified against the identity (1e-8) and a failure throws.
DBSplineBasis dbs_values_dense(const DesignGrid& grid, int k, bool crosscheck = false);

// Sparse knot set T = { x_{knot_idx[j]} }: fills the evaluations by solving
// the local divided-difference systems column by column; O(n k^2) overall.
DBSplineBasis dbs_values_sparse(const DesignGrid& grid, int k, const std::vector<int>& knot_idx);

// Pointwise evaluation of basis member j at x in [a,b]; zero outside the
// support window. Dense bases use the explicit falling factorial expansion,
// sparse bases implicit interpolation of the stored evaluations.
double dbs_eval(const DBSplineBasis& basis, int j, double x);

// Basis for discrete natural splines of odd degree k = 2m-1: m left and m
// right boundary combinations around the middle DB-splines. Columns hold
// design point evaluations; dimension n-k-1.
struct NaturalBasis {
    DesignGrid grid;
    int degree;
    Eigen::MatrixXd values;  // n x (n-k-1)
};

NaturalBasis natural_basis(const DesignGrid& grid, int k);

enum class LsRoute { FF, DD, DB };

// Least-squares projection of y onto the discrete-spline space with knots T,
// through one of the three equivalent linear systems.
Eigen::VectorXd project_ls(const Eigen::VectorXd& y, const DesignGrid& grid, int k,
                           const std::vector<int>& knot_idx, LsRoute route);

struct CondBenchRow {
    int n;
    std::string design;
    std::string route;
    double median_kappa;
    double mad_kappa;
};

// Median condition numbers (and MADs) over repetitions for the three routes'
// linear systems; knots drawn uniformly without replacement from the
// admissible window. Repetitions are seeded deterministically and fanned out
// across worker threads.
std::vector<CondBenchRow> cond_benchmark(int n, int k, int r, const std::string& design,
                                         int reps, std::uint64_t seed,
                                         const std::vector<LsRoute>& routes = {LsRoute::FF, LsRoute::DD, LsRoute::DB});

}  // namespace discspline
