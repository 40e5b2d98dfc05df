#pragma once

#include <Eigen/Dense>
#include <vector>

#include "discspline/banded.hpp"
#include "discspline/grid.hpp"

namespace discspline {

// Falling factorial basis of degree k over a design grid. The dense basis has
// one function per design point; a sparse variant restricts the piecewise
// members to knots t_j = x_{knot_idx[j]} (0-based design indices), which must
// satisfy k <= knot_idx[0] and knot_idx.back() <= n-2.
class FFBasisSpec {
public:
    FFBasisSpec(DesignGrid grid, int degree);                               // dense
    FFBasisSpec(DesignGrid grid, int degree, std::vector<int> knot_idx);    // sparse

    const DesignGrid& grid() const { return grid_; }
    int degree() const { return k_; }
    bool dense() const { return dense_; }
    int dim() const;                                 // n dense, r+k+1 sparse
    int num_knots() const { return static_cast<int>(knots_.size()); }
    const std::vector<int>& knot_indices() const { return knots_; }

    // Column j of the dense basis matrix that this basis member corresponds
    // to (identity when dense).
    int dense_column(int j) const;

private:
    DesignGrid grid_;
    int k_;
    bool dense_;
    std::vector<int> knots_;
};

// h^k_j(x), 0-based basis index j: Newton polynomials for j <= k, truncated
// Newton polynomials (strict indicator x > knot) above.
double ffb_eval(const FFBasisSpec& spec, int j, double x);

// d-th derivative of h^k_j at x (left derivative at the knot). Uses the
// elementary-symmetric-function recurrence, O(k^2) per query.
double ffb_deriv_eval(const FFBasisSpec& spec, int j, int d, double x);

// One-sided variant: side > 0 evaluates the right limit at a breakpoint,
// side < 0 (default convention) the left. Used by boundary-evaluation sums.
double ffb_deriv_eval_one_sided(const FFBasisSpec& spec, int j, int d, double x, int side);

// Discrete derivative matrix family of order m over a grid:
//   D: (n-m) x n, rows are m! * sliding divided difference weights
//   B: n x n extended version (identity-order fall-off in the first m rows)
//   W: (n-m) diagonal weights (x_{i+m}-x_i)/m;  Z: n diagonal extended
//   C = W * D (the weighted operator whose l1 norm is the TV penalty)
struct PenaltyOperators {
    int order = 0;
    BandedMatrix D;
    BandedMatrix B;
    Eigen::VectorXd W;
    Eigen::VectorXd Z;
    BandedMatrix C;
};

PenaltyOperators build_penalty_ops(const DesignGrid& grid, int m);

enum class HVariant { H, H_inv, H_T, H_inv_T };

struct FlopCount {
    long adds = 0, subs = 0, mults = 0, divs = 0;
    long total() const { return adds + subs + mults + divs; }
};

// In-place fast multiplication by the dense-basis matrix H, its inverse, or
// their transposes, in <= 4nk flops via iterated scaled (reverse) cumulative
// sums and differences. Requires a dense knot set.
void fast_h_mult(const FFBasisSpec& spec, Eigen::VectorXd& v, HVariant variant,
                 FlopCount* flops = nullptr);

// Dense H (entries h^k_j(x_i)); verification-only path, guarded at n <= 2000.
Eigen::MatrixXd dense_basis_matrix(const FFBasisSpec& spec);

// max |Z^{k+1} B^{k+1} H^k - I| over all entries.
double verify_inverse_identity(const DesignGrid& grid, int k);

}  // namespace discspline
