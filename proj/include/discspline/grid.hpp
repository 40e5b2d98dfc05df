#pragma once

#include <Eigen/Dense>
#include <vector>

namespace discspline {

// Shared numeric tolerances. All floating point is double precision.
struct Tolerances {
    double identity_rel = 1e-8;   // relative tolerance for identity-type checks
    double pivot_floor = 1e-14;   // Cholesky pivot floor, relative to matrix scale
};

// Sorted distinct design points x_0 < ... < x_{n-1} inside an interval [a, b].
// The sentinel x_n := b is available to interval logic via locate().
class DesignGrid {
public:
    DesignGrid(std::vector<double> points, double a, double b);

    // Convenience: domain [points.front(), points.back()].
    explicit DesignGrid(std::vector<double> points);

    int size() const { return static_cast<int>(pts_.size()); }
    double a() const { return a_; }
    double b() const { return b_; }
    double operator[](int i) const { return pts_[static_cast<size_t>(i)]; }
    const std::vector<double>& points() const { return pts_; }

    // Interval index under the half-open convention: returns i such that
    // x lies in (x_{i-1}, x_i] in 0-based storage (equivalently, the number
    // of design points strictly below x), 0 when x <= x_0 and n when
    // x > x_{n-1}. A query equal to a design point resolves leftward.
    // Throws std::domain_error when x is outside [a, b].
    int locate(double x) const;

    double mean_gap() const;

private:
    std::vector<double> pts_;
    double a_, b_;
};

}  // namespace discspline
