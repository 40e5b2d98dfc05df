#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "discspline/grid.hpp"

namespace testutil {

// Random sorted design on [0,1] with spacing ratio bounded by ratio_cap.
inline discspline::DesignGrid random_grid(int n, std::uint64_t seed, double ratio_cap = 10.0,
                                          double a = 0.0, double b = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(1.0, ratio_cap);
    std::vector<double> pts(static_cast<size_t>(n));
    pts[0] = 0.0;
    for (int i = 1; i < n; ++i) pts[static_cast<size_t>(i)] = pts[static_cast<size_t>(i - 1)] + gap(rng);
    double lo = pts.front(), hi = pts.back();
    for (auto& p : pts) p = a + (b - a) * (p - lo) / (hi - lo);
    pts.front() = a;  // pin the hull exactly against rounding in the map
    pts.back() = b;
    return discspline::DesignGrid(pts, a, b);
}

inline discspline::DesignGrid uniform_grid(int n, double a = 0.0, double b = 1.0) {
    std::vector<double> pts(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pts[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1.0);
    return discspline::DesignGrid(pts, a, b);
}

inline Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace testutil
