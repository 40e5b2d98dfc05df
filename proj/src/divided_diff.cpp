#include "discspline/divided_diff.hpp"

#include <algorithm>
#include <stdexcept>

namespace discspline {

Centers::Centers(std::vector<double> values) : vals_(std::move(values)) {
    if (vals_.empty()) throw std::domain_error("Centers: need at least one center");
    std::vector<double> sorted = vals_;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1])
            throw std::domain_error("Centers: centers must be pairwise distinct");
}

Eigen::VectorXd dd_weights(const Centers& centers) {
    const int r = centers.size();
    Eigen::VectorXd w(r);
    for (int i = 0; i < r; ++i) {
        double denom = 1.0;
        for (int j = 0; j < r; ++j)
            if (j != i) denom *= centers[i] - centers[j];
        w[i] = 1.0 / denom;
    }
    return w;
}

double divided_difference(const Eigen::VectorXd& f_values, const Centers& centers) {
    if (f_values.size() != centers.size())
        throw std::domain_error("divided_difference: values/centers size mismatch");
    if (centers.size() == 1) return f_values[0];
    return dd_weights(centers).dot(f_values);
}

double divided_difference_recursive(const Eigen::VectorXd& f_values, const Centers& centers) {
    if (f_values.size() != centers.size())
        throw std::domain_error("divided_difference: values/centers size mismatch");
    const int r = centers.size();
    std::vector<double> d(f_values.data(), f_values.data() + r);
    // d[i] holds f[z_i,...,z_{i+level}] after each level.
    for (int level = 1; level < r; ++level)
        for (int i = 0; i + level < r; ++i)
            d[i] = (d[i + 1] - d[i]) / (centers[i + level] - centers[i]);
    return d[0];
}

double newton_poly_eval(double x, const Centers& centers) {
    return newton_poly_eval(x, centers.values());
}

double newton_poly_eval(double x, const std::vector<double>& centers) {
    double p = 1.0;
    for (double t : centers) p *= x - t;
    return p;
}

double newton_interpolate(const Eigen::VectorXd& values, const Centers& centers, double x) {
    if (values.size() != centers.size())
        throw std::domain_error("newton_interpolate: values/centers size mismatch");
    const int r = centers.size();
    // Coefficients p[t_1,...,t_j] by the standard triangular scheme.
    std::vector<double> d(values.data(), values.data() + r);
    std::vector<double> coef(static_cast<size_t>(r));
    coef[0] = d[0];
    for (int level = 1; level < r; ++level) {
        for (int i = 0; i + level < r; ++i)
            d[i] = (d[i + 1] - d[i]) / (centers[i + level] - centers[i]);
        coef[static_cast<size_t>(level)] = d[0];
    }
    double out = 0.0, eta = 1.0;
    for (int j = 0; j < r; ++j) {
        out += coef[static_cast<size_t>(j)] * eta;
        eta *= x - centers[j];
    }
    return out;
}

}  // namespace discspline
