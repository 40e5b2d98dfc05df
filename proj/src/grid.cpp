#include "discspline/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace discspline {

DesignGrid::DesignGrid(std::vector<double> points, double a, double b)
    : pts_(std::move(points)), a_(a), b_(b) {
    if (pts_.size() < 2) throw std::domain_error("DesignGrid: need at least 2 points");
    for (size_t i = 1; i < pts_.size(); ++i) {
        if (!(pts_[i - 1] < pts_[i]))
            throw std::domain_error("DesignGrid: points must be strictly increasing");
    }
    if (!(a_ <= pts_.front()) || !(pts_.back() <= b_))
        throw std::domain_error("DesignGrid: interval [a,b] must contain the points");
}

DesignGrid::DesignGrid(std::vector<double> points)
    : DesignGrid(points, points.front(), points.back()) {}

int DesignGrid::locate(double x) const {
    if (x < a_ || x > b_) throw std::domain_error("locate: query outside [a,b]");
    // Number of design points strictly below x; binary search.
    auto it = std::lower_bound(pts_.begin(), pts_.end(), x);
    return static_cast<int>(it - pts_.begin());
}

double DesignGrid::mean_gap() const {
    return (pts_.back() - pts_.front()) / static_cast<double>(size() - 1);
}

}  // namespace discspline
