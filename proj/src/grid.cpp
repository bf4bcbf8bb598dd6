#include "sheath/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sheath {

Grid1D::Grid1D(std::vector<double> edges, Grading grading, double ratio)
    : edges_(std::move(edges)), grading_(grading), ratio_(ratio) {
    if (edges_.size() < 17) {
        throw std::invalid_argument("grid: at least 16 cells required");
    }
    if (edges_.front() != 0.0) {
        throw std::invalid_argument("grid: first edge must be 0");
    }
    if (grading_ == Grading::geometric && !(ratio_ > 1.0 && ratio_ <= 1.2)) {
        throw std::invalid_argument("grid: geometric ratio must lie in (1, 1.2]");
    }
    const std::size_t n = edges_.size() - 1;
    widths_.resize(n);
    centers_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        widths_[i] = edges_[i + 1] - edges_[i];
        if (!(widths_[i] > 0.0) || !std::isfinite(widths_[i])) {
            throw std::invalid_argument("grid: edges must be strictly increasing");
        }
        centers_[i] = 0.5 * (edges_[i] + edges_[i + 1]);
    }
    nodes_.reserve(n + 2);
    nodes_.push_back(0.0);
    nodes_.insert(nodes_.end(), centers_.begin(), centers_.end());
    nodes_.push_back(edges_.back());
}

Grid1D Grid1D::uniform(double length, int cells) {
    if (!(length > 0.0)) throw std::invalid_argument("grid: length must be positive");
    if (cells < 16) throw std::invalid_argument("grid: at least 16 cells required");
    std::vector<double> e(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) e[static_cast<std::size_t>(i)] = length * i / cells;
    e.back() = length;
    return Grid1D(std::move(e));
}

Grid1D Grid1D::geometric(double length, double first_width, double ratio, double interior_width) {
    if (!(length > 0.0)) throw std::invalid_argument("grid: length must be positive");
    if (!(ratio > 1.0 && ratio <= 1.2)) {
        throw std::invalid_argument("grid: geometric ratio must lie in (1, 1.2]");
    }
    if (!(first_width > 0.0) || !(interior_width >= first_width)) {
        throw std::invalid_argument("grid: need 0 < first_width <= interior_width");
    }
    std::vector<double> e{0.0};
    double w = first_width;
    while (w < interior_width && e.back() + w < length) {
        e.push_back(e.back() + w);
        w *= ratio;
    }
    const double rest = length - e.back();
    const int n_uniform = std::max(1, static_cast<int>(std::ceil(rest / interior_width - 1e-9)));
    const double x0 = e.back();
    for (int k = 1; k <= n_uniform; ++k) e.push_back(x0 + rest * k / n_uniform);
    e.back() = length;
    return Grid1D(std::move(e), Grading::geometric, ratio);
}

double Grid1D::min_width() const { return *std::min_element(widths_.begin(), widths_.end()); }

int Grid1D::locate(double x) const {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    int i = static_cast<int>(it - edges_.begin()) - 1;
    return std::clamp(i, 0, cells() - 1);
}

bool Grid1D::same_as(const Grid1D& other) const { return edges_ == other.edges_; }

}  // namespace sheath
