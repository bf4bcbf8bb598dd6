#pragma once

#include <span>
#include <string>
#include <vector>

namespace sheath {

/// Cell-centered 1D grid on [0, L].
///
/// Cells are indexed 0..N-1; `edges()` has N+1 entries. Besides the cell
/// centers the grid exposes the "node" set {0, centers..., L} used by the
/// potential solver, so the wall value can be carried exactly.
class Grid1D {
public:
    enum class Grading { uniform, geometric };

    static Grid1D uniform(double length, int cells);

    /// Geometric refinement toward x = 0: the first cell has width `first_width`
    /// and widths grow by `ratio` until they reach `interior_width`; the rest of
    /// the domain is filled with uniform cells (adjusted to land on L exactly).
    static Grid1D geometric(double length, double first_width, double ratio, double interior_width);

    /// Build from explicit edges (validated).
    explicit Grid1D(std::vector<double> edges, Grading grading = Grading::uniform, double ratio = 1.0);

    int cells() const { return static_cast<int>(widths_.size()); }
    double length() const { return edges_.back(); }
    double min_width() const;

    std::span<const double> edges() const { return edges_; }
    std::span<const double> centers() const { return centers_; }
    std::span<const double> widths() const { return widths_; }
    std::span<const double> nodes() const { return nodes_; }

    double center(int i) const { return centers_[static_cast<std::size_t>(i)]; }
    double width(int i) const { return widths_[static_cast<std::size_t>(i)]; }

    Grading grading() const { return grading_; }
    double ratio() const { return ratio_; }

    /// Index of the cell containing x (clamped to [0, N-1]).
    int locate(double x) const;

    bool same_as(const Grid1D& other) const;

private:
    std::vector<double> edges_;
    std::vector<double> centers_;
    std::vector<double> widths_;
    std::vector<double> nodes_;
    Grading grading_ = Grading::uniform;
    double ratio_ = 1.0;
};

}  // namespace sheath
