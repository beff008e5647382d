#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kte {

// Uniform axis-aligned grid in one or two dimensions. Nodes are stored
// row-major with the last axis fastest.
struct Grid {
    std::size_t dim = 1;
    std::array<double, 2> origin{0.0, 0.0};
    std::array<double, 2> h{1.0, 1.0};
    std::array<std::size_t, 2> n{2, 1};

    static Grid line(double lo, double hi, std::size_t count);
    static Grid plane(double lo0, double hi0, std::size_t n0, double lo1, double hi1, std::size_t n1);

    void validate() const;
    std::size_t size() const { return dim == 1 ? n[0] : n[0] * n[1]; }
    double coord(std::size_t axis, std::size_t i) const { return origin[axis] + static_cast<double>(i) * h[axis]; }
    double lo(std::size_t axis) const { return origin[axis]; }
    double hi(std::size_t axis) const { return coord(axis, n[axis] - 1); }
    std::size_t flat(std::size_t i0, std::size_t i1) const { return dim == 1 ? i0 : i0 * n[1] + i1; }
    std::array<std::size_t, 2> multi(std::size_t k) const {
        return dim == 1 ? std::array<std::size_t, 2>{k, 0} : std::array<std::size_t, 2>{k / n[1], k % n[1]};
    }
    std::array<double, 2> point(std::size_t k) const;
    double cell_volume() const { return dim == 1 ? h[0] : h[0] * h[1]; }
    bool operator==(const Grid&) const = default;
};

// Scalar or vector field sampled on a Grid. Vector fields store components
// contiguously per node.
class GridField {
public:
    GridField() = default;
    GridField(Grid grid, std::vector<double> values, std::size_t components = 1);

    template <class F>
    static GridField sample(const Grid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.point(k));
        return GridField(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    std::size_t components() const { return components_; }
    std::size_t size() const { return grid_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double at(std::size_t k, std::size_t c) const { return values_[k * components_ + c]; }
    std::span<const double> vec(std::size_t k) const { return {values_.data() + k * components_, components_}; }

    // sup |f| and inf f over all nodes and components.
    double sup_abs() const { return sup_abs_; }
    double inf() const { return inf_; }
    // Largest adjacent difference divided by the spacing, over all axes.
    double lipschitz() const { return lipschitz_; }

    // Multilinear interpolation of one component; x must lie inside the grid.
    double interpolate(std::span<const double> x, std::size_t component = 0) const;
    bool contains(std::span<const double> x) const;

private:
    Grid grid_;
    std::vector<double> values_;
    std::size_t components_ = 1;
    double sup_abs_ = 0.0;
    double inf_ = 0.0;
    double lipschitz_ = 0.0;
};

// Gradient by central differences, one-sided on the boundary.
GridField central_gradient(const GridField& f);

// CSV form: a header naming axis parameters, their values, then the samples
// (one node per line, components comma separated) in row-major order.
void write_csv(std::ostream& os, const GridField& f);
GridField read_csv(std::istream& is);
GridField read_csv_file(const std::string& path);
void write_csv_file(const std::string& path, const GridField& f);

}  // namespace kte
