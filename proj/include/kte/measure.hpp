#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kte/grid.hpp"

namespace kte {

// Finitely supported probability measure. Points are stored flat,
// dim coordinates per point.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    // Throws InvalidArgument unless weights are positive, sum to 1 within
    // 1e-12 and points are pairwise distinct.
    DiscreteMeasure(std::size_t dim, std::vector<double> points, std::vector<double> weights);

    // Rescales the weights to unit mass before validation.
    static DiscreteMeasure normalized(std::size_t dim, std::vector<double> points, std::vector<double> weights);
    static DiscreteMeasure dirac(std::span<const double> point);
    // Grid nodes with the given node weights; zero-weight nodes are dropped
    // when drop_zero is set and rejected otherwise.
    static DiscreteMeasure from_grid(const Grid& grid, std::span<const double> weights, bool drop_zero = false);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }
    std::span<const double> point(std::size_t i) const { return {points_.data() + i * dim_, dim_}; }
    std::span<const double> points() const { return points_; }
    std::span<const double> weights() const { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }

    // Law of X + Y for independent X ~ this, Y ~ other; coinciding sums merge.
    DiscreteMeasure convolve(const DiscreteMeasure& other) const;
    // Mixture sum_i t_i m_i of measures on one common support.
    static DiscreteMeasure mixture(std::span<const DiscreteMeasure> ms, std::span<const double> ts);
    bool same_support(const DiscreteMeasure& other) const;

private:
    std::size_t dim_ = 1;
    std::vector<double> points_;
    std::vector<double> weights_;
};

// Values u(omega_i) in R^dim aligned with a measure's support.
struct VectorSample {
    std::size_t dim = 1;
    std::vector<double> values;

    VectorSample() = default;
    VectorSample(std::size_t d, std::vector<double> v);
    static VectorSample scalar(std::vector<double> v) { return VectorSample(1, std::move(v)); }

    std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
    std::span<const double> at(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

}  // namespace kte
