#include "kte/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "kte/error.hpp"

namespace kte {

namespace {

bool lex_less(std::span<const double> a, std::span<const double> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<double> points, std::vector<double> weights)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
    require(dim_ >= 1, ErrorCode::InvalidArgument, "measure dimension must be at least 1");
    require(!weights_.empty(), ErrorCode::InvalidArgument, "measure needs at least one point");
    require(points_.size() == weights_.size() * dim_, ErrorCode::InvalidArgument,
            "measure points and weights have mismatched lengths");
    double total = 0.0;
    for (double w : weights_) {
        require(std::isfinite(w) && w > 0.0, ErrorCode::InvalidArgument, "measure weights must be positive");
        total += w;
    }
    require(std::fabs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "measure weights must sum to 1");
    for (double x : points_) require(std::isfinite(x), ErrorCode::InvalidArgument, "measure points must be finite");
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lex_less(point(a), point(b)); });
    for (std::size_t k = 1; k < order.size(); ++k) {
        auto a = point(order[k - 1]), b = point(order[k]);
        require(!std::equal(a.begin(), a.end(), b.begin()), ErrorCode::InvalidArgument,
                "measure points must be pairwise distinct");
    }
}

DiscreteMeasure DiscreteMeasure::normalized(std::size_t dim, std::vector<double> points, std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    require(total > 0.0 && std::isfinite(total), ErrorCode::InvalidArgument, "measure has no mass");
    for (double& w : weights) w /= total;
    return DiscreteMeasure(dim, std::move(points), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::dirac(std::span<const double> point) {
    return DiscreteMeasure(point.size(), std::vector<double>(point.begin(), point.end()), {1.0});
}

DiscreteMeasure DiscreteMeasure::from_grid(const Grid& grid, std::span<const double> weights, bool drop_zero) {
    require(weights.size() == grid.size(), ErrorCode::InvalidArgument, "grid weights have the wrong length");
    std::vector<double> pts, ws;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (weights[k] == 0.0 && drop_zero) continue;
        auto p = grid.point(k);
        pts.insert(pts.end(), p.begin(), p.begin() + static_cast<std::ptrdiff_t>(grid.dim));
        ws.push_back(weights[k]);
    }
    return DiscreteMeasure(grid.dim, std::move(pts), std::move(ws));
}

DiscreteMeasure DiscreteMeasure::convolve(const DiscreteMeasure& other) const {
    require(dim_ == other.dim_, ErrorCode::InvalidArgument, "convolution of measures of different dimension");
    std::map<std::vector<double>, double> merged;
    std::vector<double> key(dim_);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = 0; j < other.size(); ++j) {
            for (std::size_t d = 0; d < dim_; ++d) key[d] = point(i)[d] + other.point(j)[d];
            merged[key] += weight(i) * other.weight(j);
        }
    std::vector<double> pts, ws;
    for (const auto& [p, w] : merged) {
        pts.insert(pts.end(), p.begin(), p.end());
        ws.push_back(w);
    }
    return normalized(dim_, std::move(pts), std::move(ws));
}

bool DiscreteMeasure::same_support(const DiscreteMeasure& other) const {
    return dim_ == other.dim_ && points_ == other.points_;
}

DiscreteMeasure DiscreteMeasure::mixture(std::span<const DiscreteMeasure> ms, std::span<const double> ts) {
    require(!ms.empty() && ms.size() == ts.size(), ErrorCode::InvalidArgument, "mixture needs one weight per measure");
    double total = 0.0;
    for (double t : ts) {
        require(t >= 0.0 && std::isfinite(t), ErrorCode::InvalidArgument, "mixture weights must be nonnegative");
        total += t;
    }
    require(std::fabs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "mixture weights must sum to 1");
    std::vector<double> ws(ms[0].size(), 0.0);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        require(ms[i].same_support(ms[0]), ErrorCode::InvalidArgument, "mixture measures need a common support");
        for (std::size_t k = 0; k < ws.size(); ++k) ws[k] += ts[i] * ms[i].weight(k);
    }
    return normalized(ms[0].dim(), std::vector<double>(ms[0].points().begin(), ms[0].points().end()), std::move(ws));
}

VectorSample::VectorSample(std::size_t d, std::vector<double> v) : dim(d), values(std::move(v)) {
    require(dim >= 1 && values.size() % dim == 0, ErrorCode::InvalidArgument, "sample length is not a multiple of dim");
    for (double x : values) require(std::isfinite(x), ErrorCode::InvalidArgument, "sample values must be finite");
}

}  // namespace kte
