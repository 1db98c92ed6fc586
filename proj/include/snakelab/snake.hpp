#pragma once

// The conditionally-Gaussian snake over a height excursion: per coordinate a
// Brownian path along the current ancestral line, kept as a stack of values at
// the contour's lattice levels. Per coordinate,
//   Var(W^_t - W^_s | H) = d_tree(s, t).

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "snakelab/point_cloud.hpp"
#include "snakelab/rng.hpp"
#include "snakelab/trees.hpp"

namespace snakelab {

struct SnakeSample {
    int dim = 0;
    std::vector<double> origin;
    std::vector<double> endpoint;  // grid_count x dim, row-major
    double sigma = 0.0;
    std::size_t grid_count = 0;

    const double* at(std::size_t i) const { return endpoint.data() + i * dim; }
};

inline SnakeSample sample_snake(const HeightExcursion& exc, const double* x, int dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("sample_snake: dim must be >= 1");
    SnakeSample s;
    s.dim = dim;
    s.origin.assign(x, x + dim);
    s.sigma = exc.sigma;
    s.grid_count = exc.grid_count();
    s.endpoint.resize(s.grid_count * dim);

    const double step = exc.height_step;
    const double sd = std::sqrt(step);
    std::normal_distribution<double> normal(0.0, 1.0);

    // ancestral-line values per lattice level; level 0 holds the origin
    std::vector<double> stack(s.origin);
    stack.reserve(64 * dim);
    for (int j = 0; j < dim; ++j) s.endpoint[j] = x[j];
    for (std::size_t i = 1; i < s.grid_count; ++i) {
        const double dh = exc.heights[i] - exc.heights[i - 1];
        if (std::abs(std::abs(dh) - step) > 1e-9 * step)
            throw std::invalid_argument("sample_snake: excursion is not a lattice contour");
        if (dh > 0.0) {
            // index-based: push_back may reallocate the stack mid-loop
            const std::size_t base = stack.size() - dim;
            for (int j = 0; j < dim; ++j) stack.push_back(stack[base + j] + sd * normal(rng));
        } else {
            stack.resize(stack.size() - dim);
        }
        const double* top = stack.data() + stack.size() - dim;
        double* out = s.endpoint.data() + i * dim;
        for (int j = 0; j < dim; ++j) out[j] = top[j];
    }
    return s;
}

struct OccupationCloud {
    PointCloud cloud;  // one atom per grid point, weight sigma/grid_count
    double sigma = 0.0;
};

// occupation measure (image of Lebesgue on [0, sigma] under the endpoint) and
// range (the same points, weights ignored)
inline OccupationCloud occupation_and_range(const SnakeSample& s) {
    OccupationCloud oc;
    oc.sigma = s.sigma;
    oc.cloud.dim = s.dim;
    oc.cloud.coords = s.endpoint;
    oc.cloud.weights.assign(s.grid_count, s.sigma / static_cast<double>(s.grid_count));
    return oc;
}

// smallest grid index whose endpoint lies in the closed ball, if any
inline std::optional<std::size_t> first_hitting(const SnakeSample& s, const double* center,
                                                double radius) {
    if (!(radius > 0.0)) throw std::domain_error("first_hitting: radius must be > 0");
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < s.grid_count; ++i)
        if (dist2(s.at(i), center, s.dim) <= r2) return i;
    return std::nullopt;
}

inline double min_distance_to(const SnakeSample& s, const double* center) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.grid_count; ++i)
        best = std::min(best, dist2(s.at(i), center, s.dim));
    return std::sqrt(best);
}

}  // namespace snakelab
