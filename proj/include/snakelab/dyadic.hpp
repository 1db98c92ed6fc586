#pragma once

// Dyadic cube decomposition of R^d with lattice offset p = floor(log2(4 sqrt d)),
// so that 2^p > 2 sqrt(d). Centers live on 2^{-n-p} Z^d; the outer cube D_n(y)
// has side 2^{-n}, the inner cube D*_n(y) has side 2^{-n-p}. Distinct inner
// cubes at one level are disjoint, and D*_n(y) c B(y, 2^{-n-p} sqrt d) c D_n(y).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace snakelab {

inline int dyadic_p(int d) {
    if (d < 1) throw std::invalid_argument("dyadic_p: d must be >= 1");
    return static_cast<int>(std::floor(std::log2(4.0 * std::sqrt(static_cast<double>(d)))));
}

// level n(r): (1/2)(1+2^{-p}) sqrt(d) 2^{-n} < r <= (1+2^{-p}) sqrt(d) 2^{-n}
inline int dyadic_level(double r, int d) {
    if (!(r > 0.0)) throw std::invalid_argument("dyadic_level: r must be > 0");
    const int p = dyadic_p(d);
    const double c = (1.0 + std::ldexp(1.0, -p)) * std::sqrt(static_cast<double>(d));
    return static_cast<int>(std::floor(std::log2(c / r)));
}

struct DyadicCube {
    int level = 0;                // n
    int p = 0;                    // lattice offset
    std::vector<double> center;   // y in 2^{-n-p} Z^d

    double outer_side() const { return std::ldexp(1.0, -level); }
    double inner_side() const { return std::ldexp(1.0, -level - p); }
};

// The cube of x at level n: y_j = 2^{-n-p} floor(x_j 2^{n+p} + 1/2).
// x lies in D*_n(y).
inline DyadicCube dyadic_cube_of(const double* x, int d, int level) {
    const int p = dyadic_p(d);
    DyadicCube c;
    c.level = level;
    c.p = p;
    c.center.resize(d);
    const double scale = std::ldexp(1.0, level + p);
    for (int j = 0; j < d; ++j) {
        const double v = std::floor(x[j] * scale + 0.5);
        if (std::abs(v) > 4.5e15) throw std::domain_error("dyadic_cube_of: lattice overflow");
        c.center[j] = v / scale;
    }
    return c;
}

// locate(x, r): level n(r) and center y with x in D*_{n(r)}(y) and D_{n(r)}(y) c B(x, r).
// Requires r < 1/(2d).
inline DyadicCube dyadic_locate(const double* x, int d, double r) {
    if (!(r > 0.0 && r < 1.0 / (2.0 * d)))
        throw std::domain_error("dyadic_locate: require 0 < r < 1/(2d)");
    return dyadic_cube_of(x, d, dyadic_level(r, d));
}

// Nested partition cell used for box counting: side 2^{-level}, aligned at 0.
// Cells refine exactly across dyadic levels, so occupied-cell counts are
// monotone along eps ladders.
inline std::vector<std::int64_t> box_cell_of(const double* x, int d, int level) {
    std::vector<std::int64_t> cell(d);
    const double scale = std::ldexp(1.0, level);
    for (int j = 0; j < d; ++j) {
        const double v = std::floor(x[j] * scale);
        if (std::abs(v) > 4.5e15) throw std::domain_error("box_cell_of: lattice overflow");
        cell[j] = static_cast<std::int64_t>(v);
    }
    return cell;
}

}  // namespace snakelab
