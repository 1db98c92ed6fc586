#pragma once

// Adaptive Simpson quadrature and the regularized lower incomplete gamma
// function (for chi-square ball probabilities).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace snakelab {

namespace detail {

template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// adaptive Simpson with relative tolerance; the absolute budget comes from a
// coarse first pass over initial_panels
template <class F>
double adaptive_simpson(F f, double a, double b, double rel_tol, int max_depth = 48,
                        int initial_panels = 8) {
    if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: bad interval");
    if (a == b) return 0.0;
    const double h = (b - a) / initial_panels;
    std::vector<double> f0s(initial_panels), fms(initial_panels), f1s(initial_panels),
        wholes(initial_panels);
    double scale = 0.0;
    for (int k = 0; k < initial_panels; ++k) {
        const double x0 = a + k * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        f0s[k] = f(x0);
        fms[k] = f(xm);
        f1s[k] = f(x1);
        wholes[k] = h / 6.0 * (f0s[k] + 4.0 * fms[k] + f1s[k]);
        scale += std::abs(wholes[k]);
    }
    const double tol = rel_tol * std::max(scale, 1e-300);
    double total = 0.0;
    for (int k = 0; k < initial_panels; ++k) {
        const double x0 = a + k * h, x1 = x0 + h;
        total += detail::simpson_rec(f, x0, x1, f0s[k], fms[k], f1s[k], wholes[k],
                                     tol / initial_panels, max_depth);
    }
    return total;
}

// regularized lower incomplete gamma P(a, x)
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // series
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction for Q(a, x)
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

// P(|xi_t| <= r) for a standard d-dimensional Brownian motion at time t
inline double ball_probability(int d, double r, double t) {
    if (t <= 0.0) return r >= 0.0 ? 1.0 : 0.0;
    return gamma_p(0.5 * d, 0.5 * r * r / t);
}

}  // namespace snakelab
