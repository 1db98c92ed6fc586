#pragma once

// Small statistics helpers shared by estimators and Monte Carlo checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace snakelab {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.n = xs.size();
    if (r.n == 0) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double q = 0.0;
    for (double x : xs) q += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(q / (static_cast<double>(r.n) * (static_cast<double>(r.n) - 1.0)));
    return r;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares: need >= 2 matched points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - (f.intercept + f.slope * x[i]);
            rss += e * e;
        }
        f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return f;
}

inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = q * (static_cast<double>(xs.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= xs.size()) return xs.back();
    const double w = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - w) + xs[lo + 1] * w;
}

// two-sample Kolmogorov-Smirnov statistic and the asymptotic critical value
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

inline double ks_critical(std::size_t n, std::size_t m, double alpha) {
    // c(alpha) = sqrt(-ln(alpha/2)/2)
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt((static_cast<double>(n) + static_cast<double>(m)) /
                         (static_cast<double>(n) * static_cast<double>(m)));
}

// Riemann zeta on (1, infinity) by Euler-Maclaurin
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw std::domain_error("riemann_zeta: s must exceed 1");
    const int K = 64;
    double sum = 0.0;
    for (int k = 1; k < K; ++k) sum += std::pow(k, -s);
    const double Kd = K;
    sum += std::pow(Kd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Kd, -s) +
           s * std::pow(Kd, -s - 1.0) / 12.0 -
           s * (s + 1.0) * (s + 2.0) * std::pow(Kd, -s - 3.0) / 720.0;
    return sum;
}

}  // namespace snakelab
