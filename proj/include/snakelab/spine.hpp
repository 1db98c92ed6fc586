#pragma once

// The spatial spine xi (d-dimensional Brownian motion from 0) carrying the
// grafting subordinator V with Laplace exponent psi*' = psi' - alpha:
// pure drift 2 beta t for the quadratic family, a (gamma-1)-stable
// subordinator for the stable family (Kanter sampling). Last-exit times are
// taken for the full norm (theta) and for the first three coordinates (gamma).

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "snakelab/mechanism.hpp"
#include "snakelab/rng.hpp"

namespace snakelab {

// one-sided stable variable with E e^{-l S} = e^{-l^a}, a in (0,1) (Kanter)
inline double stable_positive_sample(double a, Rng& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double theta = M_PI * u01(rng);
    while (theta <= 0.0 || theta >= M_PI) theta = M_PI * u01(rng);
    std::exponential_distribution<double> exp1(1.0);
    double w = exp1(rng);
    while (w == 0.0) w = exp1(rng);
    const double A = std::pow(std::sin(a * theta), a / (1.0 - a)) * std::sin((1.0 - a) * theta) /
                     std::pow(std::sin(theta), 1.0 / (1.0 - a));
    return std::pow(A / w, (1.0 - a) / a);
}

struct SpineSample {
    int dim = 0;
    std::vector<double> times;  // increasing, starts at 0
    std::vector<double> xi;     // times.size() x dim, xi_0 = 0
    std::vector<double> V;      // nondecreasing, V_0 = 0
    bool censored = false;      // transient walk did not reach its escape radius

    std::size_t grid_count() const { return times.size(); }
    const double* at(std::size_t i) const { return xi.data() + i * dim; }

    double norm_full(std::size_t i) const {
        double s = 0.0;
        const double* x = at(i);
        for (int j = 0; j < dim; ++j) s += x[j] * x[j];
        return std::sqrt(s);
    }

    double norm3(std::size_t i) const {
        double s = 0.0;
        const double* x = at(i);
        const int m = dim < 3 ? dim : 3;
        for (int j = 0; j < m; ++j) s += x[j] * x[j];
        return std::sqrt(s);
    }
};

namespace detail {

struct VIncrement {
    bool drift = true;
    double rate = 0.0;   // drift rate 2 beta, or stable scale base c*gamma
    double index = 0.0;  // gamma - 1 for the stable case

    static VIncrement for_mechanism(const BranchingMechanism& m) {
        VIncrement v;
        if (m.is_quadratic()) {
            v.drift = true;
            v.rate = 2.0 * m.beta;
        } else if (m.is_pure_stable()) {
            v.drift = false;
            v.rate = m.stable_c * m.stable_gamma;
            v.index = m.stable_gamma - 1.0;
        } else {
            throw std::domain_error("spine: V sampler known for quadratic/stable only");
        }
        return v;
    }

    double sample(double dt, Rng& rng) const {
        if (drift) return rate * dt;
        return std::pow(rate * dt, 1.0 / index) * stable_positive_sample(index, rng);
    }
};

}  // namespace detail

// spine on the fixed uniform grid [0, a]
inline SpineSample sample_spine(const BranchingMechanism& mech, int dim, double a,
                                double grid_step, Rng& rng) {
    if (dim < 1 || !(a > 0.0) || !(grid_step > 0.0) || grid_step > a)
        throw std::invalid_argument("sample_spine: bad arguments");
    const auto vinc = detail::VIncrement::for_mechanism(mech);
    const std::size_t steps = static_cast<std::size_t>(std::ceil(a / grid_step));
    const double dt = a / static_cast<double>(steps);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpineSample s;
    s.dim = dim;
    s.times.reserve(steps + 1);
    s.xi.assign(dim, 0.0);
    s.V.reserve(steps + 1);
    s.times.push_back(0.0);
    s.V.push_back(0.0);
    const double sd = std::sqrt(dt);
    for (std::size_t i = 1; i <= steps; ++i) {
        // index-based: push_back may reallocate xi mid-loop
        const std::size_t base = (i - 1) * dim;
        for (int j = 0; j < dim; ++j) s.xi.push_back(s.xi[base + j] + sd * normal(rng));
        s.times.push_back(dt * static_cast<double>(i));
        s.V.push_back(s.V.back() + vinc.sample(dt, rng));
    }
    return s;
}

struct TransientOptions {
    double dt_fine = 2e-4;        // step while the 3-coordinate norm is near the balls
    double escape_factor = 256.0; // stop once the 3-coordinate norm reaches this x r_max
    double max_time = 1e6;        // censor beyond this horizon
    double relative_step = 0.15;  // far-field step: sqrt(d dt) <= this x distance
};

// spine run until the 3-coordinate norm escapes past escape_factor * r_max
// (late returns to the monitored balls then have probability <= 1/escape_factor,
// which keeps the Laplace-functional bias below the Monte Carlo resolution).
// Step size grows quadratically with the distance to the monitored balls.
inline SpineSample sample_spine_transient(const BranchingMechanism& mech, int dim, double r_max,
                                          Rng& rng, TransientOptions opt = {}) {
    if (dim < 4)
        throw std::invalid_argument("sample_spine_transient: requires d >= 4");
    if (!(r_max > 0.0)) throw std::invalid_argument("sample_spine_transient: r_max must be > 0");
    const auto vinc = detail::VIncrement::for_mechanism(mech);
    const double r_escape = opt.escape_factor * r_max;
    std::normal_distribution<double> normal(0.0, 1.0);
    SpineSample s;
    s.dim = dim;
    s.times.push_back(0.0);
    s.xi.assign(dim, 0.0);
    s.V.push_back(0.0);
    std::vector<double> x(dim, 0.0);
    double t = 0.0, rho3 = 0.0;
    while (rho3 < r_escape) {
        if (t > opt.max_time) {
            s.censored = true;
            break;
        }
        const double dist = rho3 - 1.05 * r_max;
        double dt = opt.dt_fine;
        if (dist > 0.0) {
            const double far = opt.relative_step * dist;
            dt = std::max(opt.dt_fine, far * far / static_cast<double>(dim));
        }
        const double sd = std::sqrt(dt);
        for (int j = 0; j < dim; ++j) x[j] += sd * normal(rng);
        t += dt;
        s.times.push_back(t);
        s.xi.insert(s.xi.end(), x.begin(), x.end());
        s.V.push_back(s.V.back() + vinc.sample(dt, rng));
        rho3 = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    }
    return s;
}

struct ExitRecord {
    std::vector<double> r;
    std::vector<double> theta;  // full-norm last exits
    std::vector<double> gamma;  // 3-coordinate last exits
    bool censored = false;
};

inline ExitRecord last_exit(const SpineSample& spine, std::vector<double> r_list) {
    std::sort(r_list.begin(), r_list.end());
    ExitRecord rec;
    rec.r = r_list;
    rec.censored = spine.censored;
    rec.theta.assign(r_list.size(), 0.0);
    rec.gamma.assign(r_list.size(), 0.0);
    for (std::size_t i = 0; i < spine.grid_count(); ++i) {
        const double nf = spine.norm_full(i);
        const double n3 = spine.norm3(i);
        const double t = spine.times[i];
        for (std::size_t k = 0; k < r_list.size(); ++k) {
            if (nf <= r_list[k]) rec.theta[k] = t;
            if (n3 <= r_list[k]) rec.gamma[k] = t;
        }
    }
    return rec;
}

}  // namespace snakelab
