#pragma once

// Height excursions of scaled Galton-Watson trees (planted contour walks),
// the tree pseudo-metric d(s,t) = H_s + H_t - 2 min, ball masses under the
// mass measure, and the excursion-duration tail N(sigma > t).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snakelab/mechanism.hpp"
#include "snakelab/offspring.hpp"
#include "snakelab/rng.hpp"

namespace snakelab {

struct ExcursionProvenance {
    std::string offspring;
    std::size_t n_target = 0;
    std::size_t progeny = 0;  // realized vertex count
    double height_scale = 0.0;
    double kappa = 0.0;  // stable walk constant, 0 for geometric
    int tries = 0;
};

struct HeightExcursion {
    // planted contour walk: heights[0] = heights.back() = 0, strictly positive
    // inside, steps of exactly +-height_step; heights.size() = 2*progeny + 1
    std::vector<double> heights;
    double sigma = 0.0;        // duration = progeny / n_target
    double height_step = 0.0;  // lattice quantum
    ExcursionProvenance prov;

    std::size_t grid_count() const { return heights.size(); }
    double time_step() const { return sigma / static_cast<double>(heights.size() - 1); }
    double time_at(std::size_t i) const { return time_step() * static_cast<double>(i); }
    double max_height() const { return *std::max_element(heights.begin(), heights.end()); }

    // rescale duration to sigma_new using the family's exact self-similarity:
    // heights scale by (sigma_new/sigma)^{1 - 1/gamma} (gamma = 2 quadratic)
    void rescale_duration(double sigma_new, double gamma) {
        const double ratio = sigma_new / sigma;
        const double hfac = std::pow(ratio, 1.0 - 1.0 / gamma);
        for (double& h : heights) h *= hfac;
        height_step *= hfac;
        sigma = sigma_new;
    }
};

inline constexpr int kRejectionBudget = 100000;

// GW tree conditioned on total progeny in [n_target, 2 n_target] by rejection,
// optionally also on sigma > sigma_floor; returns the planted contour.
inline HeightExcursion sample_height_excursion(const BranchingMechanism& mech,
                                               std::size_t n_target, Rng& rng,
                                               double sigma_floor = 0.0) {
    if (n_target < 100) throw std::invalid_argument("sample_height_excursion: n_target >= 100");
    const OffspringLaw law = OffspringLaw::for_mechanism(mech);
    std::vector<long long> offspring;
    offspring.reserve(2 * n_target);
    for (int attempt = 1; attempt <= kRejectionBudget; ++attempt) {
        offspring.clear();
        // preorder generation with early abort
        std::size_t progeny = 0;
        long long open = 1;  // individuals whose offspring are not yet drawn
        bool ok = true;
        while (open > 0) {
            if (++progeny > 2 * n_target) {
                ok = false;
                break;
            }
            const long long nu = law.sample(rng);
            offspring.push_back(nu);
            open += nu - 1;
        }
        if (!ok || progeny < n_target) continue;
        const double sigma = static_cast<double>(progeny) / static_cast<double>(n_target);
        if (sigma <= sigma_floor) continue;

        HeightExcursion exc;
        exc.sigma = sigma;
        const double a_n = law.walk_scale(mech, static_cast<double>(n_target));
        exc.height_step = a_n / static_cast<double>(n_target);
        exc.prov = {law.name(), n_target, progeny, exc.height_step,
                    law.kind() == OffspringLaw::Kind::zeta_stable ? law.kappa() : 0.0, attempt};

        // planted contour from the preorder offspring sequence
        exc.heights.reserve(2 * progeny + 1);
        exc.heights.push_back(0.0);
        std::vector<long long> remaining;
        remaining.reserve(256);
        long long h = 1;  // lattice units, root of the unplanted tree sits at 1
        std::size_t next_vertex = 0;
        exc.heights.push_back(exc.height_step);
        remaining.push_back(offspring[next_vertex++]);
        while (!remaining.empty()) {
            if (remaining.back() > 0) {
                --remaining.back();
                ++h;
                exc.heights.push_back(static_cast<double>(h) * exc.height_step);
                remaining.push_back(offspring[next_vertex++]);
            } else {
                remaining.pop_back();
                --h;
                exc.heights.push_back(static_cast<double>(h) * exc.height_step);
            }
        }
        if (exc.heights.size() != 2 * progeny + 1 || exc.heights.back() != 0.0)
            throw std::logic_error("sample_height_excursion: contour bookkeeping broke");
        return exc;
    }
    throw std::runtime_error("sample_height_excursion: rejection budget exhausted");
}

// d(s,t) = H_s + H_t - 2 min over [s^t, svt]
inline double tree_distance(const HeightExcursion& exc, std::size_t s, std::size_t t) {
    if (s >= exc.grid_count() || t >= exc.grid_count())
        throw std::out_of_range("tree_distance: bad grid index");
    if (s > t) std::swap(s, t);
    double m = exc.heights[s];
    for (std::size_t u = s; u <= t; ++u) m = std::min(m, exc.heights[u]);
    return exc.heights[s] + exc.heights[t] - 2.0 * m;
}

// a(t, r) = m(B(p(t), r)): mass-measure weight of the tree ball, by a linear
// scan with running minima to both sides
inline double ball_mass(const HeightExcursion& exc, std::size_t t, double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("ball_mass: r must be >= 0");
    if (t >= exc.grid_count()) throw std::out_of_range("ball_mass: bad grid index");
    const double ht = exc.heights[t];
    std::size_t count = 0;
    double m = ht;
    for (std::size_t s = t + 1; s < exc.grid_count(); ++s) {
        m = std::min(m, exc.heights[s]);
        if (exc.heights[s] + ht - 2.0 * m <= r) ++count;
    }
    m = ht;
    for (std::size_t s = t; s-- > 0;) {
        m = std::min(m, exc.heights[s]);
        if (exc.heights[s] + ht - 2.0 * m <= r) ++count;
    }
    ++count;  // s = t itself
    return exc.sigma * static_cast<double>(count) / static_cast<double>(exc.grid_count());
}

// CSV export: header "t,H", one row per grid point
inline void write_excursion_csv(const HeightExcursion& exc, std::ostream& os) {
    os.precision(17);
    os << "t,H\n";
    for (std::size_t i = 0; i < exc.grid_count(); ++i)
        os << exc.time_at(i) << ',' << exc.heights[i] << '\n';
}

// ---- excursion duration tail N(sigma > t) ----

// Levy tail of the Bernstein function psi^{-1}; closed forms for the two
// supported families, anything else is an error (no silent fallback)
inline double sigma_tail(const BranchingMechanism& mech, double t) {
    if (!(t > 0.0)) throw std::domain_error("sigma_tail: t must be > 0");
    if (mech.is_quadratic() && mech.alpha == 0.0) return 1.0 / std::sqrt(3.141592653589793 * mech.beta * t);
    if (mech.is_pure_stable() && mech.alpha == 0.0) {
        const double g = mech.stable_gamma;
        return std::pow(t, -1.0 / g) /
               (std::pow(mech.stable_c, 1.0 / g) * std::tgamma(1.0 - 1.0 / g));
    }
    throw std::domain_error("sigma_tail: closed form known for quadratic/stable only");
}

// sample sigma from N(sigma in ds | sigma > eps): inversion of the tail ratio
inline double sigma_conditional_sample(const BranchingMechanism& mech, double eps, Rng& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(rng);
    while (u == 0.0) u = u01(rng);
    if (mech.is_quadratic() && mech.alpha == 0.0) return eps / (u * u);
    if (mech.is_pure_stable() && mech.alpha == 0.0) return eps * std::pow(u, -mech.stable_gamma);
    throw std::domain_error("sigma_conditional_sample: quadratic/stable only");
}

// truncated duration transform: int_eps^inf (1 - e^{-lambda s}) nu(ds) where
// nu is the Levy measure of psi^{-1}; equals psi^{-1}(lambda) at eps = 0
inline double duration_transform_truncated(const BranchingMechanism& mech, double eps,
                                           double lambda) {
    if (!(eps >= 0.0 && lambda >= 0.0))
        throw std::domain_error("duration_transform_truncated: bad arguments");
    const double full = psi_inv(mech, lambda);
    if (eps == 0.0) return full;
    // int_0^eps (1 - e^{-lambda s}) nu(ds) with the substitution s = eps u^2
    // (quadratic) resp. s = eps u^gamma (stable) to regularize the density
    double head = 0.0;
    const int n = 4000;
    if (mech.is_quadratic() && mech.alpha == 0.0) {
        const double c0 = 1.0 / (2.0 * std::sqrt(3.141592653589793 * mech.beta));
        for (int i = 0; i < n; ++i) {
            const double u = (i + 0.5) / n;
            const double s = eps * u * u;
            // nu(ds) = c0 s^{-3/2} ds; ds = 2 eps u du
            head += (-std::expm1(-lambda * s)) * c0 * std::pow(s, -1.5) * 2.0 * eps * u / n;
        }
    } else if (mech.is_pure_stable() && mech.alpha == 0.0) {
        const double g = mech.stable_gamma;
        const double c0 = 1.0 / (g * std::pow(mech.stable_c, 1.0 / g) * std::tgamma(1.0 - 1.0 / g));
        for (int i = 0; i < n; ++i) {
            const double u = (i + 0.5) / n;
            const double s = eps * std::pow(u, g);
            // nu(ds) = c0 s^{-1-1/g} ds; ds = eps g u^{g-1} du
            head += (-std::expm1(-lambda * s)) * c0 * std::pow(s, -1.0 - 1.0 / g) * eps * g *
                    std::pow(u, g - 1.0) / n;
        }
    } else {
        throw std::domain_error("duration_transform_truncated: quadratic/stable only");
    }
    return full - head;
}

}  // namespace snakelab
