#pragma once

// Grafting along the spine: conditionally on (xi, V) the grafts form a Poisson
// point process with intensity dV_t x (snake excursions from xi_t). The sigma-
// finite excursion intensity is truncated to durations sigma > eps_trunc; the
// missing small-sigma mass is what the truncation correction in the T_gamma
// report accounts for.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "snakelab/gauge.hpp"
#include "snakelab/rng.hpp"
#include "snakelab/snake.hpp"
#include "snakelab/spine.hpp"
#include "snakelab/stats.hpp"
#include "snakelab/trees.hpp"

namespace snakelab {

struct Graft {
    double t = 0.0;  // graft time (a spine grid time)
    std::vector<double> origin;
    double sigma = 0.0;
    SnakeSample snake;
    double min_norm = 0.0;  // min_i |W^_i|, distance of the range to 0
};

struct GraftOptions {
    double nodes_per_unit_sigma = 2000.0;
    double sigma_cap = 64.0;
    double expected_count_limit = 1e6;
};

struct GraftedForest {
    double eps_trunc = 0.0;
    double sigma_cap = 0.0;
    double expected_count = 0.0;
    std::size_t clipped = 0;  // durations clamped at sigma_cap
    std::vector<Graft> grafts;  // sorted by t

    double sigma_total() const {
        double s = 0.0;
        for (const auto& g : grafts) s += g.sigma;
        return s;
    }
};

namespace detail {

// first spine index with V >= u (inverse-dV sampling of graft times)
inline std::size_t v_inverse_index(const SpineSample& spine, double u) {
    const auto it = std::lower_bound(spine.V.begin(), spine.V.end(), u);
    return it == spine.V.end() ? spine.V.size() - 1
                               : static_cast<std::size_t>(it - spine.V.begin());
}

}  // namespace detail

inline GraftedForest graft(const SpineSample& spine, const BranchingMechanism& mech,
                           double eps_trunc, Rng& rng, GraftOptions opt = {}) {
    if (!(eps_trunc > 0.0)) throw std::domain_error("graft: eps_trunc must be > 0");
    GraftedForest forest;
    forest.eps_trunc = eps_trunc;
    forest.sigma_cap = opt.sigma_cap;
    const double v_end = spine.V.back();
    forest.expected_count = v_end * sigma_tail(mech, eps_trunc);
    if (forest.expected_count > opt.expected_count_limit)
        throw std::domain_error("graft: truncation too small, expected count over limit");
    std::poisson_distribution<long long> poi(forest.expected_count);
    const long long k = poi(rng);
    const double family_gamma = mech.is_quadratic() ? 2.0 : mech.stable_gamma;
    std::uniform_real_distribution<double> uv(0.0, v_end);
    for (long long j = 0; j < k; ++j) {
        Graft g;
        const std::size_t idx = detail::v_inverse_index(spine, uv(rng));
        g.t = spine.times[idx];
        g.origin.assign(spine.at(idx), spine.at(idx) + spine.dim);
        g.sigma = sigma_conditional_sample(mech, eps_trunc, rng);
        if (g.sigma > opt.sigma_cap) {
            g.sigma = opt.sigma_cap;
            ++forest.clipped;
        }
        const auto n_target = static_cast<std::size_t>(
            std::max(100.0, std::min(1e7, g.sigma * opt.nodes_per_unit_sigma)));
        auto exc = sample_height_excursion(mech, n_target, rng);
        exc.rescale_duration(g.sigma, family_gamma);
        g.snake = sample_snake(exc, g.origin.data(), spine.dim, rng);
        const std::vector<double> zero(spine.dim, 0.0);
        g.min_norm = min_distance_to(g.snake, zero.data());
        forest.grafts.push_back(std::move(g));
    }
    std::sort(forest.grafts.begin(), forest.grafts.end(),
              [](const Graft& a, const Graft& b) { return a.t < b.t; });
    return forest;
}

struct PalmProfile {
    std::vector<double> r;
    std::vector<double> mass;   // M*_a(B(0, r))
    std::vector<double> ratio;  // mass / g(r), NaN outside the gauge domain
};

inline PalmProfile palm_mass_profile(const GraftedForest& forest, std::vector<double> r_grid,
                                     const GaugeFunction* gauge = nullptr) {
    if (r_grid.empty()) throw std::invalid_argument("palm_mass_profile: empty r grid");
    std::sort(r_grid.begin(), r_grid.end());
    PalmProfile prof;
    prof.r = r_grid;
    prof.mass.assign(r_grid.size(), 0.0);
    for (const auto& g : forest.grafts) {
        const double w = g.sigma / static_cast<double>(g.snake.grid_count);
        std::vector<double> norms(g.snake.grid_count);
        for (std::size_t i = 0; i < g.snake.grid_count; ++i) {
            double s = 0.0;
            const double* x = g.snake.at(i);
            for (int j = 0; j < g.snake.dim; ++j) s += x[j] * x[j];
            norms[i] = std::sqrt(s);
        }
        std::sort(norms.begin(), norms.end());
        for (std::size_t kr = 0; kr < r_grid.size(); ++kr) {
            const auto cnt = std::upper_bound(norms.begin(), norms.end(), r_grid[kr]) -
                             norms.begin();
            prof.mass[kr] += w * static_cast<double>(cnt);
        }
    }
    prof.ratio.assign(r_grid.size(), std::numeric_limits<double>::quiet_NaN());
    if (gauge) {
        for (std::size_t kr = 0; kr < r_grid.size(); ++kr)
            if (r_grid[kr] > 0.0 && r_grid[kr] < gauge->r0)
                prof.ratio[kr] = prof.mass[kr] / (*gauge)(r_grid[kr]);
    }
    return prof;
}

// number of grafts with t_j in (s, t) whose range meets the closed ball B(0, r)
inline std::size_t count_hitting(const GraftedForest& forest, double r, double s, double t) {
    if (!(s <= t)) throw std::invalid_argument("count_hitting: need s <= t");
    std::size_t n = 0;
    for (const auto& g : forest.grafts)
        if (g.t > s && g.t < t && g.min_norm <= r) ++n;
    return n;
}

// ---- T_{gamma(r)}: total grafted duration before the 3-coordinate last exit ----

struct TGammaRow {
    double r = 0.0;
    double mean = 0.0, se = 0.0;            // E[e^{-lambda T^eps_gamma(r)}] raw
    double corrected = 0.0, corrected_se = 0.0;  // after the truncation correction
    double target = 0.0;                    // e^{-r sqrt(2 psi*'(psi^{-1}(lambda)))}
};

struct TGammaReport {
    std::vector<TGammaRow> rows;
    std::size_t replicas = 0;
    std::size_t censored = 0;
    double lambda = 0.0;
    double eps_trunc = 0.0;
    double correction_factor_at_rmax = 0.0;
};

// Per replica: transient spine, last exits gamma(r), then Poisson graft times
// and durations on [0, gamma(r_max)] only (snakes are not needed for T).
inline TGammaReport t_gamma_samples(const BranchingMechanism& mech, int d,
                                    std::vector<double> r_grid, std::size_t replicas,
                                    double lambda, double eps_trunc, std::uint64_t master_seed,
                                    TransientOptions opt = {}) {
    if (d < 4) throw std::invalid_argument("t_gamma_samples: requires d >= 4");
    if (r_grid.empty()) throw std::invalid_argument("t_gamma_samples: empty r grid");
    std::sort(r_grid.begin(), r_grid.end());
    const double r_max = r_grid.back();
    const double tail = sigma_tail(mech, eps_trunc);

    std::vector<std::vector<double>> evals(r_grid.size());
    for (auto& v : evals) v.assign(replicas, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> censored_flags(replicas, 0);

    parallel_replicas(replicas, master_seed, [&](std::size_t rep, Rng& rng) {
        const SpineSample spine = sample_spine_transient(mech, d, r_max, rng, opt);
        if (spine.censored) {
            censored_flags[rep] = 1;
            return;
        }
        const ExitRecord exits = last_exit(spine, r_grid);
        const double gamma_max = exits.gamma.back();
        // V value at gamma_max
        double v_at = 0.0;
        for (std::size_t i = 0; i < spine.grid_count(); ++i) {
            if (spine.times[i] > gamma_max) break;
            v_at = spine.V[i];
        }
        std::poisson_distribution<long long> poi(v_at * tail);
        const long long k = v_at > 0.0 ? poi(rng) : 0;
        std::vector<std::pair<double, double>> marks;  // (time, sigma)
        marks.reserve(k);
        std::uniform_real_distribution<double> uv(0.0, v_at);
        for (long long j = 0; j < k; ++j) {
            const std::size_t idx = detail::v_inverse_index(spine, uv(rng));
            marks.emplace_back(spine.times[idx], sigma_conditional_sample(mech, eps_trunc, rng));
        }
        for (std::size_t kr = 0; kr < r_grid.size(); ++kr) {
            double total = 0.0;
            for (const auto& [tj, sj] : marks)
                if (tj <= exits.gamma[kr]) total += sj;
            evals[kr][rep] = std::exp(-lambda * total);
        }
    });

    TGammaReport rep;
    rep.replicas = replicas;
    rep.lambda = lambda;
    rep.eps_trunc = eps_trunc;
    for (int c : censored_flags) rep.censored += c;
    // truncation correction: the sampled T misses durations below eps_trunc,
    // so its exponent uses I_eps = int_eps (1-e^{-lambda s}) nu(ds) instead of
    // psi^{-1}(lambda); multiply by the exact ratio of the two targets.
    const double full_exp = std::sqrt(2.0 * mech.psi_star_prime(psi_inv(mech, lambda)));
    const double trunc_exp =
        std::sqrt(2.0 * mech.psi_star_prime(duration_transform_truncated(mech, eps_trunc, lambda)));
    for (std::size_t kr = 0; kr < r_grid.size(); ++kr) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < replicas; ++i)
            if (!censored_flags[i]) vals.push_back(evals[kr][i]);
        const auto ms = mean_se(vals);
        TGammaRow row;
        row.r = r_grid[kr];
        row.mean = ms.mean;
        row.se = ms.se;
        const double corr = std::exp(-r_grid[kr] * (full_exp - trunc_exp));
        row.corrected = ms.mean * corr;
        row.corrected_se = ms.se * corr;
        row.target = std::exp(-r_grid[kr] * full_exp);
        rep.rows.push_back(row);
    }
    rep.correction_factor_at_rmax = std::exp(-r_max * (full_exp - trunc_exp));
    return rep;
}

}  // namespace snakelab
