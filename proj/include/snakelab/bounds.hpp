#pragma once

// Deterministic bound machinery: the boundedness integral I(v), the Keller
// bracket, the constants of the hitting-probability lemmas, the theta-indexed
// radii and their rho_n / s_n ladders, subordinator tail bounds and series,
// exit-time Laplace transforms, and the F(mu, r, kappa) threshold algebra.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "snakelab/gauge.hpp"
#include "snakelab/mechanism.hpp"
#include "snakelab/quadrature.hpp"
#include "snakelab/radial.hpp"
#include "snakelab/rng.hpp"
#include "snakelab/stats.hpp"

namespace snakelab {

// ---- I(v) = int_v^inf db / sqrt(int_v^b psi) ----

namespace detail {

// int_v^b psi, with a Taylor form near b = v to dodge cancellation
inline double psi_integral_from(const BranchingMechanism& m, double v, double b) {
    const double w = (b - v) / v;
    if (w < 1e-3) {
        const double dv = b - v;
        return dv * (m.psi(v) + 0.5 * dv * m.psi_prime(v) + dv * dv * m.psi_second(v) / 6.0);
    }
    return m.psi_antiderivative(b) - m.psi_antiderivative(v);
}

inline double local_log_slope(const BranchingMechanism& m, double lam) {
    return std::log(m.psi(2.0 * lam) / m.psi(lam)) / std::log(2.0);
}

}  // namespace detail

inline double integral_I(const BranchingMechanism& mech, double v) {
    if (!(v > 0.0)) throw std::domain_error("integral_I: v must be > 0");
    {
        const auto exps = exponents(mech, {1.0, 1e12, 64});
        if (!(exps.gamma_lower > 1.0 + 1e-6))
            throw std::domain_error("integral_I: divergent (lower index <= 1)");
    }
    // head b in [v, 2v]: b = v (1 + u^2) flattens the square-root singularity
    const double head = adaptive_simpson(
        [&](double u) {
            const double b = v * (1.0 + u * u);
            const double F = detail::psi_integral_from(mech, v, b);
            if (u == 0.0) return 2.0 * std::sqrt(v / mech.psi(v));
            return 2.0 * v * u / std::sqrt(F);
        },
        0.0, 1.0, 1e-10);

    // body [2v, B]: extend B until the local exponent of psi has stabilized,
    // so the closed-form power tail beyond B is trustworthy
    double B = 1e6 * v;
    for (int guard = 0; guard < 200; ++guard) {
        const double g1 = detail::local_log_slope(mech, B);
        const double g2 = detail::local_log_slope(mech, 4.0 * B);
        if (std::abs(g1 - g2) < 1e-5 && g1 > 1.0 + 1e-3) break;
        B *= 8.0;
        if (!std::isfinite(mech.psi(B)))
            throw std::domain_error("integral_I: no stable power tail within double range");
    }
    const double body = adaptive_simpson(
        [&](double w) {
            const double b = v * std::exp(w);
            return b / std::sqrt(detail::psi_integral_from(mech, v, b));
        },
        std::log(2.0), std::log(B / v), 1e-10, 48, 32);

    // tail beyond B with psi(a) ~ psi(B) (a/B)^g
    const double g = detail::local_log_slope(mech, B);
    const double FB = detail::psi_integral_from(mech, v, B);
    const double K = mech.psi(B) * B / (g + 1.0);
    const double W = std::min(std::max(10.0, 50.0 / (g - 1.0)), 600.0 / (g + 1.0));
    const double tail_num = adaptive_simpson(
        [&](double w) {
            const double F = FB + K * (std::exp((g + 1.0) * w) - 1.0);
            return B * std::exp(w) / std::sqrt(F);
        },
        0.0, W, 1e-10, 48, 16);
    const double tail_rem = 2.0 * B * std::exp(-0.5 * (g - 1.0) * W) / ((g - 1.0) * std::sqrt(K));
    return head + body + tail_num + tail_rem;
}

// ---- Keller bracket ----

struct KellerResult {
    double v0 = 0.0;       // interior blow-up value v_r(0)
    double I_v0 = 0.0;     // I(v_r(0))
    double lower = 0.0;    // 2 r / sqrt(d)
    double upper = 0.0;    // 2 r
    bool holds = false;
    double residual = 0.0; // ODE residual of the interior profile
};

inline KellerResult keller_check(const BranchingMechanism& mech, int d, double r) {
    KellerResult res;
    auto prof = solve_radial_interior(mech, d, r, &res.v0);
    res.residual = prof.residual;
    res.I_v0 = integral_I(mech, res.v0);
    res.lower = 2.0 * r / std::sqrt(static_cast<double>(d));
    res.upper = 2.0 * r;
    res.holds = res.lower <= res.I_v0 && res.I_v0 <= res.upper;
    return res;
}

// ---- constants of the hitting lemmas ----

struct LemmaConstants {
    double c_exponent = 0.0;  // c in (1, delta)
    double c_delta = 0.0;     // comparison constant: psi(lam) lam^{-c} >= c_delta psi(mu) mu^{-c}
    double c1 = 0.0;          // ( int_1^inf db / sqrt(int_1^b a^c da) )^2 / c_delta
    double rho = 0.0;
    double C2 = 0.0;          // c1 * d * rho^{-2}
    std::string recipe;
};

inline LemmaConstants lemma_constants(const BranchingMechanism& mech, int d, double rho,
                                      double c_choice = 0.0) {
    const auto exps = exponents(mech, {1.0, 1e12, 64});
    if (!exps.delta || !(*exps.delta > 1.0))
        throw std::domain_error("lemma_constants: requires an analytic family with delta > 1");
    const double delta = *exps.delta;
    const double c = c_choice > 0.0 ? c_choice : 0.5 * (1.0 + delta);
    if (!(c > 1.0 && c < delta)) throw std::domain_error("lemma_constants: c outside (1, delta)");
    // fitted comparison constant over a log grid of 1 <= mu <= lam
    double c_delta = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 60; ++i) {
        const double mu = std::pow(10.0, 9.0 * i / 60.0);
        const double pm = mech.psi(mu) * std::pow(mu, -c);
        for (int j = i; j <= 60; ++j) {
            const double lam = std::pow(10.0, 9.0 * j / 60.0);
            c_delta = std::min(c_delta, mech.psi(lam) * std::pow(lam, -c) / pm);
        }
    }
    // int_1^inf db / sqrt((b^{c+1} - 1)/(c + 1)), head by b = 1 + u^2
    const double head = adaptive_simpson(
        [&](double u) {
            if (u == 0.0) return 2.0;
            const double b = 1.0 + u * u;
            const double F = (std::pow(b, c + 1.0) - 1.0) / (c + 1.0);
            return 2.0 * u / std::sqrt(F);
        },
        0.0, 1.0, 1e-11);
    const double Bend = 1e10;
    const double body = adaptive_simpson(
        [&](double w) {
            const double b = std::exp(w);
            const double F = (std::pow(b, c + 1.0) - 1.0) / (c + 1.0);
            return b / std::sqrt(F);
        },
        std::log(2.0), std::log(Bend), 1e-11);
    const double tail = std::sqrt(c + 1.0) * 2.0 / (c - 1.0) * std::pow(Bend, 0.5 * (1.0 - c));
    LemmaConstants lc;
    lc.c_exponent = c;
    lc.c_delta = c_delta;
    lc.c1 = (head + body + tail) * (head + body + tail) / c_delta;
    lc.rho = rho;
    lc.C2 = lc.c1 * static_cast<double>(d) / (rho * rho);
    lc.recipe = "c1 = (int_1^inf db/sqrt(int_1^b a^c da))^2 / c_delta, c = " + std::to_string(c) +
                "; C2 = c1 d rho^-2";
    return lc;
}

// ---- q_r and J(r) ----

struct QandJ {
    double q_r = 0.0;
    double J = 0.0;
};

inline QandJ q_and_J(const BranchingMechanism& mech, int d, double r, double C2) {
    if (d < 3) throw std::domain_error("q_and_J: requires d >= 3");
    if (!(r > 0.0) || !(r * r < C2 / mech.psi_prime(1.0)))
        throw std::domain_error("q_and_J: r must satisfy q_r >= 1");
    QandJ out;
    out.q_r = psi_prime_inv(mech, C2 / (r * r));
    const double expn = static_cast<double>(d) / (d - 2.0);
    const double Lq = std::log(out.q_r);
    const double integral = adaptive_simpson(
        [&](double w) {
            const double vv = std::exp(w);
            return mech.psi_prime(vv) * std::pow(vv, -expn) * vv;
        },
        0.0, Lq, 1e-10, 48, std::max(8, static_cast<int>(Lq)));
    out.J = r * r * std::pow(out.q_r, 2.0 / (d - 2.0)) * integral;
    return out;
}

// ---- theta-indexed radii (log domain; theta = e^{n^2} overflows doubles) ----

struct RadiiRow {
    double log_theta = 0.0;
    double log_lambda = 0.0;
    double log_r = 0.0;
    double theta = 0.0;   // NaN when out of double range
    double lambda = 0.0;  // likewise
    double r = 0.0;       // likewise
};

struct RadiiSequences {
    double c_exponent = 0.0;  // c in (2/(d-2), gamma - 1)
    double C2 = 0.0;
    int d = 0;
    std::vector<RadiiRow> rows;  // increasing theta, decreasing r
};

// first lambda in [1, inf) with lambda^{-c} psi'(lambda) = theta, in log space
inline double log_lambda_theta(const BranchingMechanism& mech, double c, double log_theta) {
    auto G = [&](double L) { return mech.log_psi_prime(L) - c * L; };
    if (G(0.0) >= log_theta)
        throw std::domain_error("radii_theta: theta must exceed psi'(1)");
    double lo = 0.0, hi = 0.5;
    int guard = 0;
    while (G(hi) < log_theta) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 300) throw std::domain_error("radii_theta: no root within double range");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (G(mid) < log_theta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline RadiiSequences radii_theta(const BranchingMechanism& mech, int d, double c_choice,
                                  const std::vector<double>& log_thetas, double C2) {
    const auto exps = exponents(mech, {1.0, 1e12, 64});
    const double gamma = exps.gamma_lower;
    const double c_lo = 2.0 / (d - 2.0), c_hi = gamma - 1.0;
    if (!(c_lo < c_hi))
        throw std::domain_error("radii_theta: admissible c interval empty (d too small)");
    const double c = c_choice > 0.0 ? c_choice : 0.5 * (c_lo + c_hi);
    if (!(c > c_lo && c < c_hi)) throw std::domain_error("radii_theta: c outside admissible interval");
    RadiiSequences seq;
    seq.c_exponent = c;
    seq.C2 = C2;
    seq.d = d;
    for (double lt : log_thetas) {
        RadiiRow row;
        row.log_theta = lt;
        row.log_lambda = log_lambda_theta(mech, c, lt);
        row.log_r = 0.5 * (std::log(C2) - mech.log_psi_prime(row.log_lambda));
        row.theta = lt < 700.0 ? std::exp(lt) : std::numeric_limits<double>::quiet_NaN();
        row.lambda = row.log_lambda < 700.0 ? std::exp(row.log_lambda)
                                            : std::numeric_limits<double>::quiet_NaN();
        row.r = row.log_r > -700.0 ? std::exp(row.log_r) : 0.0;
        seq.rows.push_back(row);
    }
    return seq;
}

// rho_n = r_{e^{n^2}} ladder, n = 1..n_max
inline RadiiSequences rho_ladder(const BranchingMechanism& mech, int d, double c_choice,
                                 double C2, std::size_t n_max) {
    std::vector<double> lts;
    for (std::size_t n = 1; n <= n_max; ++n)
        lts.push_back(static_cast<double>(n) * static_cast<double>(n));
    return radii_theta(mech, d, c_choice, lts, C2);
}

// ---- subordinator tail bounds and the rho_n series ----

// lower bound on P(S_rho <= a) and Markov upper bound on P(S_rho >= a),
// for a subordinator with Laplace exponent Phi
inline std::pair<double, double> subordinator_tail_bounds(
    const std::function<double(double)>& Phi, double rho, double a, double lam) {
    if (!(rho > 0.0 && a > 0.0 && lam > 0.0))
        throw std::domain_error("subordinator_tail_bounds: arguments must be > 0");
    const double den = -std::expm1(-lam * a);
    const double lower = (std::exp(-rho * Phi(lam)) - std::exp(-lam * a)) / den;
    const double upper = (-std::expm1(-rho * Phi(lam))) / den;
    auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
    return {clamp01(lower), clamp01(upper)};
}

struct SeriesRow {
    double log_inv_4rho = 0.0;  // log(1/(4 rho_n))
    double lower = 0.0;         // lower bound on P(S_{rho_n} <= g(4 rho_n))
    double upper = 0.0;         // Markov bound on P(S_{rho_{n+1}} >= g(4 rho_n))
};

struct SubordinatorSeriesReport {
    std::vector<SeriesRow> rows;
    double lower_partial_sum = 0.0;
    std::size_t lower_cross_index = 0;  // 1-based first n where the partial sum passes threshold
    double lower_threshold = 0.0;
    double upper_tail = 0.0;  // sum of upper terms beyond tail_from
    std::size_t tail_from = 0;
    std::size_t skipped = 0;  // leading rows with 4 rho_n outside the gauge domain
};

// Series terms for S with Laplace exponent sqrt(psi*' o psi^{-1}) at the probe
// lambda_n = Phi^{-1}((4 rho_n)^{-1} loglog(1/(4 rho_n))). For alpha = 0 the
// algebra collapses: with l_n = log(1/(4 rho_n)),
//   rho_n Phi(lambda_n) = loglog/4, lambda_n g(4 rho_n) = loglog,
// so the lower term is (l^{-1/4} - l^{-1})/(1 - l^{-1}) and the upper term is
// (rho_{n+1}/(4 rho_n)) log l / (1 - l^{-1}).
inline SubordinatorSeriesReport subordinator_series(const RadiiSequences& ladder,
                                                    double threshold = 5.0,
                                                    std::size_t tail_from = 50) {
    SubordinatorSeriesReport rep;
    rep.lower_threshold = threshold;
    rep.tail_from = tail_from;
    rep.lower_cross_index = 0;
    double sum = 0.0;
    for (std::size_t n = 0; n < ladder.rows.size(); ++n) {
        SeriesRow row;
        row.log_inv_4rho = -ladder.rows[n].log_r - std::log(4.0);
        const double l = row.log_inv_4rho;
        if (!(l > std::exp(1.0))) {
            // 4 rho_n not yet below e^{-e}: the gauge is undefined there, the
            // series statement is asymptotic in n
            ++rep.skipped;
            rep.rows.push_back(row);
            continue;
        }
        row.lower = (std::pow(l, -0.25) - 1.0 / l) / (1.0 - 1.0 / l);
        if (n + 1 < ladder.rows.size()) {
            const double ratio =
                std::exp(ladder.rows[n + 1].log_r - ladder.rows[n].log_r) / 4.0;
            row.upper = std::min(1.0, ratio * std::log(l) / (1.0 - 1.0 / l));
        }
        sum += row.lower;
        if (rep.lower_cross_index == 0 && sum > threshold) rep.lower_cross_index = n + 1;
        if (n + 1 > tail_from) rep.upper_tail += row.upper;
        rep.rows.push_back(row);
    }
    rep.lower_partial_sum = sum;
    return rep;
}

// ---- s_n sequence (Markov-bound ladder for T_{gamma(2 s_n)}) ----

struct SnRow {
    double log_lambda = 0.0;
    double lambda = 0.0;
    double phi_star = 0.0;  // phi*(lambda_n)
    double s = 0.0;         // s_n = phi*(lambda_n)^{-(1+eps)/2}
    double bound = 0.0;     // Markov bound on P(T_{gamma(2 s_n)} > s_n^u)
};

struct SnReport {
    double u = 0.0, u_prime = 0.0, a = 0.0, eps = 0.0;
    std::vector<SnRow> rows;
    double fitted_c = 0.0;               // max_n bound_n 2^{n a eps / 2}
    std::size_t fitted_c_argmax = 0;     // 1-based
    std::size_t divergence_cross = 0;    // first n with sum(1 - bound) > threshold
    double complement_threshold = 0.0;
};

inline SnReport sn_sequence(const BranchingMechanism& mech, double u, std::size_t n_max = 400,
                            double complement_threshold = 10.0) {
    const auto exps = exponents(mech, {1.0, 1e12, 64});
    const double gamma = exps.gamma_lower;
    const double u_cap = 2.0 * gamma / (gamma - 1.0);
    if (!(u > 0.0 && u < u_cap)) throw std::domain_error("sn_sequence: u outside (0, 2g/(g-1))");
    SnReport rep;
    rep.u = u;
    rep.u_prime = 0.5 * (u + u_cap);
    rep.a = 0.5 * (gamma - 1.0) / gamma;  // phi* has lower index (gamma-1)/gamma
    rep.eps = 0.5 * (rep.u_prime / u - 1.0);
    rep.complement_threshold = complement_threshold;
    auto phi_star_of = [&](double lam) { return phi_star(mech, lam); };
    double cum_complement = 0.0;
    double lam_prev = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        double lam = std::max(std::pow(2.0, static_cast<double>(n)), lam_prev);
        int guard = 0;
        for (;;) {
            const double ph = phi_star_of(lam);
            if (std::pow(lam, rep.a) <= ph && ph <= std::pow(lam, 2.0 / rep.u_prime)) break;
            lam *= 1.25;
            if (++guard > 4000) throw std::domain_error("sn_sequence: sandwich scan failed");
        }
        lam_prev = lam;
        SnRow row;
        row.lambda = lam;
        row.log_lambda = std::log(lam);
        row.phi_star = phi_star_of(lam);
        row.s = std::pow(row.phi_star, -0.5 * (1.0 + rep.eps));
        // Markov bound (log-safe): lambda s^u can overflow the exponent scale
        const double log_lam_su = row.log_lambda + u * std::log(row.s);
        const double den = log_lam_su > 3.0 ? 1.0 : -std::expm1(-std::exp(log_lam_su));
        row.bound =
            std::min(1.0, (-std::expm1(-2.0 * std::sqrt(2.0) * row.s * std::sqrt(row.phi_star))) /
                              den);
        rep.rows.push_back(row);
        const double weighted = row.bound * std::pow(2.0, 0.5 * rep.a * rep.eps * n);
        if (weighted > rep.fitted_c) {
            rep.fitted_c = weighted;
            rep.fitted_c_argmax = n;
        }
        cum_complement += 1.0 - row.bound;
        if (rep.divergence_cross == 0 && cum_complement > complement_threshold)
            rep.divergence_cross = n;
    }
    return rep;
}

// ---- first-exit-time Laplace transforms ----

struct ExitTimeResult {
    double exact_1d = 0.0;     // 1/cosh(r sqrt(2 lambda))
    double upper_bound = 0.0;  // 2 d exp(-r sqrt(2 lambda / d))
    double mc_mean = std::numeric_limits<double>::quiet_NaN();
    double mc_se = std::numeric_limits<double>::quiet_NaN();
    double mc_raw = std::numeric_limits<double>::quiet_NaN();  // plain Euler, no correction
};

inline ExitTimeResult exit_time_laplace(int d, double r, double lam) {
    if (d < 1 || !(r > 0.0) || !(lam >= 0.0))
        throw std::invalid_argument("exit_time_laplace: bad arguments");
    ExitTimeResult res;
    res.exact_1d = 1.0 / std::cosh(r * std::sqrt(2.0 * lam));
    res.upper_bound = 2.0 * d * std::exp(-r * std::sqrt(2.0 * lam / d));
    return res;
}

// Monte Carlo of E[e^{-lam chi_{d,r}}] by an Euler scheme with a Brownian-
// bridge crossing correction per step (documented O(step) bias; the raw
// discrete-exit estimator carries the usual O(sqrt(step)) boundary bias).
inline ExitTimeResult exit_time_laplace_mc(int d, double r, double lam, std::size_t paths,
                                           double step, std::uint64_t seed,
                                           unsigned max_threads = 0) {
    ExitTimeResult res = exit_time_laplace(d, r, lam);
    std::vector<double> corr(paths), raw(paths, 0.0);
    parallel_replicas(
        paths, seed,
        [&](std::size_t p, Rng& rng) {
            std::normal_distribution<double> normal(0.0, 1.0);
            std::vector<double> x(d, 0.0);
            double rho = 0.0, t = 0.0, survival = 1.0, acc = 0.0;
            const double sd = std::sqrt(step);
            for (;;) {
                double rho2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    x[j] += sd * normal(rng);
                    rho2 += x[j] * x[j];
                }
                const double rho_next = std::sqrt(rho2);
                const double t_next = t + step;
                if (rho_next >= r) {
                    const double frac = (r - rho) / std::max(rho_next - rho, 1e-300);
                    const double t_cross = t + step * std::min(1.0, std::max(0.0, frac));
                    acc += survival * std::exp(-lam * t_cross);
                    raw[p] = std::exp(-lam * t_next);
                    break;
                }
                // radial bridge crossing probability within the step
                const double pcross = std::exp(-2.0 * (r - rho) * (r - rho_next) / step);
                acc += survival * pcross * std::exp(-lam * (t + 0.5 * step));
                survival *= 1.0 - pcross;
                rho = rho_next;
                t = t_next;
                if (survival * std::exp(-lam * t) < 1e-12) break;
            }
            corr[p] = acc;
        },
        max_threads);
    const auto m = mean_se(corr);
    res.mc_mean = m.mean;
    res.mc_se = m.se;
    res.mc_raw = mean_se(raw).mean;
    return res;
}

// ---- F(mu, r, kappa) threshold algebra (log-domain radii) ----

struct FExplorerResult {
    double loglog_inv_r = 0.0;
    double F = 0.0;              // F(mu_{r,q}, r, kappa)
    double F_at_q_kappa = 0.0;   // F(mu_{r,q_kappa}, r, kappa)
    int sign_at_q_kappa = 0;
    double kappa0 = 0.0;
    double q_kappa = 0.0;
    double a_exponent = 0.0;
    double c_bp1 = 0.0;       // int_0^inf P(|xi_c| <= 1) e^{-c} dc
    double c1_new = 0.0;      // sqrt(c_bp1 / (32 d))
    double c_mumuse = 0.0;    // mu_{r,q} <= c_mumuse q^a mu_{r,1}
};

// log-domain ratio mu_{r,q} / mu_{r,1}
inline double mu_ratio_log_domain(const BranchingMechanism& mech, double log_inv_r, double q) {
    const double ll = std::log(log_inv_r);
    const double log_x2 = 2.0 * (std::log(ll) + log_inv_r);
    return std::exp(log_phi_inv(mech, std::log(q) + log_x2) - log_phi_inv(mech, log_x2));
}

inline FExplorerResult f_explorer(const BranchingMechanism& mech, int d, double log_inv_r,
                                  double kappa, double q) {
    if (!(log_inv_r >= std::exp(8.0)))
        throw std::domain_error("f_explorer: requires log(1/r) >= e^8");
    if (!(kappa > 0.0) || !(q >= 1.0)) throw std::domain_error("f_explorer: bad kappa or q");
    const auto exps = exponents(mech, {1.0, 1e12, 64});
    if (!exps.delta || !(*exps.delta > 1.0))
        throw std::domain_error("f_explorer: requires an analytic family with delta > 1");
    FExplorerResult out;
    out.loglog_inv_r = std::log(log_inv_r);
    const double delta = *exps.delta;
    out.a_exponent = 2.0 * delta / (delta - 1.0);  // 1/a at the midpoint of (0, delta_phi)

    out.c_bp1 = adaptive_simpson(
        [&](double c) { return c == 0.0 ? 1.0 : ball_probability(d, 1.0, c) * std::exp(-c); },
        0.0, 40.0, 1e-10);
    out.c1_new = std::sqrt(out.c_bp1 / (32.0 * d));

    // fitted constant of phi(p lam) >= C p^{1/a} phi(lam) on 1 <= lam, p
    double C = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
        const double lam = std::pow(10.0, 8.0 * i / 40.0);
        const double ph = phi_eval(mech, lam);
        for (int j = 0; j <= 40; ++j) {
            const double p = std::pow(10.0, 8.0 * j / 40.0);
            C = std::min(C, phi_eval(mech, p * lam) /
                                (std::pow(p, 1.0 / out.a_exponent) * ph));
        }
    }
    out.c_mumuse = std::pow(C, -out.a_exponent);
    out.kappa0 = out.c1_new / (2.0 * out.c_mumuse);
    out.q_kappa = std::pow(out.kappa0 / kappa, 1.0 / (out.a_exponent - 0.5));

    const double ll = out.loglog_inv_r;
    out.F = ll * (kappa * mu_ratio_log_domain(mech, log_inv_r, q) - out.c1_new * std::sqrt(q));
    const double qe = std::max(1.0, out.q_kappa);
    out.F_at_q_kappa =
        ll * (kappa * mu_ratio_log_domain(mech, log_inv_r, qe) - out.c1_new * std::sqrt(qe));
    out.sign_at_q_kappa = out.F_at_q_kappa > 0.0 ? 1 : (out.F_at_q_kappa < 0.0 ? -1 : 0);
    return out;
}

}  // namespace snakelab
