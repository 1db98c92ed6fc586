#pragma once

// Branching-mechanism calculus: the Laplace exponent
//   psi(l) = alpha*l + beta*l^2 + int (e^{-l r} - 1 + l r) pi(dr)
// of a critical or subcritical continuous-state branching process, together
// with the derived functions psi', psi^{-1}, psi~ = psi/l, psi* = psi - alpha*l,
// phi = psi' o psi^{-1} and their inverses, and the power exponents at infinity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace snakelab {

inline constexpr double kInvertRtol = 1e-12;

struct JumpAtom {
    double r;     // jump size, > 0
    double mass;  // pi({r}), >= 0
};

enum class LevyKind { none, stable, tabulated };

struct BranchingMechanism {
    double alpha = 0.0;  // linear drift
    double beta = 0.0;   // quadratic coefficient
    LevyKind levy = LevyKind::none;
    // stable family psi += c * l^gamma, gamma in (1,2); stored by closed form
    double stable_c = 0.0;
    double stable_gamma = 0.0;
    // tabulated finite-atom Levy measure (compound Poisson with drift)
    std::vector<JumpAtom> atoms;

    static BranchingMechanism quadratic(double beta, double alpha = 0.0) {
        BranchingMechanism m;
        m.alpha = alpha;
        m.beta = beta;
        m.validate();
        return m;
    }

    static BranchingMechanism stable(double c, double gamma, double alpha = 0.0,
                                     double beta = 0.0) {
        BranchingMechanism m;
        m.alpha = alpha;
        m.beta = beta;
        m.levy = LevyKind::stable;
        m.stable_c = c;
        m.stable_gamma = gamma;
        m.validate();
        return m;
    }

    static BranchingMechanism tabulated(std::vector<JumpAtom> atoms, double alpha = 0.0,
                                        double beta = 0.0) {
        BranchingMechanism m;
        m.alpha = alpha;
        m.beta = beta;
        m.levy = LevyKind::tabulated;
        m.atoms = std::move(atoms);
        m.validate();
        return m;
    }

    void validate() const {
        if (!(alpha >= 0.0)) throw std::invalid_argument("mechanism: alpha must be >= 0");
        if (!(beta >= 0.0)) throw std::invalid_argument("mechanism: beta must be >= 0");
        if (levy == LevyKind::stable) {
            if (!(stable_c > 0.0)) throw std::invalid_argument("mechanism: stable c must be > 0");
            if (!(stable_gamma > 1.0 && stable_gamma < 2.0))
                throw std::invalid_argument("mechanism: stable gamma must lie in (1,2)");
        }
        if (levy == LevyKind::tabulated) {
            for (const auto& a : atoms) {
                if (!(a.r > 0.0)) throw std::invalid_argument("mechanism: atom r must be > 0");
                if (!(a.mass >= 0.0)) throw std::invalid_argument("mechanism: atom mass must be >= 0");
            }
        }
        if (total_scale() <= 0.0)
            throw std::invalid_argument("mechanism: psi must not be identically zero");
    }

    double total_scale() const {
        double s = alpha + beta;
        if (levy == LevyKind::stable) s += stable_c;
        for (const auto& a : atoms) s += a.mass;
        return s;
    }

    // psi(l)
    double psi(double lam) const {
        if (!(lam >= 0.0)) throw std::invalid_argument("psi: lambda must be >= 0");
        double v = alpha * lam + beta * lam * lam;
        if (levy == LevyKind::stable) v += stable_c * std::pow(lam, stable_gamma);
        for (const auto& a : atoms) {
            // e^{-x} - 1 + x, evaluated without cancellation
            const double x = lam * a.r;
            v += a.mass * (std::expm1(-x) + x);
        }
        return v;
    }

    // psi'(l) = alpha + 2 beta l + int r (1 - e^{-l r}) pi(dr)
    double psi_prime(double lam) const {
        if (!(lam >= 0.0)) throw std::invalid_argument("psi_prime: lambda must be >= 0");
        double v = alpha + 2.0 * beta * lam;
        if (levy == LevyKind::stable)
            v += stable_c * stable_gamma * std::pow(lam, stable_gamma - 1.0);
        for (const auto& a : atoms) v += a.mass * a.r * (-std::expm1(-lam * a.r));
        return v;
    }

    double psi_second(double lam) const {
        double v = 2.0 * beta;
        if (levy == LevyKind::stable)
            v += stable_c * stable_gamma * (stable_gamma - 1.0) * std::pow(lam, stable_gamma - 2.0);
        for (const auto& a : atoms) v += a.mass * a.r * a.r * std::exp(-lam * a.r);
        return v;
    }

    // int_0^l psi(a) da, exact per family
    double psi_antiderivative(double lam) const {
        double v = 0.5 * alpha * lam * lam + beta * lam * lam * lam / 3.0;
        if (levy == LevyKind::stable)
            v += stable_c * std::pow(lam, stable_gamma + 1.0) / (stable_gamma + 1.0);
        for (const auto& a : atoms)
            v += a.mass * (-std::expm1(-lam * a.r) / a.r - lam + 0.5 * a.r * lam * lam);
        return v;
    }

    // psi~(l) = psi(l)/l, continuous at 0 with value alpha
    double psi_tilde(double lam) const {
        if (lam == 0.0) return alpha;
        return psi(lam) / lam;
    }

    double psi_star(double lam) const { return psi(lam) - alpha * lam; }
    double psi_star_prime(double lam) const { return psi_prime(lam) - alpha; }

    // log psi'(e^L); safe for L far beyond double overflow of e^L
    double log_psi_prime(double log_lam) const {
        if (log_lam < 650.0) return std::log(psi_prime(std::exp(log_lam)));
        // asymptotic regime: atoms contribute the constant sum r*mass
        double atom_sum = 0.0;
        for (const auto& a : atoms) atom_sum += a.mass * a.r;
        const double c0 = alpha + atom_sum;
        if (beta > 0.0) {
            // 2 beta l dominates
            double v = log_lam + std::log(2.0 * beta);
            double corr = c0 * std::exp(-log_lam) / (2.0 * beta);
            if (levy == LevyKind::stable)
                corr += 0.5 * stable_gamma * std::exp((stable_gamma - 2.0) * log_lam) *
                        stable_c / beta;
            return v + std::log1p(corr);
        }
        if (levy == LevyKind::stable) {
            const double g1 = stable_gamma - 1.0;
            double v = g1 * log_lam + std::log(stable_c * stable_gamma);
            return v + std::log1p(c0 * std::exp(-g1 * log_lam) / (stable_c * stable_gamma));
        }
        return std::log(c0);
    }

    bool is_quadratic() const { return levy == LevyKind::none && beta > 0.0; }
    bool is_pure_stable() const {
        return levy == LevyKind::stable && beta == 0.0;
    }
};

enum class InvertTarget { psi, psi_prime, phi };

namespace detail {

template <class F>
double bisect_increasing(F f, double y, const char* what) {
    // geometric bracket growth from [0, 1], then bisection
    double hi = 1.0, fhi = f(hi);
    int grow = 0;
    while (fhi < y) {
        hi *= 2.0;
        if (!std::isfinite(hi) || ++grow > 2100)
            throw std::domain_error(std::string(what) + ": bracket growth failed");
        fhi = f(hi);
    }
    double lo = (hi == 1.0) ? 0.0 : hi * 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    const double lam = 0.5 * (lo + hi);
    if (y > 0.0 && std::abs(f(lam) - y) > kInvertRtol * y) {
        // monotone residual check; adjacent-double resolution should always pass
        const double l2 = (std::abs(f(lo) - y) < std::abs(f(hi) - y)) ? lo : hi;
        if (std::abs(f(l2) - y) > kInvertRtol * y)
            throw std::runtime_error(std::string(what) + ": inversion residual too large");
        return l2;
    }
    return lam;
}

}  // namespace detail

// psi^{-1}(y), y >= 0
inline double psi_inv(const BranchingMechanism& m, double y) {
    if (!(y >= 0.0)) throw std::domain_error("psi_inv: y must be >= 0");
    if (y == 0.0) return 0.0;
    return detail::bisect_increasing([&](double l) { return m.psi(l); }, y, "psi_inv");
}

// sup of psi' (infinite unless the mechanism is pure drift + finite atoms)
inline double psi_prime_sup(const BranchingMechanism& m) {
    if (m.beta > 0.0 || m.levy == LevyKind::stable)
        return std::numeric_limits<double>::infinity();
    double s = m.alpha;
    for (const auto& a : m.atoms) s += a.r * a.mass;
    return s;
}

// psi'^{-1}(y), y in [psi'(0), sup psi') = [alpha, sup)
inline double psi_prime_inv(const BranchingMechanism& m, double y) {
    if (!(y >= m.alpha)) throw std::domain_error("psi_prime_inv: y below psi'(0) = alpha");
    if (y == m.alpha) return 0.0;
    if (y >= psi_prime_sup(m)) throw std::domain_error("psi_prime_inv: y above range of psi'");
    return detail::bisect_increasing([&](double l) { return m.psi_prime(l); }, y, "psi_prime_inv");
}

// phi = psi' o psi^{-1}; Laplace exponent of a subordinator, increasing, phi(0) = alpha
inline double phi_eval(const BranchingMechanism& m, double lam) {
    if (!(lam >= 0.0)) throw std::domain_error("phi_eval: lambda must be >= 0");
    if (lam == 0.0) return m.alpha;
    return m.psi_prime(psi_inv(m, lam));
}

// phi^{-1}(y) = psi(psi'^{-1}(y)), defined for y >= alpha
inline double phi_inv(const BranchingMechanism& m, double y) {
    if (!(y >= m.alpha)) throw std::domain_error("phi_inv: y below alpha");
    return m.psi(psi_prime_inv(m, y));
}

// phi* = psi*' o psi^{-1}
inline double phi_star(const BranchingMechanism& m, double lam) {
    return m.psi_star_prime(psi_inv(m, lam));
}

inline double invert(const BranchingMechanism& m, InvertTarget which, double y) {
    switch (which) {
        case InvertTarget::psi: return psi_inv(m, y);
        case InvertTarget::psi_prime: return psi_prime_inv(m, y);
        case InvertTarget::phi: return phi_inv(m, y);
    }
    throw std::logic_error("invert: bad target");
}

// divided difference (psi(l1) - psi(l2)) / (l1 - l2), psi'(l1) on the diagonal
inline double divided_difference(const BranchingMechanism& m, double lam1, double lam2) {
    if (!(lam1 >= 0.0 && lam2 >= 0.0))
        throw std::invalid_argument("divided_difference: lambdas must be >= 0");
    if (std::abs(lam1 - lam2) <= 1e-12 * std::max(1.0, lam1)) return m.psi_prime(lam1);
    return (m.psi(lam1) - m.psi(lam2)) / (lam1 - lam2);
}

// ---- power exponents at infinity ----

struct ExponentGrid {
    double lambda_min = 1.0;
    double lambda_max = 1e9;
    int count = 64;
};

enum class ExponentMethod { analytic, fitted };

struct ExponentReport {
    double gamma_lower = 0.0;
    double eta_upper = 0.0;
    std::optional<double> delta;  // absent when ill-posed (tabulated, fitted)
    ExponentMethod method = ExponentMethod::analytic;
    ExponentGrid grid;
};

// Lower/upper indices gamma, eta and the quasi-monotonicity exponent delta.
// Analytic for the quadratic/stable/drift families; fitted from asymptotic
// two-point log-slopes otherwise (delta refused: its sup over all scale pairs
// is ill-posed on a finite grid).
inline ExponentReport exponents(const BranchingMechanism& m, ExponentGrid grid = {},
                                bool force_fitted = false) {
    if (!(grid.lambda_min > 0.0 && grid.lambda_max > grid.lambda_min))
        throw std::invalid_argument("exponents: bad grid");
    if (std::log10(grid.lambda_max / grid.lambda_min) < 6.0 - 1e-9)
        throw std::invalid_argument("exponents: grid must span at least 6 decades");
    ExponentReport rep;
    rep.grid = grid;
    std::optional<double> analytic_value;
    if (m.beta > 0.0)
        analytic_value = 2.0;
    else if (m.levy == LevyKind::stable)
        analytic_value = m.stable_gamma;
    else if (m.levy == LevyKind::none)
        analytic_value = 1.0;  // pure drift
    if (analytic_value && !force_fitted) {
        rep.gamma_lower = rep.eta_upper = *analytic_value;
        rep.delta = analytic_value;
        return rep;
    }
    rep.method = ExponentMethod::fitted;
    rep.delta = analytic_value;  // fitted delta is ill-posed; refused for tabulated
    // two-point log-slopes on the dyadic ladder; the indices are limits at
    // infinity, so only the top half of the ladder enters the min/max
    const int octaves = static_cast<int>(std::floor(std::log2(grid.lambda_max / grid.lambda_min)));
    if (octaves < 4) throw std::invalid_argument("exponents: grid too coarse");
    std::vector<double> slopes;
    double lam = grid.lambda_min;
    std::vector<double> logpsi;
    for (int j = 0; j <= octaves; ++j) {
        logpsi.push_back(std::log(m.psi(lam)));
        lam *= 2.0;
    }
    for (int j = 0; j + 1 <= octaves; ++j)
        slopes.push_back((logpsi[j + 1] - logpsi[j]) / std::log(2.0));
    const std::size_t from = slopes.size() / 2;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t j = from; j < slopes.size(); ++j) {
        lo = std::min(lo, slopes[j]);
        hi = std::max(hi, slopes[j]);
    }
    rep.gamma_lower = lo;
    rep.eta_upper = hi;
    return rep;
}

}  // namespace snakelab
