#pragma once

// Gauge functions attached to a branching mechanism:
//   g(r) = loglog(1/r) / phi^{-1}((loglog(1/r)/r)^2)   on (0, min(alpha^{-1/2}, e^{-e}))
//   k(r) = loglog(1/r) / phi^{-1}( loglog(1/r)/r )     on (0, min(alpha^{-1},   e^{-e}))
// plus the related quantities mu_{r,q} = phi^{-1}(q (loglog(1/r)/r)^2) and the
// doubling ratio g(2r)/g(r).

#include <cmath>
#include <stdexcept>

#include "snakelab/mechanism.hpp"

namespace snakelab {

inline const double kLogLogBound = std::exp(-std::exp(1.0));  // e^{-e}

// loglog(1/r), defined for r in (0, e^{-e}) (value >= 1 there)
inline double loglog_inv(double r) {
    if (!(r > 0.0 && r < kLogLogBound))
        throw std::domain_error("loglog_inv: r must lie in (0, e^{-e})");
    return std::log(std::log(1.0 / r));
}

struct GaugeFunction {
    enum class Kind { g, k };

    BranchingMechanism mech;
    Kind kind = Kind::g;
    double r0 = 0.0;  // domain is (0, r0)

    double operator()(double r) const {
        if (!(r > 0.0 && r < r0)) throw std::domain_error("gauge: r outside (0, r0)");
        const double ll = loglog_inv(r);
        const double x = ll / r;
        double den;
        if (kind == Kind::g) {
            if (x > 1e150) throw std::domain_error("gauge g: r too small for double range");
            den = phi_inv(mech, x * x);
        } else {
            if (x < mech.alpha) throw std::domain_error("gauge k: loglog(1/r)/r below alpha");
            den = phi_inv(mech, x);
        }
        if (!std::isfinite(den)) throw std::domain_error("gauge: value underflows double range");
        return ll / den;
    }
};

inline GaugeFunction make_gauge(const BranchingMechanism& m, GaugeFunction::Kind kind) {
    GaugeFunction g;
    g.mech = m;
    g.kind = kind;
    if (kind == GaugeFunction::Kind::g)
        g.r0 = (m.alpha > 0.0) ? std::min(1.0 / std::sqrt(m.alpha), kLogLogBound) : kLogLogBound;
    else
        g.r0 = (m.alpha > 0.0) ? std::min(1.0 / m.alpha, kLogLogBound) : kLogLogBound;
    return g;
}

inline double gauge_eval(const GaugeFunction& g, double r) { return g(r); }

// mu_{r,q} = phi^{-1}(q (loglog(1/r)/r)^2), r < e^{-e}, q >= 1
inline double mu_rq(const BranchingMechanism& m, double r, double q) {
    if (!(q >= 1.0)) throw std::domain_error("mu_rq: q must be >= 1");
    const double x = loglog_inv(r) / r;
    if (x > 1e150 || q > 1e8) throw std::domain_error("mu_rq: arguments out of double range");
    return phi_inv(m, q * x * x);
}

inline double doubling_ratio(const GaugeFunction& g, double r) {
    if (!(r > 0.0 && 2.0 * r < g.r0))
        throw std::domain_error("doubling_ratio: 2r outside gauge domain");
    return g(2.0 * r) / g(r);
}

// ---- log-domain evaluation, for radii far below double range ----
// Only the closed-form families (quadratic, stable, with drift asymptotically
// negligible) support these; they are required wherever the analysis works at
// radii like r_theta with theta = e^{n^2}.

// log phi^{-1}(e^{log_y}); requires log_y large enough that drift corrections
// are below double resolution (log_y >= 40 suffices for alpha <= 1e6)
inline double log_phi_inv(const BranchingMechanism& m, double log_y) {
    if (log_y < 40.0) return std::log(phi_inv(m, std::exp(log_y)));
    if (m.beta > 0.0 && m.levy == LevyKind::none) {
        // psi'{-1}(y) ~ y/(2 beta), phi^{-1}(y) ~ y^2/(4 beta)
        return 2.0 * log_y - std::log(4.0 * m.beta);
    }
    if (m.is_pure_stable()) {
        const double g = m.stable_gamma;
        // psi'^{-1}(y) = (y/(c g))^{1/(g-1)}, phi^{-1} = c mu^g
        return std::log(m.stable_c) +
               (g / (g - 1.0)) * (log_y - std::log(m.stable_c * g));
    }
    throw std::domain_error("log_phi_inv: closed form only for quadratic/stable");
}

// log g(e^{-linv}) where linv = log(1/r); valid for linv > e (so loglog >= 1)
inline double log_gauge_g(const BranchingMechanism& m, double linv) {
    if (!(linv > std::exp(1.0))) throw std::domain_error("log_gauge_g: log(1/r) must exceed e");
    const double ll = std::log(linv);
    const double log_x = std::log(ll) + linv;  // log(loglog(1/r)/r)
    return std::log(ll) - log_phi_inv(m, 2.0 * log_x);
}

}  // namespace snakelab
