#pragma once

// Radial profiles of (1/2) Delta u = psi(u): the interior solution v_r
// (regular at 0, blows up at |x| = r) and the exterior solution u_r
// (harmonic-type decay at infinity, blows up at |x| = r+). Both are found by
// bisection on a shooting parameter with blow-up detection; the stored profile
// comes from a fixed-step pass whose finite-difference residual is reported.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "snakelab/mechanism.hpp"

namespace snakelab {

struct RadialProfile {
    double r = 0.0;
    int d = 0;
    std::vector<double> s;
    std::vector<double> value;
    std::vector<double> deriv;
    double shooting_param = 0.0;  // v(0) for interior, tail coefficient C for exterior
    double blow_up_at = 0.0;
    double residual = 0.0;        // max |(1/2)(u'' + (d-1)u'/s) - psi(u)| / psi(u)
    double boundary_layer = 0.1;  // fraction of r excluded from the residual scan
};

namespace detail {

inline constexpr double kBlowUp = 1e120;

struct OdeState {
    double s, u, up;
};

// one RK4 step of u'' = 2 psi(u) - (d-1) u'/s
inline OdeState rk4_step(const BranchingMechanism& m, int d, OdeState st, double h) {
    auto acc = [&](double s, double u, double up) {
        double a = 2.0 * m.psi(std::max(u, 0.0));
        if (d > 1 && s > 0.0) a -= (d - 1) * up / s;
        return a;
    };
    const double k1u = st.up, k1p = acc(st.s, st.u, st.up);
    const double k2u = st.up + 0.5 * h * k1p, k2p = acc(st.s + 0.5 * h, st.u + 0.5 * h * k1u, st.up + 0.5 * h * k1p);
    const double k3u = st.up + 0.5 * h * k2p, k3p = acc(st.s + 0.5 * h, st.u + 0.5 * h * k2u, st.up + 0.5 * h * k2p);
    const double k4u = st.up + h * k3p, k4p = acc(st.s + h, st.u + h * k3u, st.up + h * k3p);
    return {st.s + h, st.u + h * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0,
            st.up + h * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0};
}

// integrate until blow-up or s passes s_end (direction given by sign of h_base);
// returns the blow-up location, or NaN if none before s_end
inline double integrate_to_blowup(const BranchingMechanism& m, int d, OdeState st, double s_end,
                                  double h_scale) {
    const double dir = s_end > st.s ? 1.0 : -1.0;
    for (long iter = 0; iter < 100000000L; ++iter) {
        if (!(st.u < kBlowUp) || !std::isfinite(st.up)) return st.s;
        if ((s_end - st.s) * dir <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        double h = h_scale;
        if (st.up != 0.0) h = std::min(h, 0.02 * std::abs(st.u / st.up));
        h = std::min(h, std::abs(s_end - st.s));
        st = rk4_step(m, d, st, dir * std::max(h, 1e-300));
    }
    throw std::runtime_error("radial: integration stalled");
}

}  // namespace detail

// interior profile: v(0) = c, v'(0) = 0, blow-up tuned to s = r
inline RadialProfile solve_radial_interior(const BranchingMechanism& mech, int d, double r,
                                           double* v0_out = nullptr) {
    if (d < 1 || !(r > 0.0)) throw std::invalid_argument("solve_radial_interior: bad arguments");
    const double s0 = 1e-8 * r;
    auto start = [&](double c) {
        // series start: v = c + psi(c) s^2 / d
        return detail::OdeState{s0, c + mech.psi(c) * s0 * s0 / d, 2.0 * mech.psi(c) * s0 / d};
    };
    auto blow_at = [&](double c) {
        return detail::integrate_to_blowup(mech, d, start(c), 1.5 * r, r / 4000.0);
    };
    // bracket: large c blows up before r, small c after (or not at all)
    double c_hi = 1.0;
    int guard = 0;
    while (!(blow_at(c_hi) < r)) {
        c_hi *= 4.0;
        if (++guard > 500) throw std::runtime_error("solve_radial_interior: no upper bracket");
    }
    double c_lo = c_hi / 4.0;
    guard = 0;
    while (true) {
        const double b = blow_at(c_lo);
        if (std::isnan(b) || b > r) break;
        c_lo /= 4.0;
        if (++guard > 500) throw std::runtime_error("solve_radial_interior: no lower bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(c_lo * c_hi);
        const double b = blow_at(mid);
        if (!std::isnan(b) && b < r)
            c_hi = mid;
        else
            c_lo = mid;
        if (c_hi / c_lo - 1.0 < 1e-13) break;
    }
    const double c_star = std::sqrt(c_lo * c_hi);
    const double b_star = blow_at(c_star);
    if (std::isnan(b_star) || std::abs(b_star - r) > 1e-4 * r)
        throw std::runtime_error("solve_radial_interior: shooting did not localize the blow-up");

    // fine fixed-step pass with 5-point finite-difference residual
    RadialProfile prof;
    prof.r = r;
    prof.d = d;
    prof.shooting_param = c_star;
    prof.blow_up_at = b_star;
    if (v0_out) *v0_out = c_star;
    const std::size_t n = 50000;
    const double h = (r - s0) / static_cast<double>(n);
    std::vector<double> us(n + 1), ups(n + 1), ss(n + 1);
    detail::OdeState st = start(c_star);
    us[0] = st.u;
    ups[0] = st.up;
    ss[0] = st.s;
    std::size_t last = n;
    for (std::size_t i = 1; i <= n; ++i) {
        st = detail::rk4_step(mech, d, st, h);
        if (!(st.u < detail::kBlowUp) || !std::isfinite(st.up)) {
            last = i - 1;
            break;
        }
        us[i] = st.u;
        ups[i] = st.up;
        ss[i] = st.s;
    }
    // residual on locally scaled stencils: spacing ~ 1e-3 x distance to the
    // blow-up keeps both FD truncation and h^-2 roundoff far below 1e-6
    const double layer_edge = r * (1.0 - prof.boundary_layer);
    double worst = 0.0;
    for (int k = 0; k < 400; ++k) {
        const std::size_t i = 2 + static_cast<std::size_t>((last - 4) * (k / 399.0));
        if (ss[i] > layer_edge) continue;
        const std::size_t m =
            std::max<std::size_t>(1, static_cast<std::size_t>(1e-3 * (b_star - ss[i]) / h));
        if (i < 2 * m || i + 2 * m > last) continue;  // stencil must fit at full width
        const double H = m * h;
        const double upp = (-us[i - 2 * m] + 16 * us[i - m] - 30 * us[i] + 16 * us[i + m] -
                            us[i + 2 * m]) /
                           (12 * H * H);
        const double up =
            (us[i - 2 * m] - 8 * us[i - m] + 8 * us[i + m] - us[i + 2 * m]) / (12 * H);
        const double lhs = 0.5 * (upp + (d - 1) * up / ss[i]);
        worst = std::max(worst, std::abs(lhs - mech.psi(us[i])) / mech.psi(us[i]));
    }
    prof.residual = worst;
    const std::size_t stride = std::max<std::size_t>(1, last / 2000);
    for (std::size_t i = 0; i <= last; i += stride) {
        prof.s.push_back(ss[i]);
        prof.value.push_back(us[i]);
        prof.deriv.push_back(ups[i]);
    }
    return prof;
}

// exterior profile on [r, s_max]: u ~ C s^{2-d} at s_max, blow-up tuned to s = r+
inline RadialProfile solve_radial_exterior(const BranchingMechanism& mech, int d, double r,
                                           double s_max) {
    if (d < 3) throw std::invalid_argument("solve_radial_exterior: requires d >= 3");
    if (!(s_max >= 10.0 * r)) throw std::invalid_argument("solve_radial_exterior: s_max >= 10 r");
    auto start = [&](double C) {
        return detail::OdeState{s_max, C * std::pow(s_max, 2.0 - d),
                                C * (2.0 - d) * std::pow(s_max, 1.0 - d)};
    };
    const double r_target_hi = r * (1.0 + 1e-4);
    auto blow_at = [&](double C) {
        // integrate inward; NaN when the profile stays finite down past r
        return detail::integrate_to_blowup(mech, d, start(C), r, (s_max - r) / 8000.0);
    };
    double c_hi = std::pow(r, d - 2.0);  // u(r)-scale seed
    int guard = 0;
    while (!(blow_at(c_hi) > 0.0)) {  // NaN-safe: want blow-up strictly above r
        c_hi *= 4.0;
        if (++guard > 500) throw std::runtime_error("solve_radial_exterior: no upper bracket");
    }
    double c_lo = c_hi;
    guard = 0;
    while (true) {
        const double b = blow_at(c_lo);
        if (std::isnan(b)) break;  // reached r finite: C small enough
        c_lo /= 4.0;
        if (++guard > 500) throw std::runtime_error("solve_radial_exterior: no lower bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(c_lo * c_hi);
        const double b = blow_at(mid);
        if (std::isnan(b) || b < r)
            c_lo = mid;
        else if (b > r_target_hi)
            c_hi = mid;
        else {
            c_lo = c_hi = mid;
            break;
        }
        if (c_hi / c_lo - 1.0 < 1e-13) break;
    }
    const double c_star = std::sqrt(c_lo * c_hi);

    RadialProfile prof;
    prof.r = r;
    prof.d = d;
    prof.shooting_param = c_star;
    const std::size_t n = 560000;
    const double h = (s_max - r) / static_cast<double>(n);
    std::vector<double> us, ups, ss;
    us.reserve(n + 1);
    ups.reserve(n + 1);
    ss.reserve(n + 1);
    detail::OdeState st = start(c_star);
    us.push_back(st.u);
    ups.push_back(st.up);
    ss.push_back(st.s);
    for (std::size_t i = 1; i <= n; ++i) {
        st = detail::rk4_step(mech, d, st, -h);
        if (!(st.u < detail::kBlowUp) || !std::isfinite(st.up)) break;
        us.push_back(st.u);
        ups.push_back(st.up);
        ss.push_back(st.s);
    }
    prof.blow_up_at = ss.back();
    if (prof.blow_up_at > r * (1.0 + 2e-4))
        throw std::runtime_error("solve_radial_exterior: shooting did not localize the blow-up");
    const double layer_edge = r * (1.0 + prof.boundary_layer);
    double worst = 0.0;
    const std::size_t count = us.size();
    for (int k = 0; k < 400; ++k) {
        const std::size_t i = 2 + static_cast<std::size_t>((count - 5) * (k / 399.0));
        if (ss[i] < layer_edge) continue;  // inward sweep: s decreasing
        const std::size_t m = std::max<std::size_t>(
            1, static_cast<std::size_t>(1e-3 * (ss[i] - prof.blow_up_at) / h));
        if (i < 2 * m || i + 2 * m >= count) continue;  // stencil must fit at full width
        const double H = m * h;
        const double upp = (-us[i - 2 * m] + 16 * us[i - m] - 30 * us[i] + 16 * us[i + m] -
                            us[i + 2 * m]) /
                           (12 * H * H);
        const double up =
            -(us[i - 2 * m] - 8 * us[i - m] + 8 * us[i + m] - us[i + 2 * m]) / (12 * H);
        const double psi_u = mech.psi(us[i]);
        if (psi_u <= 0.0) continue;
        const double lhs = 0.5 * (upp + (d - 1) * up / ss[i]);
        worst = std::max(worst, std::abs(lhs - psi_u) / psi_u);
    }
    prof.residual = worst;
    const std::size_t stride = std::max<std::size_t>(1, us.size() / 4000);
    for (std::size_t i = 0; i < us.size(); i += stride) {
        prof.s.push_back(ss[i]);
        prof.value.push_back(us[i]);
        prof.deriv.push_back(ups[i]);
    }
    std::reverse(prof.s.begin(), prof.s.end());
    std::reverse(prof.value.begin(), prof.value.end());
    std::reverse(prof.deriv.begin(), prof.deriv.end());
    return prof;
}

}  // namespace snakelab
