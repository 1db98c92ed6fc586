#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "snakelab/bounds.hpp"

using namespace snakelab;

namespace {
auto quad() { return BranchingMechanism::quadratic(1.0); }
}

TEST_CASE("integral I: quadratic scaling") {
    // I(v) = sqrt(3) c0 v^{-1/2} with c0 = int_1^inf du/sqrt(u^3 - 1); the
    // oracle is the same quadrature applied to the substituted integrand
    const double c0 = adaptive_simpson(
                          [](double u) {
                              if (u == 0.0) return 2.0 / std::sqrt(3.0);
                              const double b = 1.0 + u * u;
                              return 2.0 * u / std::sqrt(b * b * b - 1.0);
                          },
                          0.0, 1.0, 1e-11) +
                      adaptive_simpson(
                          [](double w) {
                              const double b = std::exp(w);
                              return b / std::sqrt(b * b * b - 1.0);
                          },
                          std::log(2.0), std::log(1e8), 1e-11, 48, 32) +
                      2.0 * std::pow(1e8, -0.5);
    for (double v : {1.0, 10.0, 100.0}) {
        CHECK(integral_I(quad(), v) ==
              Catch::Approx(std::sqrt(3.0) * c0 / std::sqrt(v)).epsilon(1e-6));
    }
    // strictly decreasing
    REQUIRE(integral_I(quad(), 2.0) < integral_I(quad(), 1.0));

    // stable homogeneity: I(v) v^{(g-1)/2} constant
    for (double g : {1.3, 1.5, 1.8}) {
        auto m = BranchingMechanism::stable(1.0, g);
        const double ref = integral_I(m, 1.0);
        for (double v : {10.0, 1000.0}) {
            CHECK(integral_I(m, v) * std::pow(v, 0.5 * (g - 1.0)) ==
                  Catch::Approx(ref).epsilon(1e-6));
        }
    }
    // divergent family rejected
    CHECK_THROWS_AS(integral_I(BranchingMechanism::tabulated({{1.0, 1.0}}), 1.0),
                    std::domain_error);
}

TEST_CASE("interior radial profile") {
    // quadratic d=1: residual check on the computed profile
    double v0 = 0.0;
    auto prof = solve_radial_interior(quad(), 1, 0.5, &v0);
    REQUIRE(v0 > 0.0);
    CHECK(prof.residual < 1e-6);
    CHECK(std::abs(prof.blow_up_at - 0.5) <= 1e-4 * 0.5);
    // profile increases toward the boundary
    for (std::size_t i = 1; i < prof.value.size(); ++i)
        REQUIRE(prof.value[i] >= prof.value[i - 1]);

    // doubling r decreases the blow-up value
    double v0_small = 0.0, v0_big = 0.0;
    solve_radial_interior(quad(), 3, 0.1, &v0_small);
    solve_radial_interior(quad(), 3, 0.2, &v0_big);
    REQUIRE(v0_big < v0_small);
}

TEST_CASE("exterior radial profile") {
    // quadratic scaling oracle: v = beta u maps any beta to beta = 1, so the
    // beta = 1e-12 profile must be exactly 1e12 x the beta = 1 profile
    auto tiny_prof = solve_radial_exterior(BranchingMechanism::quadratic(1e-12), 5, 0.1, 1.0);
    auto unit_prof = solve_radial_exterior(quad(), 5, 0.1, 1.0);
    // agreement is limited by the 1e-4 blow-up localization window
    CHECK(tiny_prof.shooting_param * 1e-12 ==
          Catch::Approx(unit_prof.shooting_param).epsilon(5e-4));
    auto interp = [](const RadialProfile& p, double s) {
        const auto it = std::lower_bound(p.s.begin(), p.s.end(), s);
        const std::size_t i = it - p.s.begin();
        if (i == 0 || i >= p.s.size()) throw std::out_of_range("probe");
        const double w = (s - p.s[i - 1]) / (p.s[i] - p.s[i - 1]);
        return p.value[i - 1] * (1.0 - w) + p.value[i] * w;
    };
    for (double s : {0.15, 0.3, 0.5, 0.8})
        REQUIRE(interp(tiny_prof, s) * 1e-12 == Catch::Approx(interp(unit_prof, s)).epsilon(2e-3));

    // far-field decay follows the harmonic law s^{2-d}
    auto far_prof = solve_radial_exterior(quad(), 5, 0.1, 3.0);
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < far_prof.s.size(); ++i)
        if (far_prof.s[i] > 2.0) {
            lx.push_back(std::log(far_prof.s[i]));
            ly.push_back(std::log(far_prof.value[i]));
        }
    const auto fit = least_squares(lx, ly);
    CHECK(fit.slope == Catch::Approx(-3.0).margin(0.05));

    CHECK(unit_prof.residual < 1e-6);
    for (std::size_t i = 1; i < unit_prof.value.size(); ++i)
        REQUIRE(unit_prof.value[i] <= unit_prof.value[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("keller bracket") {
    for (double r : {0.05, 0.1}) {
        auto res = keller_check(quad(), 3, r);
        INFO("r " << r << " I(v0) " << res.I_v0 << " in [" << res.lower << ", " << res.upper
                  << "]");
        CHECK(res.holds);
        CHECK(res.residual < 1e-6);
        // bracket width ratio is exactly sqrt(d)
        CHECK(res.upper / res.lower == Catch::Approx(std::sqrt(3.0)));
    }
}

TEST_CASE("lemma constants") {
    auto lc = lemma_constants(quad(), 5, 1.0);
    CHECK(lc.c_exponent == Catch::Approx(1.5));
    CHECK(lc.c_delta == Catch::Approx(1.0).margin(1e-9));  // psi = l^2: ratio increasing
    CHECK(lc.c1 > 0.0);
    CHECK(lc.C2 == Catch::Approx(lc.c1 * 5.0));
    CHECK_THROWS_AS(lemma_constants(BranchingMechanism::tabulated({{1.0, 1.0}}), 5, 1.0),
                    std::domain_error);
}

TEST_CASE("q and J") {
    // quadratic, d=6, C2=1, r=0.1: q = 50, J = 0.01 sqrt(50) 4 (sqrt(50) - 1)
    auto out = q_and_J(quad(), 6, 0.1, 1.0);
    CHECK(out.q_r == Catch::Approx(50.0).epsilon(1e-10));
    const double expect = 0.01 * std::sqrt(50.0) * 4.0 * (std::sqrt(50.0) - 1.0);
    CHECK(out.J == Catch::Approx(expect).epsilon(1e-8));
    REQUIRE(out.J >= 0.0);
    CHECK_THROWS_AS(q_and_J(quad(), 6, 10.0, 1.0), std::domain_error);
}

TEST_CASE("radii theta") {
    // quadratic psi' = 2l with c = 1/2: 2 sqrt(l) = theta -> lambda = (theta/2)^2
    auto seq = radii_theta(quad(), 7, 0.5, {std::log(8.0)}, 1.0);
    CHECK(seq.rows[0].lambda == Catch::Approx(16.0).epsilon(1e-9));
    CHECK(seq.rows[0].r == Catch::Approx(std::sqrt(1.0 / 32.0)).epsilon(1e-9));

    // strictly decreasing r along increasing theta
    auto lad = rho_ladder(quad(), 5, 0.0, 1.0, 12);
    for (std::size_t n = 1; n < lad.rows.size(); ++n) {
        REQUIRE(lad.rows[n].log_r < lad.rows[n - 1].log_r);
        // rho_{n+1} <= e^{-n} rho_n
        REQUIRE(lad.rows[n].log_r - lad.rows[n - 1].log_r <= -static_cast<double>(n) + 1e-9);
    }
    // sup n^{-2} log(1/rho_n) finite across the ladder
    double sup = 0.0;
    for (std::size_t n = 1; n <= lad.rows.size(); ++n)
        sup = std::max(sup, -lad.rows[n - 1].log_r / (static_cast<double>(n) * n));
    REQUIRE(std::isfinite(sup));
    REQUIRE(sup > 0.0);

    // rcontrol: r_theta' / r_theta <= (theta/theta')^{1/2}
    auto pair = radii_theta(quad(), 5, 0.0, {3.0, 5.0}, 1.0);
    REQUIRE(pair.rows[1].log_r - pair.rows[0].log_r <= 0.5 * (3.0 - 5.0) + 1e-12);

    CHECK_THROWS_AS(radii_theta(quad(), 3, 0.0, {3.0}, 1.0), std::domain_error);  // empty c window
    CHECK_THROWS_AS(radii_theta(quad(), 7, 0.5, {std::log(1.5)}, 1.0), std::domain_error);
}

TEST_CASE("J bounded along the theta radii (stable, high dimension)") {
    auto mech = BranchingMechanism::stable(1.0, 1.5);
    const int d = 8;
    auto lc = lemma_constants(mech, d, 1.0);
    auto seq = radii_theta(mech, d, 0.0, {1.0, 4.0, 9.0, 16.0, 25.0, 36.0}, lc.C2);
    const double cap = lc.C2 / (seq.c_exponent - 2.0 / (d - 2.0));
    for (const auto& row : seq.rows) {
        REQUIRE(row.r > 0.0);
        auto qj = q_and_J(mech, d, row.r, lc.C2);
        INFO("log_theta " << row.log_theta << " J " << qj.J << " cap " << cap);
        REQUIRE(qj.J <= cap * 1.01);
    }
}

TEST_CASE("subordinator tail bounds") {
    // degenerate subordinator: S = 0, lower bound 1 at any a
    auto zero = [](double) { return 0.0; };
    auto [lo0, up0] = subordinator_tail_bounds(zero, 1.0, 0.5, 2.0);
    CHECK(lo0 == 1.0);
    CHECK(up0 == 0.0);
    // bounds always within [0, 1]
    auto phi = [](double l) { return std::sqrt(2.0) * std::pow(l, 0.25); };
    for (double rho : {0.01, 1.0, 100.0})
        for (double a : {0.01, 1.0}) {
            auto [lo, up] = subordinator_tail_bounds(phi, rho, a, 3.0);
            REQUIRE(lo >= 0.0);
            REQUIRE(lo <= 1.0);
            REQUIRE(up >= 0.0);
            REQUIRE(up <= 1.0);
        }
}

TEST_CASE("subordinator series over the rho ladder") {
    auto lad = rho_ladder(quad(), 5, 0.0, 1.0, 400);
    auto rep = subordinator_series(lad, 5.0, 50);
    REQUIRE(rep.lower_cross_index > 0);
    CHECK(rep.lower_cross_index <= 10000);
    INFO("crossed at " << rep.lower_cross_index << " tail " << rep.upper_tail);
    CHECK(rep.upper_tail < 1e-3);
    CHECK(rep.skipped <= 2);  // only the first radii sit above the gauge domain
    // lower terms behave like (log 1/(4 rho_n))^{-1/4}
    for (std::size_t n = rep.skipped; n < rep.rows.size(); n += 37) {
        const double l = rep.rows[n].log_inv_4rho;
        if (!(l > std::exp(1.0))) continue;
        REQUIRE(rep.rows[n].lower <= std::pow(l, -0.25));
        REQUIRE(rep.rows[n].lower >= 0.5 * std::pow(l, -0.25));
    }
}

TEST_CASE("s_n sequence") {
    auto rep = sn_sequence(quad(), 3.0, 400, 10.0);
    // decreasing to zero
    for (std::size_t n = 1; n < rep.rows.size(); ++n)
        REQUIRE(rep.rows[n].s <= rep.rows[n - 1].s * (1.0 + 1e-12));
    REQUIRE(rep.rows.back().s < 1e-10);
    // sandwich 2^n <= lambda_n and lambda^a <= phi* <= lambda^{2/u'}
    for (std::size_t n = 0; n < rep.rows.size(); ++n) {
        REQUIRE(rep.rows[n].lambda >= std::pow(2.0, static_cast<double>(n + 1)) * (1.0 - 1e-12));
        REQUIRE(std::pow(rep.rows[n].lambda, rep.a) <= rep.rows[n].phi_star * (1.0 + 1e-12));
        REQUIRE(rep.rows[n].phi_star <=
                std::pow(rep.rows[n].lambda, 2.0 / rep.u_prime) * (1.0 + 1e-12));
    }
    // fitted decay constant is finite and attained early
    REQUIRE(std::isfinite(rep.fitted_c));
    REQUIRE(rep.fitted_c_argmax <= 50);
    // complement series diverges well before n = 400
    REQUIRE(rep.divergence_cross > 0);
    REQUIRE(rep.divergence_cross <= 400);
    CHECK_THROWS_AS(sn_sequence(quad(), 5.0), std::domain_error);  // u >= 2g/(g-1) = 4
}

TEST_CASE("exit time transforms") {
    auto res = exit_time_laplace(1, 1.0, 1.0);
    CHECK(res.exact_1d == Catch::Approx(1.0 / std::cosh(std::sqrt(2.0))).epsilon(1e-12));
    CHECK(exit_time_laplace(3, 0.5, 0.0).exact_1d == 1.0);
    // short MC run with bridge correction, coarse tolerance
    auto mc = exit_time_laplace_mc(1, 1.0, 1.0, 20000, 1e-3, 77);
    INFO("mc " << mc.mc_mean << " +- " << mc.mc_se << " raw " << mc.mc_raw);
    CHECK(std::abs(mc.mc_mean - mc.exact_1d) <= 3.5 * mc.mc_se);
    // raw discrete-exit estimator is biased low (later exits)
    REQUIRE(mc.mc_raw < mc.mc_mean);
    // d-dim estimate never exceeds the exponential bound
    auto mcd = exit_time_laplace_mc(3, 1.0, 1.0, 5000, 1e-3, 78);
    REQUIRE(mcd.mc_mean <= mcd.upper_bound + 3.0 * mcd.mc_se);
}

TEST_CASE("f explorer") {
    const double linv = std::exp(8.0) + 10.0;  // log(1/r) just past the guard
    // kappa -> 0 with fixed q: F -> -C1 sqrt(q) loglog(1/r) < 0
    auto tiny = f_explorer(quad(), 5, linv, 1e-12, 4.0);
    CHECK(tiny.F == Catch::Approx(-tiny.c1_new * 2.0 * std::log(linv)).epsilon(1e-3));
    REQUIRE(tiny.F < 0.0);

    // increasing in kappa at fixed (r, q)
    auto f1 = f_explorer(quad(), 5, linv, 0.01, 4.0);
    auto f2 = f_explorer(quad(), 5, linv, 0.02, 4.0);
    REQUIRE(f2.F > f1.F);

    // kappa < kappa0: F(mu_{r, q_kappa}) <= -(C1/2)(kappa0/kappa)^{1/(2a-1)} loglog(1/r)
    auto base = f_explorer(quad(), 5, linv, 1.0, 2.0);
    for (double frac : {0.9, 0.5, 0.1}) {
        const double kappa = frac * base.kappa0;
        for (double li : {linv, 2.0 * linv, 8.0 * linv}) {
            auto fe = f_explorer(quad(), 5, li, kappa, 2.0);
            const double cap = -(fe.c1_new / 2.0) *
                               std::pow(fe.kappa0 / kappa, 1.0 / (2.0 * fe.a_exponent - 1.0)) *
                               std::log(li);
            INFO("kappa " << kappa << " F(q_k) " << fe.F_at_q_kappa << " cap " << cap);
            REQUIRE(fe.F_at_q_kappa <= cap * (1.0 - 1e-12));
            REQUIRE(fe.sign_at_q_kappa < 0);
        }
    }
    CHECK_THROWS_AS(f_explorer(quad(), 5, 100.0, 0.1, 2.0), std::domain_error);
}
