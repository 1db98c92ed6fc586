#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "snakelab/mechanism.hpp"

using namespace snakelab;

namespace {

BranchingMechanism quad() { return BranchingMechanism::quadratic(1.0); }
BranchingMechanism stab15() { return BranchingMechanism::stable(1.0, 1.5); }
BranchingMechanism unit_atom() { return BranchingMechanism::tabulated({{1.0, 1.0}}); }
BranchingMechanism drift_quad() { return BranchingMechanism::quadratic(1.0, 1.0); }  // l + l^2

}  // namespace

TEST_CASE("psi closed forms") {
    CHECK(quad().psi(2.0) == 4.0);
    CHECK(stab15().psi(4.0) == Catch::Approx(8.0).epsilon(1e-14));
    // unit atom at r=1: e^{-1} - 1 + 1
    CHECK(unit_atom().psi(1.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(quad().psi(0.0) == 0.0);
    CHECK_THROWS_AS(quad().psi(-1.0), std::invalid_argument);
}

TEST_CASE("psi_prime closed forms") {
    CHECK(quad().psi_prime(3.0) == 6.0);
    CHECK(stab15().psi_prime(4.0) == Catch::Approx(3.0).epsilon(1e-14));
    CHECK(unit_atom().psi_prime(1.0) == Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("invert") {
    CHECK(psi_inv(quad(), 4.0) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(psi_inv(drift_quad(), 2.0) == Catch::Approx(1.0).epsilon(1e-12));
    // quadratic: phi(l) = 2 sqrt(l), so phi^{-1}(2) = 1
    CHECK(phi_inv(quad(), 2.0) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(psi_inv(quad(), 0.0) == 0.0);
    CHECK_THROWS_AS(psi_inv(quad(), -1.0), std::domain_error);
    // phi range starts at alpha
    CHECK_THROWS_AS(phi_inv(BranchingMechanism::quadratic(1.0, 2.0), 1.0), std::domain_error);
}

TEST_CASE("inversion round trip over 8 decades") {
    // a tabulated mechanism with unbounded psi' needs beta > 0
    auto tab = BranchingMechanism::tabulated({{1.0, 1.0}, {0.2, 3.0}}, 0.0, 0.5);
    for (const auto& m : {quad(), stab15(), tab}) {
        for (int k = 0; k <= 32; ++k) {
            const double y = 1e-4 * std::pow(10.0, 8.0 * k / 32.0);
            CHECK(std::abs(m.psi(psi_inv(m, y)) - y) <= 1e-9 * std::max(1.0, y));
            const double yp = y + m.alpha;
            CHECK(std::abs(m.psi_prime(psi_prime_inv(m, yp)) - yp) <= 1e-9 * std::max(1.0, yp));
            CHECK(std::abs(phi_eval(m, phi_inv(m, yp)) - yp) <= 1e-9 * std::max(1.0, yp));
        }
    }
    // bounded psi' range is reported as a domain error, not a solver failure
    CHECK_THROWS_AS(psi_prime_inv(unit_atom(), 1.5), std::domain_error);
}

TEST_CASE("phi") {
    CHECK(phi_eval(quad(), 4.0) == Catch::Approx(4.0).epsilon(1e-12));
    // stable 1.5: phi(8) = gamma * (8^{1/gamma})^{gamma-1} = 1.5 * 4^{1/2}... = 3
    CHECK(phi_eval(stab15(), 8.0) == Catch::Approx(3.0).epsilon(1e-12));
    CHECK(phi_eval(quad(), 0.0) == 0.0);
    CHECK(phi_eval(BranchingMechanism::quadratic(2.0, 0.7), 0.0) == 0.7);
}

TEST_CASE("convexity chain on wide grids") {
    for (const auto& m : {quad(), stab15(), unit_atom(), drift_quad(),
                          BranchingMechanism::tabulated({{0.5, 2.0}, {3.0, 0.25}}, 0.1, 0.2)}) {
        for (int k = 0; k <= 400; ++k) {
            const double lam = 1e-3 * std::pow(10.0, 12.0 * k / 400.0);
            const double p1 = m.psi(lam), p2 = m.psi(2.0 * lam);
            const double tl = m.psi_tilde(lam), pp = m.psi_prime(lam);
            REQUIRE(p2 <= 4.0 * p1 * (1.0 + 1e-12));
            REQUIRE(tl <= pp * (1.0 + 1e-12));
            REQUIRE(pp <= (p2 - p1) / lam * (1.0 + 1e-12));
            REQUIRE((p2 - p1) / lam <= 4.0 * tl * (1.0 + 1e-12));
            const double ph = phi_eval(m, lam);
            const double li = psi_inv(m, lam);
            REQUIRE(lam / li <= ph * (1.0 + 1e-10));
            REQUIRE(ph <= 4.0 * lam / li * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("divided difference") {
    CHECK(divided_difference(quad(), 1.0, 3.0) == Catch::Approx(4.0));
    CHECK(divided_difference(stab15(), 2.0, 2.0) == stab15().psi_prime(2.0));
    // monotone in each argument for convex psi (brute-force grid)
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        double a = u(rng), b = u(rng), c = u(rng);
        if (a > c) std::swap(a, c);
        REQUIRE(divided_difference(quad(), a, b) <= divided_difference(quad(), c, b) + 1e-12);
        REQUIRE(divided_difference(unit_atom(), b, a) <=
                divided_difference(unit_atom(), b, c) + 1e-12);
    }
}

TEST_CASE("exponent reports") {
    auto rs = exponents(stab15());
    CHECK(rs.gamma_lower == 1.5);
    CHECK(rs.eta_upper == 1.5);
    CHECK(rs.delta.value() == 1.5);
    CHECK(rs.method == ExponentMethod::analytic);

    auto rq = exponents(quad());
    CHECK(rq.gamma_lower == 2.0);
    CHECK(rq.delta.value() == 2.0);

    // l + l^2 fitted on [1, 1e6]: slopes of the asymptotic window sit near 2
    auto rf = exponents(drift_quad(), {1.0, 1e6, 64}, /*force_fitted=*/true);
    CHECK(rf.method == ExponentMethod::fitted);
    CHECK(rf.gamma_lower >= 1.9);
    CHECK(rf.eta_upper <= 2.0 + 1e-9);

    // tabulated: fitted, delta refused
    auto rt = exponents(unit_atom(), {1.0, 1e8, 64});
    CHECK(rt.method == ExponentMethod::fitted);
    CHECK_FALSE(rt.delta.has_value());

    for (const auto& rep : {rs, rq, rf, rt}) {
        const double fit_tol = rep.method == ExponentMethod::fitted ? 0.05 : 1e-9;
        REQUIRE(rep.gamma_lower >= 1.0 - fit_tol);
        REQUIRE(rep.gamma_lower <= rep.eta_upper + fit_tol);
        REQUIRE(rep.eta_upper <= 2.0 + fit_tol);
        if (rep.delta) {
            REQUIRE(*rep.delta >= 1.0);
            REQUIRE(*rep.delta <= rep.gamma_lower + fit_tol);
        }
    }

    CHECK_THROWS_AS(exponents(quad(), {1.0, 1e3, 16}), std::invalid_argument);
}

TEST_CASE("mechanism validation") {
    CHECK_THROWS_AS(BranchingMechanism::quadratic(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(BranchingMechanism::stable(1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(BranchingMechanism::stable(0.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(BranchingMechanism::tabulated({{-1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(BranchingMechanism::quadratic(0.0), std::invalid_argument);
}

TEST_CASE("log_psi_prime agrees and extends") {
    for (const auto& m : {quad(), stab15(), drift_quad(), unit_atom()}) {
        for (double L : {0.0, 5.0, 100.0, 600.0}) {
            CHECK(m.log_psi_prime(L) ==
                  Catch::Approx(std::log(m.psi_prime(std::exp(L)))).epsilon(1e-12));
        }
        // seam consistency: second difference across the branch switch stays tiny
        const double d_before = m.log_psi_prime(649.9) - m.log_psi_prime(649.7);
        const double d_after = m.log_psi_prime(650.3) - m.log_psi_prime(650.1);
        CHECK(d_after == Catch::Approx(d_before).margin(1e-9));
        REQUIRE(std::isfinite(m.log_psi_prime(5e4)));
    }
}
