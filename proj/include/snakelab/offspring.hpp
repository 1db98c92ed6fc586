#pragma once

// Critical offspring laws matched to a branching mechanism, with the walk and
// time normalizations used by the tree and total-mass samplers.
//   quadratic beta l^2  ->  geometric(1/2), variance 2
//   stable c l^gamma    ->  P(nu = k) = k^{-1-gamma}/zeta(gamma), k >= 1,
//                           P(0) chosen for mean 1; tail ~ k^{-gamma}/(gamma zeta(gamma))
// The stable walk constant kappa satisfies f(s) - s ~ kappa (1-s)^gamma and has
// the closed form Gamma(2-gamma) / (gamma (gamma-1) zeta(gamma)).

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "snakelab/mechanism.hpp"
#include "snakelab/rng.hpp"
#include "snakelab/stats.hpp"

namespace snakelab {

class OffspringLaw {
  public:
    enum class Kind { geometric_half, zeta_stable };

    static OffspringLaw for_mechanism(const BranchingMechanism& m) {
        if (m.is_quadratic() && m.alpha == 0.0) return OffspringLaw(Kind::geometric_half, 0.0);
        if (m.is_pure_stable() && m.alpha == 0.0)
            return OffspringLaw(Kind::zeta_stable, m.stable_gamma);
        throw std::domain_error(
            "offspring law: only quadratic and stable mechanisms (alpha = 0) have samplers");
    }

    Kind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double kappa() const { return kappa_; }

    // Lukasiewicz-walk scale a_n: S_{nt}/a_n converges to the Levy process with
    // exponent psi. Heights scale by a_n/n.
    double walk_scale(const BranchingMechanism& m, double n) const {
        if (kind_ == Kind::geometric_half) return std::sqrt(n / m.beta);
        return std::pow(n * kappa_ / m.stable_c, 1.0 / gamma_);
    }

    // generations per unit of CSBP time at mass scale n
    double generations_per_unit_time(const BranchingMechanism& m, double n) const {
        if (kind_ == Kind::geometric_half) return m.beta * n;
        return (m.stable_c / kappa_) * std::pow(n, gamma_ - 1.0);
    }

    long long sample(Rng& rng) const {
        if (kind_ == Kind::geometric_half) {
            std::geometric_distribution<long long> geo(0.5);
            return geo(rng);
        }
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double u = u01(rng);
        if (u < cdf_.back()) {
            // binary search in the table
            std::size_t lo = 0, hi = cdf_.size() - 1;
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (cdf_[mid] < u)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            return static_cast<long long>(lo);
        }
        // rare tail continuation: expected extra work is O(k_table^{1-gamma})
        double acc = cdf_.back();
        long long k = static_cast<long long>(cdf_.size());
        while (acc < u) {
            acc += std::pow(static_cast<double>(k), -1.0 - gamma_) / zeta_g_;
            if (acc >= u) return k;
            if (++k > (1LL << 40)) throw std::runtime_error("offspring sample: tail runaway");
        }
        return k;
    }

    // total offspring of k independent individuals
    long long sample_sum(long long k, Rng& rng) const {
        if (k <= 0) return 0;
        if (kind_ == Kind::geometric_half) {
            // NegBin(k, 1/2) = Poisson(Gamma(k, 1))
            std::gamma_distribution<double> gam(static_cast<double>(k), 1.0);
            std::poisson_distribution<long long> poi(gam(rng));
            return poi(rng);
        }
        long long s = 0;
        for (long long i = 0; i < k; ++i) s += sample(rng);
        return s;
    }

    const char* name() const {
        return kind_ == Kind::geometric_half ? "geometric(1/2)" : "zeta-stable";
    }

  private:
    OffspringLaw(Kind kind, double gamma) : kind_(kind), gamma_(gamma) {
        if (kind_ == Kind::zeta_stable) {
            zeta_g_ = riemann_zeta(gamma_);
            const double zeta_g1 = riemann_zeta(1.0 + gamma_);
            kappa_ = std::tgamma(2.0 - gamma_) / (gamma_ * (gamma_ - 1.0) * zeta_g_);
            cdf_.resize(1025);
            cdf_[0] = 1.0 - zeta_g1 / zeta_g_;  // P(0)
            for (std::size_t k = 1; k < cdf_.size(); ++k)
                cdf_[k] = cdf_[k - 1] + std::pow(static_cast<double>(k), -1.0 - gamma_) / zeta_g_;
        }
    }

    Kind kind_;
    double gamma_ = 0.0;
    double kappa_ = 0.0;
    double zeta_g_ = 0.0;
    std::vector<double> cdf_;
};

}  // namespace snakelab
