#pragma once

// Total-mass paths: a continuous-state branching process approximated by
// scaled Galton-Watson generation sizes. Mass scale 1/n, time scale
// generations_per_unit_time(n); the Laplace functional converges to the flow
// du/dt = -psi(u).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "snakelab/mechanism.hpp"
#include "snakelab/offspring.hpp"
#include "snakelab/rng.hpp"

namespace snakelab {

struct CsbpPath {
    std::vector<double> times;
    std::vector<double> mass;  // absorbed at 0
    double x0 = 0.0;
};

inline constexpr long long kPopulationCap = 100000000;  // 1e8 individuals

inline CsbpPath csbp_from_gw(const BranchingMechanism& mech, double x0, double horizon,
                             double n_scale, Rng& rng) {
    if (!(x0 >= 0.0)) throw std::invalid_argument("csbp_from_gw: x0 must be >= 0");
    if (!(horizon > 0.0 && n_scale >= 1.0))
        throw std::invalid_argument("csbp_from_gw: bad horizon or n_scale");
    CsbpPath path;
    path.x0 = x0;
    if (x0 == 0.0) {
        path.times = {0.0, horizon};
        path.mass = {0.0, 0.0};
        return path;
    }
    const OffspringLaw law = OffspringLaw::for_mechanism(mech);
    const double gen_rate = law.generations_per_unit_time(mech, n_scale);
    const long long generations = static_cast<long long>(std::ceil(horizon * gen_rate));
    long long pop = static_cast<long long>(std::ceil(x0 * n_scale));
    if (pop > kPopulationCap) throw std::runtime_error("csbp_from_gw: population overflow cap");
    path.times.reserve(generations + 1);
    path.mass.reserve(generations + 1);
    path.times.push_back(0.0);
    path.mass.push_back(static_cast<double>(pop) / n_scale);
    for (long long g = 1; g <= generations; ++g) {
        pop = law.sample_sum(pop, rng);
        if (pop > kPopulationCap) throw std::runtime_error("csbp_from_gw: population overflow cap");
        path.times.push_back(static_cast<double>(g) / gen_rate);
        path.mass.push_back(static_cast<double>(pop) / n_scale);
    }
    return path;
}

// value at time t (last grid value at or before t)
inline double csbp_value_at(const CsbpPath& p, double t) {
    if (p.times.empty()) throw std::invalid_argument("csbp_value_at: empty path");
    double v = p.mass.front();
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        if (p.times[i] > t) break;
        v = p.mass[i];
    }
    return v;
}

}  // namespace snakelab
