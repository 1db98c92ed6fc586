#pragma once

// Geometric-measure estimators over weighted point clouds: greedy gauge
// packings, dyadic box counts, dimension regressions, local density profiles
// and the two-sided comparison check between a measure and its packing sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "snakelab/dyadic.hpp"
#include "snakelab/point_cloud.hpp"
#include "snakelab/rng.hpp"
#include "snakelab/stats.hpp"

namespace snakelab {

// Closed balls of equal radius eps are a valid packing when all pairwise
// center distances reach 2*eps; radii may be taken as eps- in the sup over
// packings, so the acceptance predicate carries a closure tolerance.
inline constexpr double kPackingSlack = 1.0 - 1e-12;

namespace detail {

// Uniform-grid index with cell size = query radius. Hash collisions only add
// candidates; membership is always confirmed by a true distance check.
class GridIndex {
  public:
    GridIndex(int dim, double cell) : dim_(dim), inv_cell_(1.0 / cell) {}

    void insert(const double* x, std::uint32_t id) {
        buckets_[key_of(x)].push_back(id);
        ++count_;
    }

    template <class Visit>
    void for_candidates(const double* x, Visit&& visit) const {
        std::vector<std::int64_t> base(dim_);
        for (int j = 0; j < dim_; ++j) base[j] = cell_coord(x[j]);
        std::vector<std::int64_t> cur(dim_);
        visit_neighbors(x, base, cur, 0, visit);
    }

    std::size_t size() const { return count_; }

  private:
    std::int64_t cell_coord(double v) const {
        return static_cast<std::int64_t>(std::floor(v * inv_cell_));
    }

    std::uint64_t key_of(const double* x) const {
        std::uint64_t h = 1469598103934665603ull;
        for (int j = 0; j < dim_; ++j) {
            std::uint64_t c = static_cast<std::uint64_t>(cell_coord(x[j]));
            h = (h ^ c) * 1099511628211ull;
        }
        return h;
    }

    std::uint64_t key_of_cells(const std::vector<std::int64_t>& cells) const {
        std::uint64_t h = 1469598103934665603ull;
        for (int j = 0; j < dim_; ++j)
            h = (h ^ static_cast<std::uint64_t>(cells[j])) * 1099511628211ull;
        return h;
    }

    template <class Visit>
    void visit_neighbors(const double* x, const std::vector<std::int64_t>& base,
                         std::vector<std::int64_t>& cur, int j, Visit&& visit) const {
        if (j == dim_) {
            auto it = buckets_.find(key_of_cells(cur));
            if (it != buckets_.end())
                for (std::uint32_t id : it->second) visit(id);
            return;
        }
        for (std::int64_t o = -1; o <= 1; ++o) {
            cur[j] = base[j] + o;
            visit_neighbors(x, base, cur, j + 1, visit);
        }
    }

    int dim_;
    double inv_cell_;
    std::size_t count_ = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

}  // namespace detail

struct PackingRun {
    double eps = 0.0;
    std::size_t count = 0;
    double sum = 0.0;                    // count * g(eps)
    std::vector<std::uint32_t> centers;  // indices into the cloud
};

// Greedy uniform-radius eps-packing with centers at cloud points. Order is a
// seeded shuffle; the first pass uses the input order, and the best of
// `restarts` passes is kept (sup not attained, only lower-bounded). The
// returned packing is re-verified: pairwise center distance >= 2 eps up to
// the closure tolerance.
template <class Gauge>
PackingRun greedy_packing(const PointCloud& cloud, double eps, Gauge&& gauge, Rng& rng,
                          int restarts = 8) {
    if (!(eps > 0.0)) throw std::domain_error("greedy_packing: eps must be > 0");
    const double geps = gauge(eps);  // throws if eps outside the gauge domain
    const double min_dist = 2.0 * eps * kPackingSlack;
    const double min_dist2 = min_dist * min_dist;
    const std::size_t n = cloud.size();
    const bool brute = n < 2000;

    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);

    PackingRun best;
    best.eps = eps;
    for (int run = 0; run < std::max(1, restarts); ++run) {
        if (run > 0) std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::uint32_t> accepted;
        detail::GridIndex grid(cloud.dim, 2.0 * eps);
        for (std::uint32_t id : order) {
            const double* x = cloud.point(id);
            bool blocked = false;
            if (brute) {
                for (std::uint32_t a : accepted)
                    if (dist2(x, cloud.point(a), cloud.dim) < min_dist2) {
                        blocked = true;
                        break;
                    }
            } else {
                grid.for_candidates(x, [&](std::uint32_t a) {
                    if (!blocked && dist2(x, cloud.point(a), cloud.dim) < min_dist2)
                        blocked = true;
                });
            }
            if (!blocked) {
                accepted.push_back(id);
                if (!brute) grid.insert(x, id);
            }
        }
        if (accepted.size() > best.count) {
            best.count = accepted.size();
            best.centers = std::move(accepted);
        }
    }
    best.sum = static_cast<double>(best.count) * geps;
    // post-hoc packing validity
    for (std::size_t i = 0; i < best.centers.size(); ++i)
        for (std::size_t j = i + 1; j < best.centers.size(); ++j)
            if (dist2(cloud.point(best.centers[i]), cloud.point(best.centers[j]), cloud.dim) <
                min_dist2 * kPackingSlack)
                throw std::logic_error("greedy_packing: produced an invalid packing");
    return best;
}

// Occupied nested dyadic cells at level n(eps) (outer-cube side).
inline std::size_t box_count(const PointCloud& cloud, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("box_count: eps must be > 0");
    const int level = dyadic_level(eps, cloud.dim);
    struct VecHash {
        std::size_t operator()(const std::vector<std::int64_t>& v) const {
            std::uint64_t h = 1469598103934665603ull;
            for (auto c : v) h = (h ^ static_cast<std::uint64_t>(c)) * 1099511628211ull;
            return static_cast<std::size_t>(h);
        }
    };
    std::unordered_set<std::vector<std::int64_t>, VecHash> cells;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        cells.insert(box_cell_of(cloud.point(i), cloud.dim, level));
    return cells.size();
}

enum class RegressKind { box_count, packing_sum };

struct DimFit {
    double slope = 0.0;
    double half_width = 0.0;
    std::size_t rows_used = 0;
};

// Least-squares dimension fit: log(count) against log(1/eps) for box counts,
// log(sum) against log(eps) for packing sums under power gauges.
inline DimFit dim_regress(const std::vector<std::pair<double, double>>& rows, double window_lo,
                          double window_hi, RegressKind kind) {
    if (!(window_lo > 0.0 && window_hi > window_lo))
        throw std::invalid_argument("dim_regress: degenerate window");
    std::vector<double> x, y;
    for (const auto& [eps, value] : rows) {
        if (eps < window_lo || eps > window_hi || !(value > 0.0)) continue;
        x.push_back(kind == RegressKind::box_count ? std::log(1.0 / eps) : std::log(eps));
        y.push_back(std::log(value));
    }
    if (x.size() < 5) throw std::invalid_argument("dim_regress: need >= 5 rows inside window");
    const LineFit f = least_squares(x, y);
    return {f.slope, 2.0 * f.slope_se, x.size()};
}

struct PackingRow {
    double eps = 0.0;
    std::size_t count = 0;
    double sum = 0.0;
    double premeasure_lb = 0.0;  // sup over runs at radii <= eps; monotone in eps
};

struct PackingReport {
    std::string gauge_id;
    std::vector<PackingRow> rows;  // decreasing eps
    double slope = 0.0;
    double half_width = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
};

// Greedy ladder over decreasing eps. Each smaller-eps packing is admissible
// at every larger eps, so the reported pre-measure lower bound at eps is the
// running max of sums over radii <= eps.
template <class Gauge>
PackingReport packing_ladder(const PointCloud& cloud, Gauge&& gauge, std::string gauge_id,
                             std::vector<double> eps_list, Rng& rng, int restarts = 8) {
    std::sort(eps_list.begin(), eps_list.end());  // ascending
    PackingReport rep;
    rep.gauge_id = std::move(gauge_id);
    double running = 0.0;
    std::vector<PackingRow> ascending;
    for (double eps : eps_list) {
        const PackingRun run = greedy_packing(cloud, eps, gauge, rng, restarts);
        running = std::max(running, run.sum);
        ascending.push_back({eps, run.count, run.sum, running});
    }
    rep.rows.assign(ascending.rbegin(), ascending.rend());
    return rep;
}

struct DensityProfile {
    std::vector<double> r;
    std::vector<double> mass;   // cloud mass of the closed ball B(x, r)
    std::vector<double> ratio;  // mass / g(r)
    double min_ratio = 0.0;     // empirical liminf proxy: minimum over the grid
};

template <class Gauge>
DensityProfile local_density(const PointCloud& cloud, Gauge&& gauge, const double* x,
                             const std::vector<double>& r_grid) {
    if (r_grid.empty()) throw std::invalid_argument("local_density: empty r grid");
    std::vector<double> d(cloud.size());
    std::vector<std::size_t> idx(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        d[i] = std::sqrt(dist2(cloud.point(i), x, cloud.dim));
        idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    DensityProfile prof;
    prof.r = r_grid;
    std::sort(prof.r.begin(), prof.r.end());
    prof.mass.reserve(prof.r.size());
    prof.ratio.reserve(prof.r.size());
    double acc = 0.0;
    std::size_t i = 0;
    prof.min_ratio = std::numeric_limits<double>::infinity();
    for (double r : prof.r) {
        while (i < idx.size() && d[idx[i]] <= r) acc += cloud.weights[idx[i++]];
        const double ratio = acc / gauge(r);
        prof.mass.push_back(acc);
        prof.ratio.push_back(ratio);
        prof.min_ratio = std::min(prof.min_ratio, ratio);
    }
    return prof;
}

struct ComparisonReport {
    double kappa = 0.0;
    double eps = 0.0;
    double doubling_c = 0.0;  // empirical gauge doubling constant g(2 eps)/g(eps)
    std::size_t n_above = 0, n_below = 0;
    double halo_mass_above = 0.0, halo_mass_below = 0.0;
    double packing_sum_above = 0.0, packing_sum_below = 0.0;
    // (i): points with min-ratio >= kappa should carry at least kappa x packing sum
    bool lower_consistent = true;
    // (ii): points with min-ratio < kappa should carry at most C^2 kappa x packing sum
    bool upper_consistent = true;
    std::vector<int> above;  // per sample point
};

template <class Gauge>
ComparisonReport comparison_check(const PointCloud& cloud, const std::vector<std::vector<double>>& sample_points,
                                  Gauge&& gauge, double kappa, double eps,
                                  const std::vector<double>& r_grid, Rng& rng) {
    if (!(kappa > 0.0)) throw std::domain_error("comparison_check: kappa must be > 0");
    ComparisonReport rep;
    rep.kappa = kappa;
    rep.eps = eps;
    rep.doubling_c = gauge(2.0 * eps) / gauge(eps);
    PointCloud above_pts, below_pts;
    above_pts.dim = below_pts.dim = cloud.dim;
    for (const auto& x : sample_points) {
        const auto prof = local_density(cloud, gauge, x.data(), r_grid);
        const bool hi = prof.min_ratio >= kappa;
        rep.above.push_back(hi ? 1 : 0);
        (hi ? above_pts : below_pts).push(x.data(), 1.0);
    }
    rep.n_above = above_pts.size();
    rep.n_below = below_pts.size();
    auto halo_mass = [&](const PointCloud& pts) {
        if (pts.size() == 0) return 0.0;
        double m = 0.0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            for (std::size_t k = 0; k < pts.size(); ++k)
                if (dist2(cloud.point(i), pts.point(k), cloud.dim) <= eps * eps) {
                    m += cloud.weights[i];
                    break;
                }
        }
        return m;
    };
    rep.halo_mass_above = halo_mass(above_pts);
    rep.halo_mass_below = halo_mass(below_pts);
    if (above_pts.size() > 0)
        rep.packing_sum_above = greedy_packing(above_pts, eps, gauge, rng).sum;
    if (below_pts.size() > 0)
        rep.packing_sum_below = greedy_packing(below_pts, eps, gauge, rng).sum;
    rep.lower_consistent =
        rep.halo_mass_above >= kappa * rep.packing_sum_above * (1.0 - 1e-9);
    rep.upper_consistent =
        rep.halo_mass_below <=
        rep.doubling_c * rep.doubling_c * kappa * rep.packing_sum_below * (1.0 + 1e-9);
    return rep;
}

}  // namespace snakelab
