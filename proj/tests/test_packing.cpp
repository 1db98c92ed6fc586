#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "snakelab/packing.hpp"
#include "snakelab/rng.hpp"

using namespace snakelab;

namespace {

const auto power1 = [](double r) { return r; };

// brute-force greedy in input order, O(n^2), used as the oracle
std::size_t brute_greedy_count(const PointCloud& c, double eps) {
    std::vector<std::size_t> acc;
    const double min_d2 = (2.0 * eps * kPackingSlack) * (2.0 * eps * kPackingSlack);
    for (std::size_t i = 0; i < c.size(); ++i) {
        bool ok = true;
        for (std::size_t a : acc)
            if (dist2(c.point(i), c.point(a), c.dim) < min_d2) {
                ok = false;
                break;
            }
        if (ok) acc.push_back(i);
    }
    return acc.size();
}

PointCloud segment_cloud(std::size_t n, double spacing) {
    PointCloud c;
    c.dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) * spacing;
        c.push(&x, 1.0 / static_cast<double>(n));
    }
    return c;
}

PointCloud random_cloud(int dim, std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointCloud c;
    c.dim = dim;
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = u(rng);
        c.push(x.data(), 1.0 / static_cast<double>(n));
    }
    return c;
}

// middle-thirds Cantor dust at a fixed depth, d = 1
PointCloud cantor_cloud(int depth) {
    std::vector<double> pts{0.0};
    double scale = 1.0;
    for (int k = 0; k < depth; ++k) {
        scale /= 3.0;
        std::vector<double> next;
        for (double p : pts) {
            next.push_back(p);
            next.push_back(p + 2.0 * scale);
        }
        pts = std::move(next);
    }
    PointCloud c;
    c.dim = 1;
    for (double p : pts) c.push(&p, 1.0 / static_cast<double>(pts.size()));
    return c;
}

}  // namespace

TEST_CASE("greedy packing basics") {
    Rng rng = seed_stream(11, 0);
    PointCloud tri;
    tri.dim = 2;
    double a[2] = {0.0, 0.0}, b[2] = {1.0, 0.0}, c2[2] = {0.5, std::sqrt(3.0) / 2.0};
    tri.push(a, 1.0);
    tri.push(b, 1.0);
    tri.push(c2, 1.0);
    auto run = greedy_packing(tri, 0.1, power1, rng);
    CHECK(run.count == 3);
    CHECK(run.sum == Catch::Approx(3 * 0.1));

    PointCloud dup;
    dup.dim = 1;
    double z = 0.3;
    dup.push(&z, 0.5);
    dup.push(&z, 0.5);
    auto run2 = greedy_packing(dup, 0.1, power1, rng);
    CHECK(run2.count == 1);

    CHECK_THROWS_AS(greedy_packing(tri, -1.0, power1, rng), std::domain_error);
}

TEST_CASE("greedy packing on a segment matches the sweep oracle") {
    auto c = segment_cloud(100, 0.01);
    const std::size_t oracle = brute_greedy_count(c, 0.015);
    CHECK(oracle == 34);  // ceil(100/3): gap of 3 x 0.01 reaches distance 2 eps
    Rng rng = seed_stream(5, 0);
    auto run = greedy_packing(c, 0.015, power1, rng);
    CHECK(run.count == oracle);
}

TEST_CASE("greedy packing grid path matches brute force") {
    Rng rng = seed_stream(17, 0);
    for (int dim : {2, 3}) {
        auto cloud = random_cloud(dim, 3000, rng);  // above the brute-force cutoff
        for (double eps : {0.02, 0.05}) {
            Rng r1 = seed_stream(99, 1);
            auto run = greedy_packing(cloud, eps, power1, r1, 1);  // input order only
            CHECK(run.count == brute_greedy_count(cloud, eps));
            for (std::size_t i = 0; i < run.centers.size(); ++i)
                for (std::size_t j = i + 1; j < run.centers.size(); ++j)
                    REQUIRE(std::sqrt(dist2(cloud.point(run.centers[i]),
                                            cloud.point(run.centers[j]), dim)) >=
                            2.0 * eps * kPackingSlack * kPackingSlack);
        }
    }
}

TEST_CASE("box count") {
    PointCloud single;
    single.dim = 3;
    double o[3] = {0.2, 0.4, 0.8};
    single.push(o, 1.0);
    for (double eps : {1e-3, 1e-2, 0.1, 1.0, 10.0}) CHECK(box_count(single, eps) == 1);

    // 2^k x 2^k grid in [0,1]^2 at the matched level: every point its own cube
    const int k = 3;
    PointCloud grid;
    grid.dim = 2;
    for (int i = 0; i < (1 << k); ++i)
        for (int j = 0; j < (1 << k); ++j) {
            double x[2] = {i / static_cast<double>(1 << k), j / static_cast<double>(1 << k)};
            grid.push(x, 1.0);
        }
    const int p = dyadic_p(2);
    const double eps = std::ldexp(1.0, -k - p - 1) * std::sqrt(2.0) * (1.0 + std::ldexp(1.0, -p));
    CHECK(box_count(grid, eps) == (1u << (2 * k)));

    // monotone along dyadic ladders
    Rng rng = seed_stream(3, 0);
    auto cloud = random_cloud(3, 5000, rng);
    std::size_t prev = box_count(cloud, 1.0 / 4096.0);
    for (double e = 1.0 / 2048.0; e < 0.6; e *= 2.0) {
        const std::size_t cnt = box_count(cloud, e);
        REQUIRE(cnt <= prev);
        prev = cnt;
    }
}

TEST_CASE("dim regress") {
    std::vector<std::pair<double, double>> rows;
    for (int i = 0; i < 8; ++i) {
        const double eps = 0.01 * std::pow(2.0, i);
        rows.push_back({eps, 1.0 / (eps * eps)});
    }
    auto fit = dim_regress(rows, 0.005, 2.0, RegressKind::box_count);
    CHECK(fit.slope == Catch::Approx(2.0).margin(1e-12));
    CHECK(fit.half_width == Catch::Approx(0.0).margin(1e-10));

    for (auto& r : rows) r.second = 7.0;
    auto flat = dim_regress(rows, 0.005, 2.0, RegressKind::box_count);
    CHECK(flat.slope == Catch::Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(dim_regress(rows, 2.0, 2.0, RegressKind::box_count), std::invalid_argument);
    CHECK_THROWS_AS(
        dim_regress({rows.begin(), rows.begin() + 4}, 0.005, 2.0, RegressKind::box_count),
        std::invalid_argument);

    // Monte Carlo: uniform cube in R^3. The window sits above the saturation
    // scale (cells ~ eps/1.95 per side must stay fewer than the points).
    Rng rng = seed_stream(2024, 0);
    auto cloud = random_cloud(3, 100000, rng);
    std::vector<std::pair<double, double>> mc;
    for (double eps = 0.05; eps <= 0.4; eps *= std::pow(2.0, 0.25))
        mc.push_back({eps, static_cast<double>(box_count(cloud, eps))});
    auto mcfit = dim_regress(mc, 0.049, 0.41, RegressKind::box_count);
    CHECK(mcfit.slope > 2.8);
    CHECK(mcfit.slope < 3.2);
}

TEST_CASE("dyadic cubes") {
    // d=1, r=0.1: p=2, n = floor(log2(1.25 * 1 / 0.1)) = floor(log2 12.5) = 3
    CHECK(dyadic_p(1) == 2);
    CHECK(dyadic_level(0.1, 1) == 3);
    CHECK(dyadic_p(2) == 2);
    CHECK(dyadic_p(5) == 3);

    double origin[3] = {0.0, 0.0, 0.0};
    auto cube = dyadic_locate(origin, 3, 0.05);
    for (double y : cube.center) CHECK(y == 0.0);

    // Prop(3): x in inner cube, outer cube inside B(x, r)
    Rng rng = seed_stream(7, 0);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    for (int d : {1, 3, 5}) {
        std::uniform_real_distribution<double> ur(1e-6, 1.0 / (2.0 * d) * 0.999);
        for (int it = 0; it < 2000; ++it) {
            std::vector<double> x(d);
            for (auto& v : x) v = ux(rng);
            const double r = ur(rng);
            auto cb = dyadic_locate(x.data(), d, r);
            double half_inner = 0.5 * cb.inner_side();
            double corner2 = 0.0;
            for (int j = 0; j < d; ++j) {
                REQUIRE(std::abs(x[j] - cb.center[j]) <= half_inner * (1.0 + 1e-12));
                const double far = std::abs(x[j] - cb.center[j]) + 0.5 * cb.outer_side();
                corner2 += far * far;
            }
            REQUIRE(std::sqrt(corner2) < r);  // outer cube inside B(x, r)
        }
    }
}

TEST_CASE("dyadic propositions, exact lattice arithmetic") {
    for (int d : {3, 5, 8}) {
        const int p = dyadic_p(d);
        // 2^p > 2 sqrt(d)  <=>  4^p > 4 d (integers)
        REQUIRE((1LL << (2 * p)) > 4LL * d);
        // Prop(2) inclusion of the sqrt(d)-ball in the outer cube:
        // sqrt(d) 2^{-n-p} <= 2^{-n-1}  <=>  4 d <= 4^p
        REQUIRE(4LL * d <= (1LL << (2 * p)));
        // Prop(1): distinct centers differ by >= one lattice step = inner side,
        // so the half-open inner cubes cannot intersect (exact by construction)
    }
}

TEST_CASE("local density") {
    // single atom at x
    PointCloud atom;
    atom.dim = 2;
    double x[2] = {0.25, -1.0};
    atom.push(x, 0.7);
    auto prof = local_density(atom, power1, x, {0.01, 0.1, 0.5});
    for (std::size_t i = 0; i < prof.r.size(); ++i)
        CHECK(prof.ratio[i] == Catch::Approx(0.7 / prof.r[i]));
    CHECK(prof.min_ratio == Catch::Approx(0.7 / 0.5));

    // uniform cloud on a segment through x: ball mass ~ 2 r * density
    auto seg = segment_cloud(20001, 1.0 / 20000.0);
    double mid[1] = {0.5};
    auto sp = local_density(seg, power1, mid, {0.05, 0.1, 0.2});
    for (std::size_t i = 0; i < sp.r.size(); ++i)
        CHECK(sp.ratio[i] == Catch::Approx(2.0 * (20001.0 / 20000.0)).margin(0.01));
    for (double v : sp.ratio) REQUIRE(sp.min_ratio <= v);

    CHECK_THROWS_AS(local_density(atom, power1, x, {}), std::invalid_argument);
}

TEST_CASE("packing ladder pre-measure column is monotone") {
    Rng rng = seed_stream(21, 0);
    auto cloud = random_cloud(2, 4000, rng);
    std::vector<double> ladder;
    for (double e = 0.002; e < 0.3; e *= 1.7) ladder.push_back(e);
    auto rep = packing_ladder(cloud, power1, "power1", ladder, rng);
    REQUIRE(rep.rows.size() == ladder.size());
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        REQUIRE(rep.rows[i].eps < rep.rows[i - 1].eps);
        REQUIRE(rep.rows[i].premeasure_lb <= rep.rows[i - 1].premeasure_lb);
    }
}

TEST_CASE("product cloud slope subadditivity (sanity)") {
    auto a = segment_cloud(4000, 1.0 / 4000.0);
    PointCloud prod;
    prod.dim = 2;
    const int m = 160;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double x[2] = {i / static_cast<double>(m), j / static_cast<double>(m)};
            prod.push(x, 1.0 / (m * m));
        }
    auto rows_for = [&](const PointCloud& c) {
        std::vector<std::pair<double, double>> rows;
        for (double eps = 0.012; eps <= 0.2; eps *= std::pow(2.0, 0.5))
            rows.push_back({eps, static_cast<double>(box_count(c, eps))});
        return rows;
    };
    auto fa = dim_regress(rows_for(a), 0.01, 0.21, RegressKind::box_count);
    auto fp = dim_regress(rows_for(prod), 0.01, 0.21, RegressKind::box_count);
    REQUIRE(fp.slope <= 2.0 * fa.slope + 2.0 * fa.half_width + fp.half_width + 0.05);
}

TEST_CASE("comparison check") {
    Rng rng = seed_stream(41, 0);
    const double s = std::log(2.0) / std::log(3.0);
    auto dust = cantor_cloud(9);  // 512 points, dimension log2/log3
    auto cantor_gauge = [&](double r) { return std::pow(r, s); };
    std::vector<double> rg;
    for (double r = 1e-3; r <= 0.3; r *= 1.5) rg.push_back(r);
    std::vector<std::vector<double>> samples;
    for (std::size_t i = 0; i < dust.size(); i += 16) samples.push_back({dust.point(i)[0]});

    // kappa far below the natural density: everything classifies above and
    // verdict (i) must hold
    auto low = comparison_check(dust, samples, cantor_gauge, 1e-4, 0.01, rg, rng);
    CHECK(low.n_below == 0);
    CHECK(low.n_above == samples.size());
    CHECK(low.lower_consistent);

    // huge kappa proxy for infinity: class (ii) holds every point
    auto high = comparison_check(dust, samples, cantor_gauge, 1e12, 0.01, rg, rng);
    CHECK(high.n_above == 0);
    CHECK(high.n_below == samples.size());
    CHECK(high.upper_consistent);

    for (double kappa : {0.01, 0.1, 1.0, 10.0}) {
        auto rep = comparison_check(dust, samples, cantor_gauge, kappa, 0.01, rg, rng);
        CHECK(rep.lower_consistent);
        CHECK(rep.upper_consistent);
    }
}
