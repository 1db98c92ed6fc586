#pragma once

// Experiment orchestration: JSON configs (strict: unknown fields rejected),
// validation with field-path errors and hypothesis warnings, reproducible
// replica seeding, atomic output files, and a run manifest with digests.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "snakelab/bounds.hpp"
#include "snakelab/csbp.hpp"
#include "snakelab/gauge.hpp"
#include "snakelab/mechanism.hpp"
#include "snakelab/packing.hpp"
#include "snakelab/palm.hpp"
#include "snakelab/point_cloud.hpp"
#include "snakelab/rng.hpp"
#include "snakelab/snake.hpp"
#include "snakelab/spine.hpp"
#include "snakelab/stats.hpp"
#include "snakelab/trees.hpp"

namespace snakelab {

inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

// ---- mechanism JSON ----
// {"alpha": a, "beta": b, "levy": {"kind": "none" | "stable" | "tabulated", ...}}

namespace detail {

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw std::invalid_argument(where + ": unknown field '" + it.key() + "'");
    }
}

}  // namespace detail

inline BranchingMechanism mechanism_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("mechanism: must be an object");
    detail::reject_unknown(j, {"alpha", "beta", "levy"}, "mechanism");
    BranchingMechanism m;
    m.alpha = j.value("alpha", 0.0);
    m.beta = j.value("beta", 0.0);
    if (j.contains("levy")) {
        const json& l = j.at("levy");
        const std::string kind = l.at("kind").get<std::string>();
        if (kind == "none") {
            detail::reject_unknown(l, {"kind"}, "mechanism.levy");
        } else if (kind == "stable") {
            detail::reject_unknown(l, {"kind", "c", "gamma"}, "mechanism.levy");
            m.levy = LevyKind::stable;
            m.stable_c = l.at("c").get<double>();
            m.stable_gamma = l.at("gamma").get<double>();
        } else if (kind == "tabulated") {
            detail::reject_unknown(l, {"kind", "atoms"}, "mechanism.levy");
            m.levy = LevyKind::tabulated;
            for (const json& a : l.at("atoms")) {
                detail::reject_unknown(a, {"r", "mass"}, "mechanism.levy.atoms[]");
                m.atoms.push_back({a.at("r").get<double>(), a.at("mass").get<double>()});
            }
        } else {
            throw std::invalid_argument("mechanism.levy.kind: unknown kind '" + kind + "'");
        }
    }
    m.validate();
    return m;
}

inline json mechanism_to_json(const BranchingMechanism& m) {
    json l;
    switch (m.levy) {
        case LevyKind::none: l = {{"kind", "none"}}; break;
        case LevyKind::stable:
            l = {{"kind", "stable"}, {"c", m.stable_c}, {"gamma", m.stable_gamma}};
            break;
        case LevyKind::tabulated: {
            json atoms = json::array();
            for (const auto& a : m.atoms) atoms.push_back({{"r", a.r}, {"mass", a.mass}});
            l = {{"kind", "tabulated"}, {"atoms", atoms}};
            break;
        }
    }
    return {{"alpha", m.alpha}, {"beta", m.beta}, {"levy", l}};
}

// ---- experiment configs ----

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "gauge-table", "exponents",    "packing-dims", "snake-sample",
        "palm-density", "keller",      "bounds-series", "exit-time"};
    return names;
}

struct ExperimentConfig {
    std::string experiment;
    BranchingMechanism mechanism;
    int d = 1;
    std::optional<std::uint64_t> seed;
    std::size_t replicas = 1;
    json params;  // experiment-specific knobs
    std::string out = "out";
    json raw;  // echoed into the manifest
};

inline bool experiment_is_stochastic(const std::string& name) {
    return name == "packing-dims" || name == "snake-sample" || name == "palm-density" ||
           name == "exit-time";
}

inline ExperimentConfig config_from_json(const json& j, const std::string& cli_experiment = "") {
    detail::reject_unknown(
        j, {"experiment", "mechanism", "d", "seed", "replicas", "params", "out"}, "config");
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.experiment = j.value("experiment", cli_experiment);
    if (!cli_experiment.empty() && j.contains("experiment") &&
        j.at("experiment").get<std::string>() != cli_experiment)
        throw std::invalid_argument("config.experiment: does not match the CLI subcommand");
    cfg.mechanism = mechanism_from_json(
        j.contains("mechanism") ? j.at("mechanism") : json{{"beta", 1.0}});
    cfg.d = j.value("d", 1);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.replicas = j.value("replicas", std::size_t{1});
    cfg.params = j.value("params", json::object());
    cfg.out = j.value("out", std::string("out"));
    return cfg;
}

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const ExperimentConfig& cfg) {
    ValidationReport rep;
    bool known = false;
    for (const auto& n : experiment_names()) known = known || n == cfg.experiment;
    if (!known) rep.errors.push_back("experiment: unknown name '" + cfg.experiment + "'");
    try {
        cfg.mechanism.validate();
    } catch (const std::exception& e) {
        rep.errors.push_back(std::string("mechanism: ") + e.what());
    }
    if (cfg.d < 1) rep.errors.push_back("d: must be >= 1");
    if (cfg.replicas < 1) rep.errors.push_back("replicas: must be >= 1");
    if (experiment_is_stochastic(cfg.experiment) && !cfg.seed)
        rep.errors.push_back("seed: required for stochastic experiment '" + cfg.experiment + "'");
    // theorem-hypothesis checks warn, never block: sub-threshold runs are
    // scientifically interesting
    if (known && (cfg.experiment == "packing-dims" || cfg.experiment == "palm-density")) {
        try {
            const auto exps = exponents(cfg.mechanism, {1.0, 1e12, 64});
            const double g = exps.gamma_lower;
            if (g > 1.0) {
                const double dim_threshold = 2.0 * g / (g - 1.0);
                if (cfg.d <= dim_threshold) {
                    std::ostringstream os;
                    os << "d: d <= 2 gamma/(gamma-1) = " << dim_threshold
                       << "; theorem hypotheses violated, run permitted";
                    rep.warnings.push_back(os.str());
                }
            } else {
                rep.warnings.push_back("mechanism: lower index <= 1, dimension thresholds void");
            }
        } catch (const std::exception&) {
            // mechanism errors already reported
        }
    }
    return rep;
}

// ---- output files, digests, manifest ----

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ull;
    return h;
}

struct RunManifest {
    json config_echo;
    double wall_ms = 0.0;
    std::vector<std::uint64_t> replica_seeds;
    std::vector<std::pair<std::string, std::uint64_t>> outputs;  // (path, digest)

    json to_json() const {
        json outs = json::array();
        for (const auto& [path, digest] : outputs) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
            outs.push_back({{"path", path}, {"fnv1a64", buf}});
        }
        return {{"schema_version", kSchemaVersion},
                {"config", config_echo},
                {"wall_ms", wall_ms},
                {"replica_seeds", replica_seeds},
                {"outputs", outs}};
    }
};

namespace detail {

// write-then-rename; no partial outputs on error
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        os << bytes;
        if (!os.good()) {
            os.close();
            fs::remove(tmp);
            throw std::runtime_error("atomic_write: write failed for " + path.string());
        }
    }
    fs::rename(tmp, path);
}

struct OutputCollector {
    std::filesystem::path dir;
    RunManifest* manifest;

    void emit(const std::string& name, const std::string& bytes) const {
        const auto path = dir / name;
        atomic_write(path, bytes);
        manifest->outputs.emplace_back(path.string(), fnv1a64(bytes));
    }
};

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::vector<double> log_ladder(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi > lo && count >= 2))
        throw std::invalid_argument("params: bad ladder (need 0 < min < max, count >= 2)");
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    return out;
}

}  // namespace detail

// ---- experiment drivers ----

namespace experiments {

inline void gauge_table(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params, {"r_min", "r_max", "count"}, "params");
    const auto ladder = detail::log_ladder(cfg.params.value("r_min", 1e-9),
                                           cfg.params.value("r_max", 1e-2),
                                           cfg.params.value("count", std::size_t{40}));
    auto g = make_gauge(cfg.mechanism, GaugeFunction::Kind::g);
    auto k = make_gauge(cfg.mechanism, GaugeFunction::Kind::k);
    std::ostringstream os;
    os << "r,g,k,doubling_g\n";
    os.precision(17);
    for (double r : ladder) {
        const double gv = r < g.r0 ? g(r) : std::numeric_limits<double>::quiet_NaN();
        const double kv = r < k.r0 ? k(r) : std::numeric_limits<double>::quiet_NaN();
        const double dbl = 2.0 * r < g.r0 ? doubling_ratio(g, r)
                                          : std::numeric_limits<double>::quiet_NaN();
        os << r << ',' << gv << ',' << kv << ',' << dbl << '\n';
    }
    out.emit("gauge_table.csv", os.str());
}

inline void exponent_report(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params, {"lambda_min", "lambda_max", "count", "force_fitted"},
                           "params");
    ExponentGrid grid;
    grid.lambda_min = cfg.params.value("lambda_min", 1.0);
    grid.lambda_max = cfg.params.value("lambda_max", 1e9);
    grid.count = cfg.params.value("count", 64);
    const auto rep = exponents(cfg.mechanism, grid, cfg.params.value("force_fitted", false));
    json j = {{"gamma_lower", rep.gamma_lower},
              {"eta_upper", rep.eta_upper},
              {"method", rep.method == ExponentMethod::analytic ? "analytic" : "fitted"},
              {"grid", {{"lambda_min", grid.lambda_min},
                        {"lambda_max", grid.lambda_max},
                        {"count", grid.count}}}};
    if (rep.delta)
        j["delta"] = *rep.delta;
    else
        j["delta"] = nullptr;
    out.emit("exponents.json", j.dump(2) + "\n");
}

inline void packing_dims(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params,
                           {"n_target", "eps_min", "eps_max", "eps_count", "window_lo",
                            "window_hi", "greedy", "greedy_restarts"},
                           "params");
    const std::size_t n_target = cfg.params.value("n_target", std::size_t{20000});
    const auto ladder = detail::log_ladder(cfg.params.value("eps_min", 0.05),
                                           cfg.params.value("eps_max", 0.4),
                                           cfg.params.value("eps_count", std::size_t{10}));
    const double wlo = cfg.params.value("window_lo", ladder.front() * 0.99);
    const double whi = cfg.params.value("window_hi", ladder.back() * 1.01);
    const bool greedy = cfg.params.value("greedy", false);
    const int restarts = cfg.params.value("greedy_restarts", 2);

    std::vector<std::vector<double>> counts(cfg.replicas);
    std::vector<std::vector<double>> sums(cfg.replicas);
    std::vector<double> slopes(cfg.replicas), halves(cfg.replicas);
    auto gauge = make_gauge(cfg.mechanism, GaugeFunction::Kind::g);
    parallel_replicas(cfg.replicas, *cfg.seed, [&](std::size_t i, Rng& rng) {
        auto exc = sample_height_excursion(cfg.mechanism, n_target, rng);
        std::vector<double> origin(cfg.d, 0.0);
        auto snake = sample_snake(exc, origin.data(), cfg.d, rng);
        auto cloud = occupation_and_range(snake).cloud;
        std::vector<std::pair<double, double>> rows;
        for (double eps : ladder) {
            const double cnt = static_cast<double>(box_count(cloud, eps));
            counts[i].push_back(cnt);
            rows.push_back({eps, cnt});
            if (greedy && eps < gauge.r0)
                sums[i].push_back(greedy_packing(cloud, eps, gauge, rng, restarts).sum);
            else
                sums[i].push_back(std::numeric_limits<double>::quiet_NaN());
        }
        const auto fit = dim_regress(rows, wlo, whi, RegressKind::box_count);
        slopes[i] = fit.slope;
        halves[i] = fit.half_width;
    });
    const double med = quantile(slopes, 0.5);
    json rows = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "eps,count,sum\n";
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        double mc = 0.0, ms = 0.0;
        std::size_t ns = 0;
        for (std::size_t i = 0; i < cfg.replicas; ++i) {
            mc += counts[i][k];
            if (!std::isnan(sums[i][k])) {
                ms += sums[i][k];
                ++ns;
            }
        }
        mc /= static_cast<double>(cfg.replicas);
        const double sumv = ns ? ms / static_cast<double>(ns)
                               : std::numeric_limits<double>::quiet_NaN();
        rows.push_back({{"eps", ladder[k]}, {"count", mc},
                        {"sum", std::isnan(sumv) ? json(nullptr) : json(sumv)}});
        csv << ladder[k] << ',' << mc << ',' << sumv << '\n';
    }
    json j = {{"rows", rows},
              {"slope", med},
              {"half_width", mean_se(halves).mean},
              {"window", {wlo, whi}},
              {"per_replica_slopes", slopes}};
    out.emit("packing_dims.json", j.dump(2) + "\n");
    out.emit("packing_rows.csv", csv.str());
}

inline void snake_sample(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params, {"n_target", "sigma_floor"}, "params");
    const std::size_t n_target = cfg.params.value("n_target", std::size_t{5000});
    const double sigma_floor = cfg.params.value("sigma_floor", 0.0);
    std::vector<std::string> clouds(cfg.replicas), excursions(cfg.replicas);
    std::vector<json> sidecars(cfg.replicas);
    parallel_replicas(cfg.replicas, *cfg.seed, [&](std::size_t i, Rng& rng) {
        auto exc = sample_height_excursion(cfg.mechanism, n_target, rng, sigma_floor);
        std::vector<double> origin(cfg.d, 0.0);
        auto snake = sample_snake(exc, origin.data(), cfg.d, rng);
        auto oc = occupation_and_range(snake);
        std::ostringstream os;
        write_cloud_csv(oc.cloud, os);
        clouds[i] = os.str();
        std::ostringstream es;
        write_excursion_csv(exc, es);
        excursions[i] = es.str();
        sidecars[i] = {{"sigma", exc.sigma},
                       {"progeny", exc.prov.progeny},
                       {"n_target", exc.prov.n_target},
                       {"offspring", exc.prov.offspring},
                       {"height_scale", exc.prov.height_scale},
                       {"kappa", exc.prov.kappa},
                       {"tries", exc.prov.tries},
                       {"grid_count", snake.grid_count}};
    });
    for (std::size_t i = 0; i < cfg.replicas; ++i) {
        out.emit("cloud_" + std::to_string(i) + ".csv", clouds[i]);
        out.emit("excursion_" + std::to_string(i) + ".csv", excursions[i]);
        out.emit("cloud_" + std::to_string(i) + ".json", sidecars[i].dump(2) + "\n");
    }
}

inline void palm_density(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params,
                           {"a", "grid_step", "eps_trunc", "r_min", "r_max", "r_count",
                            "sigma_cap", "nodes_per_unit_sigma"},
                           "params");
    const double a = cfg.params.value("a", 1.0);
    const double grid_step = cfg.params.value("grid_step", 1e-2);
    std::vector<double> eps_list;
    if (cfg.params.contains("eps_trunc") && cfg.params.at("eps_trunc").is_array())
        for (const auto& e : cfg.params.at("eps_trunc")) eps_list.push_back(e.get<double>());
    else
        eps_list.push_back(cfg.params.value("eps_trunc", 0.01));
    const auto r_grid = detail::log_ladder(cfg.params.value("r_min", 0.01),
                                           cfg.params.value("r_max", 2.0),
                                           cfg.params.value("r_count", std::size_t{30}));
    GraftOptions gopt;
    gopt.sigma_cap = cfg.params.value("sigma_cap", 64.0);
    gopt.nodes_per_unit_sigma = cfg.params.value("nodes_per_unit_sigma", 2000.0);
    auto gauge = make_gauge(cfg.mechanism, GaugeFunction::Kind::g);

    json summaries = json::array();
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        const double eps = eps_list[e];
        std::vector<std::vector<double>> mass(cfg.replicas);
        std::vector<std::size_t> count(cfg.replicas);
        std::vector<double> sig_tot(cfg.replicas);
        parallel_replicas(cfg.replicas, *cfg.seed + e, [&](std::size_t i, Rng& rng) {
            auto spine = sample_spine(cfg.mechanism, cfg.d, a, grid_step, rng);
            auto forest = graft(spine, cfg.mechanism, eps, rng, gopt);
            mass[i] = palm_mass_profile(forest, r_grid).mass;
            count[i] = forest.grafts.size();
            sig_tot[i] = forest.sigma_total();
        });
        std::ostringstream csv;
        csv.precision(17);
        csv << "r,mass,ratio\n";
        for (std::size_t k = 0; k < r_grid.size(); ++k) {
            double m = 0.0;
            for (std::size_t i = 0; i < cfg.replicas; ++i) m += mass[i][k];
            m /= static_cast<double>(cfg.replicas);
            const double ratio = r_grid[k] < gauge.r0
                                     ? m / gauge(r_grid[k])
                                     : std::numeric_limits<double>::quiet_NaN();
            csv << r_grid[k] << ',' << m << ',' << ratio << '\n';
        }
        out.emit("palm_density_" + std::to_string(e) + ".csv", csv.str());
        double mean_count = 0.0, mean_sig = 0.0;
        for (std::size_t i = 0; i < cfg.replicas; ++i) {
            mean_count += static_cast<double>(count[i]);
            mean_sig += sig_tot[i];
        }
        summaries.push_back({{"eps_trunc", eps},
                             {"count", mean_count / cfg.replicas},
                             {"sigma_total", mean_sig / cfg.replicas}});
    }
    out.emit("forest_summary.json", json{{"forests", summaries}}.dump(2) + "\n");
}

inline void keller(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params, {"d_list", "r_list", "c_lemma", "varrho"}, "params");
    std::vector<int> ds = cfg.params.value("d_list", std::vector<int>{3, 5});
    std::vector<double> rs = cfg.params.value("r_list", std::vector<double>{0.05, 0.1});
    const double c_lemma = cfg.params.value("c_lemma", 0.0);
    const double varrho = cfg.params.value("varrho", 1.0);
    json rows = json::array();
    for (int d : ds) {
        const auto lc = lemma_constants(cfg.mechanism, d, varrho, c_lemma);
        for (double r : rs) {
            const auto res = keller_check(cfg.mechanism, d, r);
            rows.push_back({{"d", d},
                            {"r", r},
                            {"v0", res.v0},
                            {"I_v0", res.I_v0},
                            {"lower", res.lower},
                            {"upper", res.upper},
                            {"holds", res.holds},
                            {"residual", res.residual},
                            {"constants",
                             {{"name", "C2"}, {"value", lc.C2}, {"recipe", lc.recipe}}}});
        }
    }
    out.emit("keller.json", json{{"rows", rows}}.dump(2) + "\n");
}

inline void bounds_series(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params,
                           {"n_max", "threshold", "tail_from", "c_radii", "c_lemma", "varrho",
                            "sn_u", "sn_n_max"},
                           "params");
    const std::size_t n_max = cfg.params.value("n_max", std::size_t{400});
    const double threshold = cfg.params.value("threshold", 5.0);
    const std::size_t tail_from = cfg.params.value("tail_from", std::size_t{50});
    const double varrho = cfg.params.value("varrho", 1.0);
    const auto lc = lemma_constants(cfg.mechanism, cfg.d, varrho,
                                    cfg.params.value("c_lemma", 0.0));
    const auto ladder =
        rho_ladder(cfg.mechanism, cfg.d, cfg.params.value("c_radii", 0.0), lc.C2, n_max);
    const auto series = subordinator_series(ladder, threshold, tail_from);
    json rows = json::array();
    for (std::size_t n = 0; n < series.rows.size(); ++n)
        rows.push_back({{"n", n + 1},
                        {"log_rho", ladder.rows[n].log_r},
                        {"lower", series.rows[n].lower},
                        {"upper", series.rows[n].upper}});
    json j = {{"constants",
               json::array({{{"name", "C2"}, {"value", lc.C2}, {"recipe", lc.recipe}},
                            {{"name", "c_radii"},
                             {"value", ladder.c_exponent},
                             {"recipe", "midpoint of (2/(d-2), gamma-1) unless overridden"}}})},
              {"lower_cross_index", series.lower_cross_index},
              {"lower_partial_sum", series.lower_partial_sum},
              {"upper_tail", series.upper_tail},
              {"tail_from", series.tail_from},
              {"skipped", series.skipped},
              {"rows", rows}};
    if (cfg.params.contains("sn_u")) {
        const auto sn = sn_sequence(cfg.mechanism, cfg.params.at("sn_u").get<double>(),
                                    cfg.params.value("sn_n_max", std::size_t{400}));
        json snrows = json::array();
        for (std::size_t n = 0; n < sn.rows.size(); ++n)
            snrows.push_back({{"n", n + 1},
                              {"lambda", sn.rows[n].lambda},
                              {"s", sn.rows[n].s},
                              {"bound", sn.rows[n].bound}});
        j["sn"] = {{"u", sn.u},          {"u_prime", sn.u_prime},
                   {"a", sn.a},          {"eps", sn.eps},
                   {"fitted_c", sn.fitted_c}, {"divergence_cross", sn.divergence_cross},
                   {"rows", snrows}};
    }
    out.emit("bounds_series.json", j.dump(2) + "\n");
}

inline void exit_time(const ExperimentConfig& cfg, const detail::OutputCollector& out) {
    detail::reject_unknown(cfg.params, {"r", "lambda", "paths", "step"}, "params");
    const double r = cfg.params.value("r", 1.0);
    const double lambda = cfg.params.value("lambda", 1.0);
    const std::size_t paths = cfg.params.value("paths", std::size_t{20000});
    const double step = cfg.params.value("step", 1e-4);
    const auto res = exit_time_laplace_mc(cfg.d, r, lambda, paths, step, *cfg.seed);
    json j = {{"d", cfg.d},
              {"r", r},
              {"lambda", lambda},
              {"paths", paths},
              {"step", step},
              {"exact_1d", res.exact_1d},
              {"upper_bound", res.upper_bound},
              {"mc_mean", res.mc_mean},
              {"mc_se", res.mc_se},
              {"mc_raw", res.mc_raw}};
    out.emit("exit_time.json", j.dump(2) + "\n");
}

}  // namespace experiments

inline RunManifest run(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = validate(cfg);
    if (!rep.ok()) {
        std::string msg = "config invalid:";
        for (const auto& e : rep.errors) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
    RunManifest manifest;
    manifest.config_echo = cfg.raw.is_null() ? json::object() : cfg.raw;
    manifest.config_echo["experiment"] = cfg.experiment;
    if (cfg.seed)
        for (std::size_t i = 0; i < cfg.replicas; ++i)
            manifest.replica_seeds.push_back(derived_seed(*cfg.seed, i));
    detail::OutputCollector out{std::filesystem::path(cfg.out), &manifest};
    std::filesystem::create_directories(cfg.out);

    if (cfg.experiment == "gauge-table")
        experiments::gauge_table(cfg, out);
    else if (cfg.experiment == "exponents")
        experiments::exponent_report(cfg, out);
    else if (cfg.experiment == "packing-dims")
        experiments::packing_dims(cfg, out);
    else if (cfg.experiment == "snake-sample")
        experiments::snake_sample(cfg, out);
    else if (cfg.experiment == "palm-density")
        experiments::palm_density(cfg, out);
    else if (cfg.experiment == "keller")
        experiments::keller(cfg, out);
    else if (cfg.experiment == "bounds-series")
        experiments::bounds_series(cfg, out);
    else if (cfg.experiment == "exit-time")
        experiments::exit_time(cfg, out);
    else
        throw std::invalid_argument("run: unknown experiment " + cfg.experiment);

    manifest.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    detail::atomic_write(std::filesystem::path(cfg.out) / "manifest.json",
                         manifest.to_json().dump(2) + "\n");
    return manifest;
}

}  // namespace snakelab
