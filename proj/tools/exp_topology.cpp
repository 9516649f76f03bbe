#include "experiments.hpp"

#include "cubeskel/degree.hpp"
#include "cubeskel/errors.hpp"
#include "cubeskel/hopf.hpp"
#include "cubeskel/io.hpp"
#include "cubeskel/lattice.hpp"
#include "cubeskel/maps.hpp"
#include "cubeskel/quadrature.hpp"
#include "cubeskel/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <set>

namespace cubeskel::tools {

using nlohmann::json;

namespace {

std::vector<int> int_list(const ExperimentConfig& c, const std::string& key, std::vector<int> fallback)
{
    auto it = c.params.find(key);
    if (it == c.params.end() || it->is_null()) return fallback;
    if (it->is_number_integer()) return {it->get<int>()};
    return it->get<std::vector<int>>();
}

QuadratureOptions quadrature_options(const ExperimentConfig& c)
{
    QuadratureOptions q;
    q.base_depth = c.get("base_depth", q.base_depth);
    q.depth_cap = c.get("depth_cap", q.depth_cap);
    q.budget_cells = c.get<std::size_t>("budget_cells", q.budget_cells);
    return q;
}

void check_dimension(int n)
{
    if (n < 2 || n > 4) throw ParameterError("N must be in {2, 3, 4}");
}

/// Picks `count` shells spread evenly over the admissible list.
std::vector<double> spread(const std::vector<double>& ts, int count)
{
    if (ts.empty()) throw SearchError("no admissible shell");
    if (count <= 1 || ts.size() == 1) return {ts[ts.size() / 2]};
    std::vector<double> out;
    const auto k = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(count), ts.size()));
    for (std::size_t i = 0; i < k; ++i) out.push_back(ts[i * (ts.size() - 1) / (k - 1)]);
    return out;
}

std::string point_label(const Vec& v)
{
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
    return s;
}

} // namespace

Summary run_energy_scaling(const ExperimentConfig& config)
{
    Summary summary(config);
    const int n = config.get("N", 2);
    check_dimension(n);
    const double p = config.get("p", static_cast<double>(n - 1));
    const int lmin = config.get("lmin", 1);
    const int lmax = config.get("lmax", 5);
    const double rel_tol = config.get("rel_tol", 0.01);
    if (lmin != 1 || lmax < 1) throw ParameterError("the ladder must start at ell = 1");
    const auto opts = quadrature_options(config);

    SkeletonRetraction u(n);
    Table table({"ell", "value", "error", "samples", "value_over_ellN"});
    std::vector<EnergyEstimate> ladder;
    SvgSeries series{"E(Q_l) / l^N", {}, {}, false};
    // wall-clock times stay out of the summary so that it is reproducible byte for byte
    std::string timings = "ell,seconds\n";
    for (int ell = 1; ell <= lmax; ++ell) {
        const auto start = std::chrono::steady_clock::now();
        const auto e = energy(u, make_box(Vec::Zero(n), Vec::Constant(n, ell)), p, opts);
        timings += std::to_string(ell) + "," +
                   format_double(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()) + "\n";
        const double vol = std::pow(static_cast<double>(ell), n);
        table.row({ell, e.value, e.error_bound, e.sample_count, e.value / vol});
        series.x.push_back(ell);
        series.y.push_back(e.value / vol);
        ladder.push_back(e);
    }
    table.write(config, "energy_scaling");
    write_text_file(config.out / "timings.csv", timings);
    write_text_file(config.out / "energy_scaling.svg",
                    svg_plot("energy per unit cell", "ell", "E / ell^N", {series}));

    json rows = json::array();
    const auto& e1 = ladder.front();
    bool all = true;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        const double vol = std::pow(static_cast<double>(k + 1), n);
        const double expect = vol * e1.value;
        const double diff = std::abs(ladder[k].value - expect);
        const double bound = ladder[k].error_bound + vol * e1.error_bound;
        const double rel = expect > 0 ? diff / expect : 0.0;
        const bool ok = diff <= bound + 1e-12 * expect && rel <= rel_tol;
        all = all && ok;
        rows.push_back({{"ell", k + 1}, {"value", ladder[k].value}, {"expected", expect}, {"difference", diff},
                        {"error_bound", bound}, {"relative", rel}, {"ok", ok}});
    }
    summary.results() = {{"N", n}, {"p", p}, {"unit_cell_energy", e1.value}, {"ladder", rows}};
    summary.assertion("AC1", all, {{"N", n}, {"lmax", lmax}});
    return summary;
}

Summary run_degrees(const ExperimentConfig& config)
{
    Summary summary(config);
    const auto dims = int_list(config, "N", {2, 3});
    const auto ells = int_list(config, "ells", {1, 2});
    const int shells = config.get("shells", 3);
    const double max_residual = config.get("max_residual", 0.3);
    DegreeOptions opts;
    opts.base_depth = config.get("base_depth", opts.base_depth);
    opts.depth_cap = config.get("depth_cap", opts.depth_cap);

    Table table({"N", "ell", "t", "sigma", "raw", "degree", "residual"});
    json runs = json::array();
    bool all = true;
    for (int n : dims) {
        check_dimension(n);
        SkeletonRetraction u(n);
        CounterRng rng = CounterRng(config.seed, 100 + static_cast<std::uint64_t>(n));
        for (int ell : ells) {
            if (ell < 1) throw ParameterError("ell must be positive");
            const auto sigmas = BlockDecomposition(n, ell).centers();
            const Vec c = Vec::Constant(n, 2.5 * ell);
            for (double t : spread(admissible_shells(u, ell), shells)) {
                const auto weight = SphereWeight::random(n, rng);
                const auto rep = joint_degrees(u, make_shell(c, t), sigmas, weight, opts);
                bool ok = rep.entries.size() == sigmas.size();
                for (const auto& e : rep.entries) {
                    ok = ok && e.degree == 1 && e.residual < max_residual;
                    table.row({n, ell, t, point_label(e.sigma), e.raw, e.degree, e.residual});
                }
                all = all && ok;
                runs.push_back({{"N", n}, {"ell", ell}, {"t", t}, {"centers", sigmas.size()},
                                {"total_abs_degree", rep.total_abs_degree()}, {"max_residual", rep.residual()},
                                {"ok", ok}});
            }
        }
    }
    table.write(config, "degrees");
    summary.results() = {{"shells", runs}};
    summary.assertion("AC2", all, {{"runs", runs.size()}});
    return summary;
}

Summary run_hopf(const ExperimentConfig& config)
{
    Summary summary(config);
    const int n = config.get("n", 1);
    if (n != 1) throw UnsupportedError("only n = 1 (maps R^4 -> S^2) is supported");
    HopfOptions opts;
    opts.pairs = config.get("pairs", 3);
    opts.resolution = config.get("resolution", opts.resolution);
    opts.seed = config.seed;
    const bool controls = config.get("controls", true);

    auto w = std::make_shared<WhiteheadBoundaryMap>(n);
    const Vec lo = Vec::Constant(4, -0.5), hi = Vec::Constant(4, 0.5);
    Table table({"map", "pair", "invariant", "raw", "components_p", "components_q", "resolution"});
    auto run = [&](const std::string& name, const EvaluableMap& f, const Vec& a, const Vec& b) {
        const auto reps = hopf_invariant_pairs(f, a, b, opts);
        json arr = json::array();
        for (std::size_t k = 0; k < reps.size(); ++k) {
            const auto& r = reps[k];
            table.row({name, k, r.invariant, r.raw, r.components_p, r.components_q, r.resolution});
            arr.push_back(r.to_json());
        }
        return std::make_pair(reps, arr);
    };

    auto [wh, wh_json] = run("whitehead", *w, lo, hi);
    bool ok = !wh.empty();
    for (const auto& r : wh) ok = ok && r.invariant == 2;
    json results = {{"n", n}, {"invariant", wh.empty() ? 0 : wh.front().invariant}, {"whitehead", wh_json}};
    json detail = {{"whitehead", 2}};
    if (controls) {
        HopfFibration h;
        ConstantMap k(4, make_vec({0.0, 0.0, 1.0}));
        auto [hr, hj] = run("hopf_fibration", h, Vec::Constant(4, -1.0), Vec::Constant(4, 1.0));
        auto [kr, kj] = run("constant", k, lo, hi);
        for (const auto& r : hr) ok = ok && r.invariant == 1;
        for (const auto& r : kr) ok = ok && r.invariant == 0;
        results["hopf_fibration"] = hj;
        results["constant"] = kj;
        detail["hopf_fibration"] = 1;
        detail["constant"] = 0;
    }
    table.write(config, "hopf");
    summary.results() = results;
    summary.assertion("AC3", ok, detail);
    return summary;
}

Summary run_cone_estimate(const ExperimentConfig& config)
{
    Summary summary(config);
    const int n = config.get("N", 2);
    check_dimension(n);
    const auto ells = int_list(config, "ells", {1, 2, 3});
    DegreeOptions opts;
    opts.depth_cap = config.get("depth_cap", opts.depth_cap);
    SkeletonRetraction u(n);
    const SignVector gamma(static_cast<std::size_t>(n), 1);
    const auto cone = PolyhedralCone::orthant(gamma);
    const auto half = cone.halved();

    Table table({"ell", "cone", "lhs", "integral", "measure", "rhs", "ratio"});
    json rows = json::array();
    bool lhs_ok = true, finite = true;
    for (int ell : ells) {
        const auto sigmas = BlockDecomposition(n, ell).centers();
        const auto ts = admissible_shells(u, ell);
        if (ts.empty()) throw SearchError("no admissible shell");
        const auto shell = make_shell(Vec::Constant(n, 2.5 * ell), ts[ts.size() / 2]);
        const auto full = conical_estimate_check(u, shell, sigmas, cone, kInf, opts);
        const auto halved = conical_estimate_check(u, shell, sigmas, half, kInf, opts);
        table.row({ell, "orthant", full.lhs, full.integral, full.measure, full.rhs, full.ratio});
        table.row({ell, "halved", halved.lhs, halved.integral, halved.measure, halved.rhs, halved.ratio});
        const double expect = std::pow(static_cast<double>(ell), n - 1);
        lhs_ok = lhs_ok && std::abs(full.lhs - expect) <= 1e-9 * expect;
        finite = finite && std::isfinite(full.ratio) && std::isfinite(halved.ratio) && full.rhs > 0;
        rows.push_back({{"ell", ell}, {"orthant", full.to_json()}, {"halved", halved.to_json()}});
    }
    table.write(config, "cone_estimate");
    summary.results() = {{"N", n}, {"runs", rows}};
    summary.check("total_degree", lhs_ok, {{"expected", "ell^(N-1)"}});
    summary.check("ratio_finite", finite);
    return summary;
}

Summary run_rearrangement(const ExperimentConfig& config)
{
    Summary summary(config);
    const auto dims = int_list(config, "N", {2, 3});
    const int instances = config.get("instances", 500);
    const int max_points = config.get("max_points", 500);
    if (instances < 1 || max_points < 1) throw ParameterError("instances and max_points must be positive");

    Table table({"N", "instance", "points", "sum", "ratio"});
    json per_dim = json::array();
    bool all = true;
    for (int n : dims) {
        check_dimension(n);
        const int k_max = config.get("k_max", static_cast<int>(std::floor(std::pow(max_points, 1.0 / n) + 1e-9)));
        const double cube_worst = worst_full_cube_ratio(n, k_max);
        CounterRng rng(config.seed, 200 + static_cast<std::uint64_t>(n));
        double worst = 0.0;
        for (int inst = 0; inst < instances; ++inst) {
            const auto count = static_cast<std::size_t>(rng.integer(1, max_points));
            const auto side = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(count), 1.0 / n)));
            const std::int64_t box = rng.integer(side, 3 * side);
            std::set<std::vector<std::int64_t>> seen;
            std::vector<Vec> sigmas;
            while (sigmas.size() < count) {
                std::vector<std::int64_t> key(static_cast<std::size_t>(n));
                for (auto& k : key) k = rng.integer(0, box - 1);
                if (!seen.insert(key).second) continue;
                Vec s(n);
                for (int i = 0; i < n; ++i) s[i] = static_cast<double>(key[static_cast<std::size_t>(i)]);
                sigmas.push_back(s);
            }
            Vec y(n);
            bool placed = false;
            while (!placed) {
                for (int i = 0; i < n; ++i) y[i] = rng.uniform(-2.0, static_cast<double>(box) + 1.0);
                placed = std::all_of(sigmas.begin(), sigmas.end(), [&](const Vec& s) { return (y - s).norm() >= 0.5; });
            }
            const auto r = rearrangement_bound_check(sigmas, y);
            worst = std::max(worst, r.ratio);
            table.row({n, inst, count, r.sum, r.ratio});
        }
        const bool ok = worst <= 2.0 * cube_worst;
        all = all && ok;
        per_dim.push_back({{"N", n}, {"worst_ratio", worst}, {"full_cube_worst", cube_worst}, {"k_max", k_max},
                           {"ok", ok}});
    }
    table.write(config, "rearrangement");
    summary.results() = {{"dimensions", per_dim}};
    summary.assertion("AC5", all, {{"instances", instances}});
    return summary;
}

} // namespace cubeskel::tools
