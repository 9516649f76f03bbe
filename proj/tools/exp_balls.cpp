#include "experiments.hpp"

#include "cubeskel/balls.hpp"
#include "cubeskel/degree.hpp"
#include "cubeskel/errors.hpp"
#include "cubeskel/io.hpp"
#include "cubeskel/maps.hpp"
#include "cubeskel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cubeskel::tools {

using nlohmann::json;

namespace {

Vec random_direction(int n, CounterRng& rng)
{
    Vec v(n);
    do {
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
    } while (v.norm() < 1e-8);
    return v / v.norm();
}

/// Pairwise disjoint balls with centers in [0, box]^N.
std::vector<Ball> random_family(int n, int count, double box, double rmin, double rmax, CounterRng& rng)
{
    std::vector<Ball> balls;
    int attempts = 0;
    while (static_cast<int>(balls.size()) < count && attempts++ < 100 * count) {
        Ball b;
        b.center = Vec(n);
        for (int i = 0; i < n; ++i) b.center[i] = rng.uniform(0.0, box);
        b.radius = rng.uniform(rmin, rmax);
        if (std::none_of(balls.begin(), balls.end(), [&](const Ball& o) { return o.intersects(b); }))
            balls.push_back(b);
    }
    return balls;
}

/// Grid of spacing h covering every ball of the family with one unit of margin; the node
/// lattice is offset by h/2 from the integers.
template <class F>
GridFunction grid_around(const BallFamily& family, double h, F&& fn)
{
    const int n = family.dimension();
    Vec lo = Vec::Constant(n, kInf), hi = Vec::Constant(n, -kInf);
    for (const auto& b : family.balls) {
        lo = lo.cwiseMin((b.center.array() - b.radius).matrix());
        hi = hi.cwiseMax((b.center.array() + b.radius).matrix());
    }
    std::vector<int> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        lo[i] = std::floor(lo[i]) - 1.0 + 0.5 * h;
        nodes[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil((hi[i] + 1.0 - lo[i]) / h)) + 1;
    }
    return GridFunction::sample(lo, h, nodes, fn);
}

/// Volume swept by the balls up to t_max: the co-area left side for f = 1.
double swept_volume(const BallTrajectory& traj, double t_max)
{
    const auto& segs = traj.segments();
    double total = 0.0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const double a = segs[k].time;
        const double b = std::min(k + 1 < segs.size() ? segs[k + 1].time : kInf, t_max);
        if (!(b > a)) continue;
        const int n = segs[k].dimension();
        const double omega = unit_sphere_area(n) / n;
        for (const auto& ball : segs[k].balls)
            total += omega * std::pow(ball.radius, n) * std::expm1(n * (b - a));
    }
    return total;
}

} // namespace

Summary run_balls(const ExperimentConfig& config)
{
    Summary summary(config);
    const int families = config.get("families", 200);
    const int max_balls = config.get("max_balls", 32);
    const int times = config.get("times", 100);
    const int pairs = config.get("pairs", 10000);
    const int coarea_families = config.get("coarea_families", 20);
    const int max_dim = config.get("max_dim", 4);
    CoareaOptions copts;
    copts.sphere_depth = config.get("sphere_depth", copts.sphere_depth);
    if (families < 1 || max_balls < 1 || times < 2 || max_dim < 1 || max_dim > 4)
        throw ParameterError("invalid balls parameters");

    // Prop (i)-(iii) on random families.
    Table table({"family", "N", "balls", "events", "first_merge", "final_balls", "ok"});
    std::size_t failures = 0, equality_failures = 0, monotone_failures = 0;
    std::vector<BallFamily> dump;
    for (int fam = 0; fam < families; ++fam) {
        CounterRng rng(config.seed, 1000 + static_cast<std::uint64_t>(fam));
        const int n = static_cast<int>(rng.integer(1, max_dim));
        const int count = static_cast<int>(rng.integer(1, max_balls));
        const auto init = random_family(n, count, 10.0, 0.05, 1.0, rng);
        const auto traj = grow(init);
        const double t_end = traj.event_count() ? 1.2 * traj.event_times().back() + 0.1 : 1.0;
        std::vector<double> ts;
        for (int k = 0; k < times; ++k) ts.push_back(t_end * k / (times - 1));
        const auto states = traj.sample(ts);
        bool ok = traj.event_count() + 1 <= std::max<std::size_t>(init.size(), 1);
        std::size_t prev = init.size();
        for (const auto& s : states) {
            const auto r = check_invariants(traj, s);
            if (!r.ok()) ++failures, ok = false;
            if (s.time < traj.first_merge_time() && !r.radius_sum_equal) ++equality_failures, ok = false;
            if (s.balls.size() > prev) ++monotone_failures, ok = false;
            prev = s.balls.size();
        }
        if (dump.empty() || (dump.front().dimension() != 2 && n == 2)) dump = states;
        table.row({fam, n, init.size(), traj.event_count(), traj.event_count() ? traj.first_merge_time() : -1.0,
                   states.back().balls.size(), ok});
    }
    table.write(config, "ball_families");
    {
        std::ostringstream os;
        write_trajectory_csv(os, dump);
        write_text_file(config.out / "trajectory.csv", os.str());
        if (!dump.empty() && dump.front().dimension() == 2)
            write_text_file(config.out / "trajectory.svg", trajectory_svg(dump));
    }

    // Lemma: merged radius at most rho0 + rho1, result contains both.
    std::size_t pair_failures = 0;
    double worst_excess = 0.0;
    {
        CounterRng rng(config.seed, 7);
        for (int k = 0; k < pairs; ++k) {
            const int n = static_cast<int>(rng.integer(1, max_dim));
            Ball b0{Vec(n), rng.uniform(0.05, 2.0)}, b1{Vec(n), rng.uniform(0.05, 2.0)};
            for (int i = 0; i < n; ++i) b0.center[i] = rng.uniform(-5.0, 5.0);
            const double d = rng.uniform(0.0, b0.radius + b1.radius);
            b1.center = b0.center + d * random_direction(n, rng);
            if (!b0.intersects(b1)) continue;
            const Ball m = merge_pair(b0, b1);
            const double excess = m.radius - (b0.radius + b1.radius);
            worst_excess = std::max(worst_excess, excess / (b0.radius + b1.radius));
            if (excess > 1e-12 * (b0.radius + b1.radius) || !m.contains(b0, 1e-12) || !m.contains(b1, 1e-12))
                ++pair_failures;
        }
    }

    // Co-area accounting.
    Table coarea({"family", "N", "f", "t_max", "lhs", "lhs_error", "rhs", "closed_form"});
    std::size_t coarea_failures = 0;
    json coarea_rows = json::array();
    for (int fam = 0; fam < coarea_families; ++fam) {
        CounterRng rng(config.seed, 5000 + static_cast<std::uint64_t>(fam));
        const int n = fam % 2 == 0 ? 2 : 3;
        const auto init = random_family(n, static_cast<int>(rng.integer(1, 6)), 4.0, 0.05, 0.3, rng);
        const double t_max = 1.0;
        const auto traj = grow(init, t_max);
        const auto end = traj.state_at(t_max);

        const auto one = grid_around(end, 0.5, [](const Vec&) { return 1.0; });
        const auto r1 = coarea_account(traj, one, t_max, copts);
        const double closed = swept_volume(traj, t_max);
        const bool ok1 = r1.holds() && std::abs(r1.lhs - closed) <= r1.lhs_error + 1e-9 * closed;
        coarea.row({fam, n, "one", t_max, r1.lhs, r1.lhs_error, r1.rhs, closed});

        // |Du|^{N-1} for the skeleton retraction; nodes sit off the cell centers.
        SkeletonRetraction u(n);
        const double h = n == 2 ? 0.125 : 0.25;
        const auto du = grid_around(end, h, [&](const Vec& x) {
            return std::pow(finite_difference_jacobian(u, x, 1e-6).norm(), n - 1);
        });
        const auto r2 = coarea_account(traj, du, t_max, copts);
        const bool ok2 = r2.holds();
        coarea.row({fam, n, "skeleton", t_max, r2.lhs, r2.lhs_error, r2.rhs, nullptr});
        if (!ok1 || !ok2) ++coarea_failures;
        coarea_rows.push_back({{"family", fam}, {"N", n}, {"one", r1.to_json()}, {"closed_form", closed},
                               {"skeleton", r2.to_json()}, {"ok", ok1 && ok2}});
    }
    coarea.write(config, "coarea");

    summary.results() = {{"families", families},
                         {"sampled_times", times},
                         {"invariant_failures", failures},
                         {"equality_failures", equality_failures},
                         {"monotonicity_failures", monotone_failures},
                         {"pairs", pairs},
                         {"pair_failures", pair_failures},
                         {"worst_relative_radius_excess", worst_excess},
                         {"coarea", coarea_rows}};
    summary.assertion("AC4",
                      failures == 0 && equality_failures == 0 && monotone_failures == 0 && pair_failures == 0 &&
                          coarea_failures == 0,
                      {{"invariant_failures", failures},
                       {"pair_failures", pair_failures},
                       {"coarea_failures", coarea_failures}});
    return summary;
}

} // namespace cubeskel::tools
