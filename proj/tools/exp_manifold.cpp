#include "experiments.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/level_set.hpp"
#include "cubeskel/maps.hpp"
#include "cubeskel/quadrature.hpp"
#include "cubeskel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace cubeskel::tools {

using nlohmann::json;

namespace {

double fd_gradient_norm(const LevelSetManifold& mfd, const Vec& p, double h)
{
    Vec g(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        Vec a = p, b = p;
        a[i] += h;
        b[i] -= h;
        g[i] = (mfd.potential(a) - mfd.potential(b)) / (2.0 * h);
    }
    return g.norm();
}

Mat rotation3(const Vec& axis, double angle)
{
    const Eigen::Vector3d k(axis[0], axis[1], axis[2]);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, k.normalized()).toRotationMatrix();
    Mat out(3, 3);
    out = r;
    return out;
}

} // namespace

Summary run_manifold(const ExperimentConfig& config)
{
    Summary summary(config);
    const int n = config.get("n", 3);
    const int m = config.get("m", 2);
    const double lambda = config.get("lambda", 0.25);
    const auto count = config.get<std::size_t>("samples", 10000);
    const double fd_tol = config.get("fd_tol", 1e-5);
    if (m < 1) throw ParameterError("the slice check needs m >= 1");

    LevelSetManifold mfd(n, m, lambda);
    LambdaRetraction ret(n, m);
    CounterRng rng(config.seed, 300);
    const auto pts = mfd.sample(count, rng);

    double worst_level = 0.0, worst_grad = 0.0, worst_skeleton = 0.0;
    std::size_t off_skeleton = 0;
    Table table({"i", "level_error", "grad_formula", "grad_fd", "grad_rel"});
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const double lev = std::abs(mfd.potential(p) - lambda);
        const double gf = mfd.gradient_norm_formula(p);
        const double gd = fd_gradient_norm(mfd, p, 1e-6);
        const double rel = std::abs(gf - gd) / std::max(gf, 1e-300);
        worst_level = std::max(worst_level, lev);
        worst_grad = std::max(worst_grad, rel);
        const Vec r = ret.evaluate(p);
        worst_skeleton = std::max(worst_skeleton, std::abs(sup_norm(r.head(n)) - kPi) + r.tail(m).norm());
        if (!mfd.on_skeleton(r, kTargetTol)) ++off_skeleton;
        if (i < 1000) table.row({i, lev, gf, gd, rel});
    }
    table.write(config, "manifold_samples");

    // Slice N_0 x S^{m-1}: some angle at pi, |z|^2 = lambda. The retraction keeps the angles.
    CounterRng srng(config.seed, 301);
    double worst_slice = 0.0, worst_slice_level = 0.0;
    const std::size_t slice_count = std::max<std::size_t>(1, count / 10);
    for (std::size_t i = 0; i < slice_count; ++i) {
        Vec p(n + m);
        for (int j = 0; j < n; ++j) p[j] = srng.uniform(-kPi, kPi);
        p[srng.integer(0, n - 1)] = kPi;
        Vec z(m);
        for (int j = 0; j < m; ++j) z[j] = srng.normal();
        p.tail(m) = std::sqrt(lambda) * z / z.norm();
        worst_slice_level = std::max(worst_slice_level, std::abs(mfd.potential(p) - lambda));
        const Vec r = ret.evaluate(p);
        worst_slice = std::max(worst_slice, (r.head(n) - p.head(n)).cwiseAbs().maxCoeff() + r.tail(m).norm());
    }

    const bool ok = pts.size() == count && worst_level <= kLevelTol && worst_grad <= fd_tol && off_skeleton == 0 &&
                    worst_slice <= kTargetTol && worst_slice_level <= kLevelTol;
    summary.results() = {{"n", n},
                         {"m", m},
                         {"lambda", lambda},
                         {"samples", pts.size()},
                         {"max_level_error", worst_level},
                         {"max_gradient_relative_error", worst_grad},
                         {"max_skeleton_error", worst_skeleton},
                         {"off_skeleton", off_skeleton},
                         {"slice_samples", slice_count},
                         {"max_slice_displacement", worst_slice}};
    summary.assertion("AC8", ok);
    return summary;
}

Summary run_cylinder(const ExperimentConfig& config)
{
    Summary summary(config);
    const int m = config.get("m", 3);
    const double p = config.get("p", 2.0);
    const int pairs = config.get("pairs", 20);
    if (m != 3) throw UnsupportedError("the sphere-valued construction needs m = 3 (maps [0,1]^2 -> S^2)");
    QuadratureOptions q;
    q.base_depth = config.get("base_depth", 3);
    q.depth_cap = config.get("depth_cap", 8);
    const auto proj = std::make_shared<SphereProjection>();

    Table table({"pair", "delta", "constant", "lhs", "lhs_error", "rhs", "rhs_error"});
    json rows = json::array();
    bool all = true;
    for (int k = 0; k < pairs; ++k) {
        CounterRng rng(config.seed, 400 + static_cast<std::uint64_t>(k));
        Mat a(2, 2);
        for (Eigen::Index i = 0; i < 4; ++i) a.data()[i] = rng.uniform(-1.5, 1.5);
        Vec c(2);
        c << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5);
        auto bump = std::make_shared<BumpMap>(2);
        MapPtr u = std::make_shared<ComposedMap>(bump, std::make_shared<AffineMap>(a, c));
        const double delta = rng.uniform(0.05, 0.6);
        const double angle = delta * rng.uniform(0.3, 0.95);
        Vec axis(3);
        for (int i = 0; i < 3; ++i) axis[i] = rng.normal();
        MapPtr v = std::make_shared<ComposedMap>(std::make_shared<AffineMap>(rotation3(axis, angle), Vec::Zero(3)), u);

        CylinderGlue w(u, v, delta, proj);
        const double C = w.estimate_constant(p);
        const Vec lo2 = Vec::Zero(2), hi2 = Vec::Ones(2);
        const auto lhs = energy(w, make_box_boundary(Vec::Zero(3), Vec::Ones(3)), p, q);
        const auto eu = energy(*u, make_box(lo2, hi2), p, q);
        const auto ev = energy(*v, make_box(lo2, hi2), p, q);
        const auto bu = energy(*u, make_box_boundary(lo2, hi2), p, q);
        const auto bv = energy(*v, make_box_boundary(lo2, hi2), p, q);
        const double rhs = eu.value + ev.value + C * (bu.value + bv.value) + C * std::pow(delta, p);
        const double rhs_err = eu.error_bound + ev.error_bound + C * (bu.error_bound + bv.error_bound);
        const bool ok = lhs.value <= rhs + lhs.error_bound + rhs_err;
        all = all && ok;
        table.row({k, delta, C, lhs.value, lhs.error_bound, rhs, rhs_err});
        rows.push_back({{"pair", k}, {"delta", delta}, {"measured_delta", w.measured_delta()}, {"constant", C},
                        {"lhs", lhs.value}, {"rhs", rhs}, {"ratio", lhs.value / rhs}, {"ok", ok}});
    }
    table.write(config, "cylinder");
    summary.results() = {{"m", m}, {"p", p}, {"pairs", rows}};
    summary.assertion("AC9", all, {{"pairs", pairs}});
    return summary;
}

} // namespace cubeskel::tools
