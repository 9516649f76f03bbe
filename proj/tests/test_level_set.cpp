#include "cubeskel/errors.hpp"
#include "cubeskel/level_set.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cubeskel;

namespace {

Vec point(std::initializer_list<double> theta, std::initializer_list<double> z)
{
    Vec p(static_cast<Eigen::Index>(theta.size() + z.size()));
    Eigen::Index i = 0;
    for (double t : theta) p[i++] = t;
    for (double v : z) p[i++] = v;
    return p;
}

Vec fd_gradient(int n, const Vec& p, double h)
{
    Vec g(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        Vec a = p, b = p;
        a[i] += h;
        b[i] -= h;
        g[i] = (LevelSetManifold::potential(n, a) - LevelSetManifold::potential(n, b)) / (2 * h);
    }
    return g;
}

} // namespace

TEST(Potential, Examples)
{
    const double lambda = 0.3;
    const Vec p = point({kPi, kPi, kPi}, {std::sqrt(lambda), 0.0});
    EXPECT_NEAR(LevelSetManifold::potential(3, p), lambda, 1e-15);
    const double t1 = 2.0 * std::acos(std::sqrt(lambda));
    EXPECT_NEAR(LevelSetManifold::potential(3, point({t1, 0.0, 0.0}, {0.0, 0.0})), lambda, 1e-15);
}

TEST(Potential, AmbientChartAgrees)
{
    LevelSetManifold mfd(2, 1, 0.5);
    CounterRng rng(1);
    for (int k = 0; k < 1000; ++k) {
        const Vec p = point({rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)}, {rng.normal()});
        EXPECT_NEAR(mfd.potential_ambient(mfd.embed(p)), mfd.potential(p), 1e-14);
    }
}

TEST(LevelSetManifold, Parameters)
{
    EXPECT_THROW(LevelSetManifold(3, 2, 0.0), ParameterError);
    EXPECT_THROW(LevelSetManifold(3, 2, 1.0), ParameterError);
    EXPECT_THROW(LevelSetManifold(0, 2, 0.5), DimensionError);
}

TEST(LevelSetManifold, SamplesOnLevelWithPositiveGradient)
{
    for (auto [n, m] : {std::pair{3, 2}, std::pair{2, 1}, std::pair{2, 0}}) {
        LevelSetManifold mfd(n, m, 0.25);
        CounterRng rng(2);
        const auto pts = mfd.sample(2000, rng);
        ASSERT_EQ(pts.size(), 2000u);
        for (const auto& p : pts) {
            EXPECT_LE(std::abs(mfd.potential(p) - 0.25), kLevelTol);
            EXPECT_GT(mfd.gradient(p).norm(), 0.0);
        }
    }
}

TEST(LevelSetManifold, GradientFormulaMatchesFiniteDifferences)
{
    LevelSetManifold mfd(3, 2, 0.25);
    CounterRng rng(3);
    for (int k = 0; k < 2000; ++k) {
        Vec p(5);
        for (int i = 0; i < 3; ++i) p[i] = rng.uniform(-3.0, 3.0);
        for (int i = 3; i < 5; ++i) p[i] = rng.normal();
        const double fd = fd_gradient(3, p, 1e-6).norm();
        EXPECT_NEAR(mfd.gradient_norm_formula(p) / fd, 1.0, 1e-5);
        EXPECT_NEAR(mfd.gradient(p).norm() / fd, 1.0, 1e-5);
    }
}

TEST(LambdaRetraction, Examples)
{
    LambdaRetraction r(2, 1);
    const Vec a = r(point({kPi, 0.0}, {0.4}));
    EXPECT_EQ(a, point({kPi, 0.0}, {0.0}));
    const Vec b = r(point({kPi / 2, kPi}, {0.1}));
    EXPECT_DOUBLE_EQ(b[0], kPi / 2);
    EXPECT_DOUBLE_EQ(b[1], kPi);
    EXPECT_THROW(r(point({0.0, 0.0}, {0.5})), SingularityError);
}

TEST(LambdaRetraction, LandsOnSkeletonAndIsLipschitz)
{
    LevelSetManifold mfd(3, 2, 0.25);
    LambdaRetraction r(3, 2);
    CounterRng rng(4);
    const auto pts = mfd.sample(10000, rng);
    for (const auto& p : pts) EXPECT_TRUE(mfd.on_skeleton(r(p)));
    // empirical Lipschitz ratio over random pairs stays bounded (theta is bounded away from 0 on N_lambda)
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); k += 2) {
        const double d = (pts[k] - pts[k + 1]).norm();
        if (d < 1e-9) continue;
        worst = std::max(worst, (r(pts[k]) - r(pts[k + 1])).norm() / d);
    }
    EXPECT_TRUE(std::isfinite(worst));
    EXPECT_LT(worst, 50.0);
}

TEST(LevelDeformation, Endpoints)
{
    const Vec p = point({0.5, -1.0}, {0.3});
    EXPECT_EQ(level_deformation(2, 0.0, p), p);
    const Vec q = level_deformation(2, 1.0, p);
    EXPECT_NEAR(sup_norm(q.head(2)), kPi, 1e-15);
    EXPECT_EQ(q[2], 0.0);
    EXPECT_EQ(q, LambdaRetraction(2, 1)(p));
}
