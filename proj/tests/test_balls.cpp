#include "cubeskel/balls.hpp"
#include "cubeskel/errors.hpp"
#include "cubeskel/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace cubeskel;

namespace {

Ball ball(std::initializer_list<double> c, double r) { return Ball{make_vec(c), r}; }

Vec unit_vector(int n, CounterRng& rng)
{
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v / v.norm();
}

} // namespace

TEST(MergePair, Examples)
{
    const auto big = ball({0.0, 0.0}, 3.0);
    const auto m = merge_pair(big, ball({1.0, 0.0}, 1.0));
    EXPECT_EQ(m.center, big.center);
    EXPECT_EQ(m.radius, 3.0);

    const auto t = merge_pair(ball({0.0, 0.0}, 1.0), ball({2.0, 0.0}, 1.0));
    EXPECT_NEAR(t.center[0], 1.0, 1e-15);
    EXPECT_NEAR(t.center[1], 0.0, 1e-15);
    EXPECT_NEAR(t.radius, 2.0, 1e-15);

    const auto o = merge_pair(ball({0.0, 0.0}, 1.0), ball({1.0, 0.0}, 2.0));
    EXPECT_NEAR(o.radius, 2.0, 1e-15);
}

TEST(MergePair, ContainsBothAndRadiusBound)
{
    CounterRng rng(21);
    for (int k = 0; k < 500; ++k) {
        const int n = static_cast<int>(rng.integer(1, 4));
        Ball b0{Vec(n), rng.uniform(0.1, 2.0)}, b1{Vec(n), rng.uniform(0.1, 2.0)};
        for (int i = 0; i < n; ++i) b0.center[i] = rng.uniform(-3.0, 3.0);
        b1.center = b0.center + rng.uniform(0.0, b0.radius + b1.radius) * unit_vector(n, rng);
        const auto m = merge_pair(b0, b1);
        EXPECT_LE(m.radius, (b0.radius + b1.radius) * (1 + 1e-12));
        EXPECT_GE(m.radius, std::max(b0.radius, b1.radius));
        EXPECT_TRUE(m.contains(b0, 1e-12));
        EXPECT_TRUE(m.contains(b1, 1e-12));
        // boundary samples of both inputs
        for (int s = 0; s < 20; ++s)
            for (const auto* b : {&b0, &b1}) {
                const Vec x = b->center + b->radius * unit_vector(n, rng);
                EXPECT_LE((x - m.center).norm(), m.radius * (1 + 1e-12));
            }
        const auto r = merge_pair(b1, b0);
        EXPECT_NEAR(r.radius, m.radius, 1e-12 * m.radius);
        EXPECT_LE((r.center - m.center).norm(), 1e-12 * m.radius);
        EXPECT_EQ(merge_pair(m, m).radius, m.radius);
    }
}

TEST(MergePair, Errors)
{
    EXPECT_THROW(merge_pair(ball({0.0, 0.0}, 1.0), ball({3.0, 0.0}, 1.0)), PreconditionError);
    EXPECT_THROW(merge_pair(ball({0.0, 0.0}, 1.0), ball({0.0, 0.0, 0.0}, 1.0)), DimensionError);
    EXPECT_THROW(merge_pair(ball({0.0, 0.0}, 0.0), ball({0.0, 0.0}, 1.0)), ParameterError);
}

TEST(Grow, SingleBallGrowsExponentially)
{
    const auto traj = grow({ball({1.0, 2.0, 3.0}, 0.5)});
    EXPECT_EQ(traj.event_count(), 0u);
    for (double t : {0.0, 0.3, 2.0}) {
        const auto s = traj.state_at(t);
        ASSERT_EQ(s.balls.size(), 1u);
        EXPECT_NEAR(s.balls[0].radius, 0.5 * std::exp(t), 1e-14);
        EXPECT_EQ(s.balls[0].center, make_vec({1.0, 2.0, 3.0}));
    }
    EXPECT_THROW(traj.state_at(-1.0), ParameterError);
}

TEST(Grow, TwoBallsTouchAtLn2)
{
    const auto traj = grow({ball({0.0, 0.0}, 1.0), ball({4.0, 0.0}, 1.0)});
    ASSERT_EQ(traj.event_count(), 1u);
    EXPECT_NEAR(traj.first_merge_time(), std::log(2.0), 1e-12);
    const auto after = traj.state_at(std::log(2.0) + 0.5);
    ASSERT_EQ(after.balls.size(), 1u);
    EXPECT_NEAR(after.balls[0].radius, 4.0 * std::exp(0.5), 1e-12);
    EXPECT_NEAR(after.balls[0].center[0], 2.0, 1e-12);
    // touching balls merge with the radius sum preserved
    EXPECT_TRUE(check_invariants(traj, after).radius_sum_equal);
}

TEST(Grow, OverlappingInputMergesAtZero)
{
    const auto traj = grow({ball({0.0}, 1.0), ball({1.0}, 1.0)});
    ASSERT_GE(traj.event_count(), 1u);
    EXPECT_EQ(traj.first_merge_time(), 0.0);
    EXPECT_EQ(traj.state_at(0.0).balls.size(), 1u);
}

TEST(Grow, RandomFamiliesKeepInvariants)
{
    CounterRng rng(22);
    for (int fam = 0; fam < 60; ++fam) {
        const int n = static_cast<int>(rng.integer(1, 4));
        std::vector<Ball> init;
        for (int k = 0; k < 15 && init.size() < 12; ++k) {
            Ball b{Vec(n), rng.uniform(0.05, 0.8)};
            for (int i = 0; i < n; ++i) b.center[i] = rng.uniform(0.0, 8.0);
            if (std::none_of(init.begin(), init.end(), [&](const Ball& o) { return o.intersects(b); }))
                init.push_back(b);
        }
        const auto traj = grow(init);
        EXPECT_LE(traj.event_count() + 1, init.size());
        EXPECT_EQ(traj.segments().back().balls.size(), 1u);
        const double t_end = 1.2 * (traj.event_count() ? traj.event_times().back() : 1.0);
        std::size_t prev = init.size();
        for (int k = 0; k <= 50; ++k) {
            const auto s = traj.state_at(t_end * k / 50);
            const auto r = check_invariants(traj, s);
            EXPECT_TRUE(r.ok());
            if (s.time < traj.first_merge_time()) EXPECT_TRUE(r.radius_sum_equal);
            EXPECT_LE(s.balls.size(), prev);
            prev = s.balls.size();
        }
    }
}

TEST(GridFunction, InterpolationAndIntegral)
{
    const auto g = GridFunction::sample(make_vec({0.0, 0.0}), 0.5, {5, 3},
                                        [](const Vec& x) { return 1.0 + x[0] + 2.0 * x[1]; });
    EXPECT_EQ(g.hi(), make_vec({2.0, 1.0}));
    EXPECT_NEAR(g(make_vec({0.3, 0.7})), 1.0 + 0.3 + 1.4, 1e-14);
    EXPECT_EQ(g(make_vec({3.0, 0.5})), 0.0);
    // integral of 1 + x + 2y over [0,2]x[0,1]
    EXPECT_NEAR(g.integral(), 2.0 + 2.0 + 2.0, 1e-13);
    EXPECT_THROW(GridFunction(make_vec({0.0}), 1.0, {1}, {1.0}), ParameterError);
    EXPECT_THROW(GridFunction(make_vec({0.0}), 1.0, {3}, {1.0}), ShapeError);
}

TEST(Coarea, SingleBallClosedForm)
{
    const double rho0 = 0.3, T = 0.7;
    const auto traj = grow({ball({0.0, 0.0}, rho0)}, T);
    const auto one = GridFunction::sample(make_vec({-1.0, -1.0}), 0.25, {9, 9}, [](const Vec&) { return 1.0; });
    const auto r = coarea_account(traj, one, T);
    EXPECT_NEAR(r.lhs, kPi * rho0 * rho0 * std::expm1(2.0 * T), 1e-9 + r.lhs_error);
    EXPECT_NEAR(r.rhs, 4.0, 1e-12);
    EXPECT_TRUE(r.holds());

    const auto zero = GridFunction::sample(make_vec({-1.0, -1.0}), 0.25, {9, 9}, [](const Vec&) { return 0.0; });
    const auto z = coarea_account(traj, zero, T);
    EXPECT_EQ(z.lhs, 0.0);
    EXPECT_EQ(z.rhs, 0.0);
    EXPECT_TRUE(z.holds());
}

TEST(Coarea, HoldsForNonuniformDensity)
{
    const auto traj = grow({ball({0.0, 0.0, 0.0}, 0.2), ball({0.9, 0.1, 0.0}, 0.25)}, 1.0);
    const auto f = GridFunction::sample(Vec::Constant(3, -2.0), 0.25, {19, 19, 19},
                                        [](const Vec& x) { return std::exp(-x.squaredNorm()); });
    const auto r = coarea_account(traj, f, 1.0);
    EXPECT_TRUE(r.holds());
    EXPECT_GT(r.lhs, 0.0);
}

TEST(Coarea, Errors)
{
    const auto traj = grow({ball({0.0, 0.0}, 0.5)}, 2.0);
    const auto small = GridFunction::sample(make_vec({-1.0, -1.0}), 0.5, {5, 5}, [](const Vec&) { return 1.0; });
    EXPECT_THROW(coarea_account(traj, small, 2.0), PreconditionError);
    const auto neg = GridFunction::sample(make_vec({-5.0, -5.0}), 0.5, {21, 21}, [](const Vec&) { return -1.0; });
    EXPECT_THROW(coarea_account(traj, neg, 1.0), DomainError);
}

TEST(Trajectory, CsvAndSvg)
{
    const auto traj = grow({ball({0.0, 0.0}, 1.0), ball({4.0, 0.0}, 1.0)});
    const auto states = traj.sample({0.0, 1.0});
    std::ostringstream os;
    write_trajectory_csv(os, states);
    const auto text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,id,c0,c1,radius");
    EXPECT_NE(text.find("0,0,0,0,1\n"), std::string::npos);
    EXPECT_NE(trajectory_svg(states).find("<svg"), std::string::npos);
    EXPECT_THROW(trajectory_svg(grow({ball({0.0}, 1.0)}).sample({0.0})), DimensionError);
}
