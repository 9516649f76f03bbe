#include "oracles.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/hopf.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

using namespace cubeskel;

namespace {

std::vector<Eigen::Vector3d> circle(const Eigen::Vector3d& c, const Eigen::Vector3d& e1, const Eigen::Vector3d& e2,
                                    int k = 48)
{
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < k; ++i) {
        const double a = 2.0 * oracle::kPi * i / k;
        pts.push_back(c + std::cos(a) * e1 + std::sin(a) * e2);
    }
    return pts;
}

std::vector<Segment3> segments(const std::vector<Eigen::Vector3d>& pts)
{
    std::vector<Segment3> out;
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({pts[i], pts[(i + 1) % pts.size()]});
    return out;
}

} // namespace

TEST(LinkingNumber, MatchesGaussIntegral)
{
    const Eigen::Vector3d ex = Eigen::Vector3d::UnitX(), ey = Eigen::Vector3d::UnitY(), ez = Eigen::Vector3d::UnitZ();
    const auto a = circle(Eigen::Vector3d::Zero(), ex, ey);
    const auto linked = circle(ex, ex, ez);
    const auto apart = circle(3.0 * ex, ex, ez);

    const double l = linking_number(segments(a), segments(linked));
    EXPECT_NEAR(std::abs(l), 1.0, 1e-9);
    EXPECT_NEAR(l, oracle::gauss_linking(a, linked, 16), 1e-3);
    EXPECT_NEAR(linking_number(segments(linked), segments(a)), l, 1e-9);

    const auto rev = std::vector<Eigen::Vector3d>(linked.rbegin(), linked.rend());
    EXPECT_NEAR(linking_number(segments(a), segments(rev)), -l, 1e-9);

    EXPECT_NEAR(linking_number(segments(a), segments(apart)), 0.0, 1e-9);
    EXPECT_NEAR(oracle::gauss_linking(a, apart, 16), 0.0, 1e-3);
}

TEST(LinkingNumber, DoubleWindingLinksTwice)
{
    // (2,4) torus link components: the second curve winds twice around the first.
    const Eigen::Vector3d ex = Eigen::Vector3d::UnitX(), ey = Eigen::Vector3d::UnitY();
    const auto a = circle(Eigen::Vector3d::Zero(), ex, ey, 64);
    std::vector<Eigen::Vector3d> b;
    for (int i = 0; i < 256; ++i) {
        const double s = 2.0 * oracle::kPi * i / 256;
        const double r = 1.0 + 0.4 * std::cos(2.0 * s);
        b.emplace_back(r * std::cos(s), r * std::sin(s), 0.4 * std::sin(2.0 * s));
    }
    const double l = linking_number(segments(a), segments(b));
    EXPECT_NEAR(std::abs(l), 2.0, 1e-9);
    EXPECT_NEAR(l, oracle::gauss_linking(a, b, 4), 1e-2);
}

TEST(HopfInvariant, Controls)
{
    HopfOptions opts;
    opts.pairs = 2;
    ConstantMap c(4, make_vec({0.0, 0.0, 1.0}));
    for (const auto& r : hopf_invariant_pairs(c, Vec::Constant(4, -0.5), Vec::Constant(4, 0.5), opts))
        EXPECT_EQ(r.invariant, 0);

    HopfFibration h;
    const auto reps = hopf_invariant_pairs(h, Vec::Constant(4, -1.0), Vec::Constant(4, 1.0), opts);
    ASSERT_EQ(reps.size(), 2u);
    for (const auto& r : reps) {
        EXPECT_EQ(std::abs(r.invariant), 1);
        EXPECT_NEAR(r.raw, r.invariant, 0.1);
        EXPECT_GE(r.components_p, 1u);
    }
    EXPECT_EQ(reps[0].invariant, reps[1].invariant);
}

TEST(HopfInvariant, WhiteheadMapHasInvariantTwo)
{
    HopfOptions opts;
    opts.pairs = 2;
    WhiteheadBoundaryMap v(1);
    const auto reps = hopf_invariant_pairs(v, Vec::Constant(4, -0.5), Vec::Constant(4, 0.5), opts);
    ASSERT_EQ(reps.size(), 2u);
    for (const auto& r : reps) EXPECT_EQ(r.invariant, 2);
    EXPECT_NE(reps[0].p, reps[1].p);
}

// Two unit cells of the periodic extension glued along a face: the invariants add.
TEST(HopfInvariant, AdditiveOverGluedCells)
{
    PeriodicSingularExtension u(std::make_shared<WhiteheadBoundaryMap>(1));
    HopfOptions opts;
    opts.pairs = 1;
    const int single = hopf_invariant(u, Vec::Constant(4, -0.5), Vec::Constant(4, 0.5), 0, opts).invariant;
    const int shifted = hopf_invariant(u, make_vec({0.5, -0.5, -0.5, -0.5}), make_vec({1.5, 0.5, 0.5, 0.5}), 0, opts).invariant;
    opts.resolution = 24;
    const int glued = hopf_invariant(u, Vec::Constant(4, -0.5), make_vec({1.5, 0.5, 0.5, 0.5}), 0, opts).invariant;
    EXPECT_EQ(single, 2);
    EXPECT_EQ(shifted, 2);
    EXPECT_EQ(glued, single + shifted);
}

TEST(HopfInvariant, RejectsHigherDimensions)
{
    WhiteheadBoundaryMap v(2);
    EXPECT_THROW(hopf_invariant(v, Vec::Constant(8, -0.5), Vec::Constant(8, 0.5), 0), UnsupportedError);
}
