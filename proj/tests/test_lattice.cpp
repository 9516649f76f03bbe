#include "cubeskel/errors.hpp"
#include "cubeskel/lattice.hpp"
#include "cubeskel/rng.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

using namespace cubeskel;

namespace {

std::size_t count_boundary_facets(const CubicalGrid& g)
{
    std::size_t k = 0;
    for (std::size_t id = 0; id < g.facet_count(); ++id) {
        const auto f = g.facet_at(id);
        const bool low = f.cell[static_cast<std::size_t>(f.axis)] == -1;
        const bool high = f.cell[static_cast<std::size_t>(f.axis)] == g.edge_count() - 1;
        k += (low || high) ? 1 : 0;
    }
    return k;
}

} // namespace

TEST(CubicalGrid, SingleSquareEdges)
{
    CubicalGrid g(2, 1);
    EXPECT_EQ(g.enumerate_faces(1).size(), 4u);
    const auto oriented = g.enumerate_oriented_faces();
    EXPECT_EQ(oriented.size(), 4u);
    for (const auto& f : oriented) EXPECT_TRUE(g.is_boundary(f));
}

TEST(CubicalGrid, TwoByTwoEdges)
{
    CubicalGrid g(2, 2);
    EXPECT_EQ(g.enumerate_faces(1).size(), 12u);
    EXPECT_EQ(g.facet_count(), 12u);
    EXPECT_EQ(count_boundary_facets(g), 8u);
    EXPECT_EQ(g.facet_count() - count_boundary_facets(g), 4u);
}

TEST(CubicalGrid, CubeHasSixFaces)
{
    CubicalGrid g(3, 1);
    EXPECT_EQ(g.enumerate_faces(2).size(), 6u);
}

TEST(CubicalGrid, FaceCountsMatchClosedForm)
{
    for (int n = 1; n <= 4; ++n)
        for (std::int64_t l = 1; l <= 3; ++l) {
            CubicalGrid g(n, l);
            for (int j = 0; j <= n; ++j) EXPECT_EQ(g.enumerate_faces(j).size(), CubicalGrid::face_count(n, l, j));
            EXPECT_EQ(g.cell_count(), CubicalGrid::face_count(n, l, n));
        }
    EXPECT_THROW(CubicalGrid(2, 2).enumerate_faces(3), DimensionError);
    EXPECT_THROW(CubicalGrid(2, 2).enumerate_faces(-1), DimensionError);
}

TEST(CubicalGrid, FacesAreDistinct)
{
    CubicalGrid g(3, 2);
    for (int j = 0; j <= 3; ++j) {
        std::set<std::pair<MultiIndex, std::uint32_t>> seen;
        for (const auto& f : g.enumerate_faces(j)) {
            EXPECT_EQ(f.dimension(), j);
            EXPECT_TRUE(seen.insert({f.vertex, f.free_axes}).second);
        }
    }
}

// Every interior face is owned by exactly two cells with opposite orientation, boundary faces by one.
TEST(CubicalGrid, FacePairingExhaustive)
{
    for (int n = 1; n <= 4; ++n)
        for (std::int64_t l = 1; l <= 4; ++l) {
            if (n == 4 && l > 3) continue;
            CubicalGrid g(n, l);
            std::map<std::size_t, std::vector<OrientedFace>> owners;
            for (const auto& f : g.enumerate_oriented_faces()) owners[g.facet_id(f)].push_back(f);
            ASSERT_EQ(owners.size(), g.facet_count());
            for (const auto& [id, fs] : owners) {
                const bool boundary = g.is_boundary(fs.front());
                ASSERT_EQ(fs.size(), boundary ? 1u : 2u);
                if (fs.size() == 2) {
                    EXPECT_NE(fs[0].cell, fs[1].cell);
                    EXPECT_EQ(fs[0].orientation_sign(), -fs[1].orientation_sign());
                    EXPECT_EQ(fs[0].flipped(), fs[1]);
                }
                EXPECT_EQ(g.facet_at(id), fs.front().canonical());
            }
        }
}

TEST(OrientedFace, FlipIsInvolutionAndKeepsId)
{
    CubicalGrid g(3, 3);
    for (const auto& f : g.enumerate_oriented_faces()) {
        EXPECT_EQ(f.flipped().flipped(), f);
        EXPECT_EQ(g.facet_id(f), g.facet_id(f.flipped()));
        EXPECT_EQ(f.canonical(), f.flipped().canonical());
        EXPECT_EQ(f.canonical().side, Side::Plus);
    }
}

TEST(CubicalGrid, DualCenters)
{
    CubicalGrid g(3, 2, {1, -1, 0});
    const auto cs = g.dual_centers();
    ASSERT_EQ(cs.size(), 8u);
    for (const auto& c : cs)
        for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(c[i] - std::floor(c[i]), 0.5);
    EXPECT_DOUBLE_EQ(cs.front()[0], 1.5);
    EXPECT_DOUBLE_EQ(cs.front()[1], -0.5);
}

TEST(CubicalGrid, JsonRoundTrip)
{
    CubicalGrid g(3, 4, {1, 2, 3});
    EXPECT_EQ(CubicalGrid::from_json(g.to_json()), g);
    EXPECT_EQ(g.to_json()["ell"], 4);
}

TEST(CubicalGrid, CellIdRoundTrip)
{
    CubicalGrid g(3, 3);
    for (std::size_t id = 0; id < g.cell_count(); ++id) EXPECT_EQ(g.cell_id(g.cell_at(id)), id);
    EXPECT_FALSE(g.contains_cell({3, 0, 0}));
    EXPECT_TRUE(g.contains_cell({2, 2, 2}));
}

TEST(CubicalGrid, FacesCsv)
{
    std::ostringstream os;
    write_faces_csv(os, {OrientedFace{{0, 1}, 1, Side::Minus}});
    EXPECT_EQ(os.str(), "cell,axis,side\n0;1,2,-\n");
}

TEST(BlockDecomposition, Counts)
{
    for (int n = 2; n <= 3; ++n) {
        BlockDecomposition b(n, 1);
        EXPECT_EQ(b.all_indices().size(), static_cast<std::size_t>(std::pow(5, n)));
        EXPECT_EQ(b.boundary_indices().size(), static_cast<std::size_t>(std::pow(5, n) - std::pow(3, n)));
        for (const auto& g : all_sign_vectors(n))
            for (const auto& a : b.gamma_indices(g)) EXPECT_TRUE(BlockDecomposition::in_boundary_set(a));
    }
    EXPECT_EQ(BlockDecomposition(2, 3).boundary_indices().size(), 16u);
}

TEST(BlockDecomposition, GammaSetMinusMinus)
{
    BlockDecomposition b(2, 1);
    const auto idx = b.gamma_indices({-1, -1});
    EXPECT_EQ(idx.size(), 9u);
    for (const auto& a : idx) EXPECT_TRUE(a[0] == 2 || a[1] == 2);
}

TEST(BlockDecomposition, GammaSetsCoverBoundarySet)
{
    for (int n = 2; n <= 3; ++n) {
        BlockDecomposition b(n, 2);
        for (const auto& a : b.boundary_indices()) {
            bool covered = false;
            for (const auto& g : all_sign_vectors(n)) covered = covered || BlockDecomposition::in_gamma_set(a, g);
            EXPECT_TRUE(covered);
        }
    }
}

TEST(BlockDecomposition, TilingVolumesAndCorners)
{
    for (int n = 2; n <= 3; ++n) {
        BlockDecomposition b(n, 2);
        double total = 0.0;
        for (const auto& a : b.all_indices()) {
            total += b.volume();
            const Vec lo = b.lower(a), hi = b.upper(a);
            for (int i = 0; i < n; ++i) {
                EXPECT_DOUBLE_EQ(lo[i], 2.0 * (a[static_cast<std::size_t>(i)] + 2));
                EXPECT_DOUBLE_EQ(hi[i] - lo[i], 2.0);
            }
        }
        EXPECT_DOUBLE_EQ(total, std::pow(10.0, n));
    }
}

// Random points of Q_{5l} land in exactly one block interior (or on block boundaries).
TEST(BlockDecomposition, DisjointInteriorsBySampling)
{
    BlockDecomposition b(3, 1);
    CounterRng rng(3);
    for (int k = 0; k < 2000; ++k) {
        Vec x(3);
        for (int i = 0; i < 3; ++i) x[i] = rng.uniform(0.0, 5.0);
        int inside = 0;
        for (const auto& a : b.all_indices()) {
            const Vec lo = b.lower(a), hi = b.upper(a);
            bool in = true;
            for (int i = 0; i < 3; ++i) in = in && x[i] > lo[i] && x[i] < hi[i];
            inside += in;
        }
        EXPECT_EQ(inside, 1);
    }
}

// G_box is the union of the G_gamma.
TEST(BlockDecomposition, CoverOfBoundaryRegion)
{
    for (int n = 2; n <= 3; ++n) {
        BlockDecomposition b(n, 2);
        CounterRng rng(17 + n);
        const auto gammas = all_sign_vectors(n);
        for (int k = 0; k < 3000; ++k) {
            Vec x(n);
            for (int i = 0; i < n; ++i) x[i] = rng.uniform(0.0, 10.0);
            bool any = false;
            for (const auto& g : gammas) any = any || b.in_G_gamma(x, g);
            EXPECT_EQ(any, b.in_G_boundary(x));
        }
    }
}

TEST(BlockDecomposition, CentersOfMiddleBlock)
{
    BlockDecomposition b(2, 3);
    const auto cs = b.centers();
    ASSERT_EQ(cs.size(), 9u);
    for (const auto& c : cs)
        for (int i = 0; i < 2; ++i) {
            EXPECT_GT(c[i], 6.0);
            EXPECT_LT(c[i], 9.0);
            EXPECT_DOUBLE_EQ(c[i] - std::floor(c[i]), 0.5);
        }
}

TEST(ConeMembership, Examples)
{
    const std::vector<Vec> sigma = {make_vec({0.5, 0.5})};
    EXPECT_TRUE(cone_membership(make_vec({1.0, 1.0}), {1, 1}, sigma));
    EXPECT_FALSE(cone_membership(make_vec({0.5, 1.0}), {1, 1}, sigma));
    EXPECT_FALSE(cone_membership(make_vec({0.0, 1.0}), {1, 1}, sigma));
    EXPECT_TRUE(cone_membership(make_vec({0.0, 0.0}), {-1, -1}, sigma));
}

// Points of C_gamma + Sigma_l stay at sup-distance >= l from blocks with alpha_i gamma_i = -2.
TEST(ConeMembership, DistanceToFarBlocks)
{
    const std::int64_t l = 2;
    BlockDecomposition b(2, l);
    const auto sigmas = b.centers();
    const SignVector gamma = {1, 1};
    CounterRng rng(23);
    std::size_t hits = 0;
    for (int k = 0; k < 20000; ++k) {
        const Vec y = make_vec({rng.uniform(-2.0, 12.0), rng.uniform(-2.0, 12.0)});
        if (!cone_membership(y, gamma, sigmas)) continue;
        ++hits;
        for (const auto& a : b.all_indices()) {
            if (a[0] * gamma[0] != -2 && a[1] * gamma[1] != -2) continue;
            EXPECT_GE(dist_inf_to_box(y, b.lower(a), b.upper(a)), static_cast<double>(l) - 1e-12);
        }
    }
    EXPECT_GT(hits, 1000u);
}

TEST(DistInf, Box)
{
    EXPECT_DOUBLE_EQ(dist_inf_to_box(make_vec({3.0, 0.5}), make_vec({0, 0}), make_vec({1, 1})), 2.0);
    EXPECT_DOUBLE_EQ(dist_inf_to_box(make_vec({0.5, 0.5}), make_vec({0, 0}), make_vec({1, 1})), 0.0);
}
