#include "oracles.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/rng.hpp"
#include "cubeskel/transport.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

using namespace cubeskel;

namespace {

/// Naive plan on [0, ell]^2 recomputed from face loads: each cell walks straight to the nearest
/// side (axis 0 first, minus side first on ties) and every face crossed carries its supply.
double naive_cost_2d(std::int64_t ell, std::int64_t b, double alpha)
{
    std::map<std::tuple<int, std::int64_t, std::int64_t>, std::int64_t> load;  // (axis, plane, other)
    for (std::int64_t i = 0; i < ell; ++i)
        for (std::int64_t j = 0; j < ell; ++j) {
            const std::int64_t pos[2] = {i, j};
            int best_axis = 0;
            bool minus = true;
            std::int64_t best = ell + 1;
            for (int a = 0; a < 2; ++a) {
                if (pos[a] + 1 < best) best = pos[a] + 1, best_axis = a, minus = true;
                if (ell - pos[a] < best) best = ell - pos[a], best_axis = a, minus = false;
            }
            const std::int64_t p = pos[best_axis], other = pos[1 - best_axis];
            if (minus)
                for (std::int64_t k = p; k >= 0; --k) load[{best_axis, k, other}] -= b;
            else
                for (std::int64_t k = p + 1; k <= ell; ++k) load[{best_axis, k, other}] += b;
        }
    std::vector<std::int64_t> d;
    for (const auto& [key, v] : load) d.push_back(v);
    return oracle::sorted_cost(d, alpha);
}

FaceFlow single_cell(std::int64_t b, double alpha) { return FaceFlow(CubicalGrid(2, 1), {b}, alpha); }

} // namespace

TEST(Validate, Examples)
{
    const auto zero = validate(FaceFlow(CubicalGrid(2, 3), std::vector<std::int64_t>(9, 0), 0.5));
    EXPECT_TRUE(zero.valid);
    EXPECT_EQ(zero.cost, 0.0);

    auto f = single_cell(2, 0.5);
    const OrientedFace east{{0, 0}, 0, Side::Plus};
    f.push(east, 2);
    const auto ok = validate(f);
    EXPECT_TRUE(ok.valid);
    EXPECT_DOUBLE_EQ(ok.cost, std::sqrt(2.0));

    auto g = single_cell(2, 0.5);
    g.push(east, 1);
    const auto bad = validate(g);
    EXPECT_FALSE(bad.valid);
    ASSERT_EQ(bad.violations.size(), 1u);
    EXPECT_EQ(bad.violations[0].divergence, 1);
    EXPECT_EQ(bad.violations[0].supply, 2);
}

TEST(Validate, NeverThrowsOnMalformedInput)
{
    FaceFlow f(CubicalGrid(2, 2), {2, 2, 2, 2}, 0.5);
    f.flow.resize(3);
    ValidationReport r;
    EXPECT_NO_THROW(r = validate(f));
    EXPECT_FALSE(r.valid);
    EXPECT_FALSE(r.message.empty());
}

TEST(FaceFlow, AntisymmetryIsStructural)
{
    FaceFlow f(CubicalGrid(2, 2), {0, 0, 0, 0}, 0.5);
    const OrientedFace face{{0, 0}, 0, Side::Plus};
    f.push(face, 3);
    EXPECT_EQ(f.value(face), 3);
    EXPECT_EQ(f.value(face.flipped()), -3);
    EXPECT_EQ(f.divergence(f.grid.cell_id({0, 0})), 3);
    EXPECT_EQ(f.divergence(f.grid.cell_id({1, 0})), -3);
    EXPECT_THROW(exact_min(CubicalGrid(2, 2), {1}, 0.5), ShapeError);
    EXPECT_THROW(naive_plan(CubicalGrid(2, 2), {0, 0, 0, 0}, 1.5), ParameterError);
}

TEST(FlowCost, ConcaveSubadditivity)
{
    CounterRng rng(31);
    for (double alpha : {0.25, 0.5, 0.75, 1.0 - 1.0 / 3.0})
        for (int k = 0; k < 1000; ++k) {
            const auto a = rng.integer(-50, 50), b = rng.integer(-50, 50);
            EXPECT_LE(flow_cost({a + b}, alpha), flow_cost({a}, alpha) + flow_cost({b}, alpha) + 1e-12);
        }
    EXPECT_EQ(flow_cost({3, -1, 0, 2}, 0.5), oracle::sorted_cost({3, -1, 0, 2}, 0.5));
}

TEST(ExactMin, SingleCellExamples)
{
    const auto r = exact_min(CubicalGrid(2, 1), {2}, 0.5);
    EXPECT_TRUE(r.certified);
    EXPECT_DOUBLE_EQ(r.cost, std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(r.cost, oracle::transport_single_cell(2, 0.5, 2, 6));

    const auto r4 = exact_min(CubicalGrid(4, 1), {2}, 0.75);
    EXPECT_TRUE(r4.certified);
    EXPECT_DOUBLE_EQ(r4.cost, std::pow(2.0, 0.75));
    EXPECT_DOUBLE_EQ(r4.cost, oracle::transport_single_cell(4, 0.75, 2, 3));

    const auto z = exact_min(CubicalGrid(2, 2), {0, 0, 0, 0}, 0.5);
    EXPECT_EQ(z.cost, 0.0);
    for (auto d : z.flow.flow) EXPECT_EQ(d, 0);
}

TEST(ExactMin, TwoByTwoMatchesBruteForce)
{
    const auto r = exact_min(CubicalGrid(2, 2), uniform_supplies(CubicalGrid(2, 2), 2), 0.5);
    EXPECT_TRUE(r.certified);
    EXPECT_TRUE(validate(r.flow).valid);
    EXPECT_EQ(r.cost, oracle::transport_2x2(0.5, 2, 3));
}

TEST(ExactMin, Errors)
{
    ExactOptions opts;
    opts.flow_cap = -1;
    EXPECT_THROW(exact_min(CubicalGrid(2, 1), {2}, 0.5, opts), ParameterError);
}

TEST(Plans, NaiveMatchesFaceLoadOracle)
{
    for (std::int64_t ell : {1, 2, 3, 4, 8, 16, 32}) {
        const CubicalGrid grid(2, ell);
        const auto f = naive_plan(grid, uniform_supplies(grid, 2), 0.5);
        EXPECT_TRUE(validate(f).valid);
        EXPECT_NEAR(f.cost(), naive_cost_2d(ell, 2, 0.5), 1e-9 * f.cost());
    }
    EXPECT_DOUBLE_EQ(naive_plan(CubicalGrid(2, 1), {2}, 0.5).cost(), std::sqrt(2.0));
}

TEST(Plans, NaiveValidForRandomSupplies)
{
    CounterRng rng(32);
    for (int k = 0; k < 50; ++k) {
        const int n = static_cast<int>(rng.integer(1, 3));
        const CubicalGrid grid(n, rng.integer(1, 5));
        std::vector<std::int64_t> s(grid.cell_count());
        for (auto& x : s) x = rng.integer(0, 4);
        EXPECT_TRUE(validate(naive_plan(grid, s, 0.5)).valid);
    }
}

TEST(Plans, Dyadic)
{
    EXPECT_DOUBLE_EQ(dyadic_plan(CubicalGrid(2, 1), {2}, 0.5).cost(), std::sqrt(2.0));
    for (std::int64_t ell : {2, 4, 8, 16}) {
        const CubicalGrid grid(2, ell);
        EXPECT_TRUE(validate(dyadic_plan(grid, uniform_supplies(grid, 2), 0.5)).valid);
    }
    const CubicalGrid g3(3, 4);
    EXPECT_TRUE(validate(dyadic_plan(g3, uniform_supplies(g3, 2), 2.0 / 3.0)).valid);
    EXPECT_THROW(dyadic_plan(CubicalGrid(2, 3), uniform_supplies(CubicalGrid(2, 3), 2), 0.5), ParameterError);
}

TEST(LocalSearch, BracketedByExactAndPlan)
{
    for (std::int64_t ell : {1, 2}) {
        const CubicalGrid grid(2, ell);
        const auto s = uniform_supplies(grid, 2);
        const auto exact = exact_min(grid, s, 0.5);
        ASSERT_TRUE(exact.certified);
        for (const auto& plan : {naive_plan(grid, s, 0.5), dyadic_plan(grid, s, 0.5)}) {
            const auto ls = local_search(plan);
            EXPECT_TRUE(validate(ls.flow).valid);
            EXPECT_LE(exact.cost, ls.cost + 1e-12);
            EXPECT_LE(ls.cost, plan.cost());
        }
        const auto fixed = local_search(exact.flow);
        EXPECT_EQ(fixed.moves, 0u);
        EXPECT_EQ(fixed.cost, exact.cost);
    }
}

TEST(LocalSearch, ImprovesDyadicAndIsIdempotent)
{
    const CubicalGrid grid(2, 8);
    const auto plan = dyadic_plan(grid, uniform_supplies(grid, 2), 0.5);
    const auto first = local_search(plan);
    EXPECT_TRUE(first.converged);
    EXPECT_LT(first.cost, plan.cost());
    EXPECT_DOUBLE_EQ(first.initial_cost, plan.cost());
    const auto second = local_search(first.flow);
    EXPECT_EQ(second.moves, 0u);
    EXPECT_EQ(second.cost, first.cost);

    // no unit cycle improves the straight-line plan at this size
    const auto naive = naive_plan(grid, uniform_supplies(grid, 2), 0.5);
    const auto kept = local_search(naive);
    EXPECT_EQ(kept.moves, 0u);
    EXPECT_EQ(kept.cost, naive.cost());

    auto broken = plan;
    broken.flow[0] += 1;
    EXPECT_THROW(local_search(broken), PreconditionError);
}

TEST(Attribution, Examples)
{
    const CubicalGrid grid(2, 2);
    const DegreeTable twos{grid, {2, 2, 2, 2}}, zeros{grid, {0, 0, 0, 0}}, mixed{grid, {2, 0, 0, 2}};
    EXPECT_EQ(attribution_from_degrees(twos, zeros), (std::vector<std::int64_t>{2, 2, 2, 2}));
    EXPECT_EQ(attribution_from_degrees(twos, twos), (std::vector<std::int64_t>{0, 0, 0, 0}));
    EXPECT_EQ(attribution_from_degrees(mixed, zeros), mixed.degrees);
    EXPECT_THROW(attribution_from_degrees(twos, DegreeTable{CubicalGrid(2, 1), {0}}), ShapeError);
    EXPECT_THROW(attribution_from_degrees(twos, DegreeTable{grid, {0}}), ShapeError);
}

TEST(ScalingFit, ModelRecovery)
{
    std::vector<ScalingSample> power, model;
    for (std::int64_t ell : {2, 4, 8, 16, 32}) {
        const double e2 = static_cast<double>(ell * ell);
        power.push_back({ell, e2});
        model.push_back({ell, e2 * (1.0 + std::log(static_cast<double>(ell)))});
    }
    const auto p = fit_log_scaling(2, power);
    EXPECT_NEAR(p.b, 0.0, 1e-12);
    EXPECT_NEAR(p.a, 1.0, 1e-12);
    const auto m = fit_log_scaling(2, model);
    EXPECT_NEAR(m.a, 1.0, 1e-12);
    EXPECT_NEAR(m.b, 1.0, 1e-12);
    EXPECT_NEAR(m.r2, 1.0, 1e-12);
    EXPECT_GE(m.r2, 0.0);

    EXPECT_THROW(fit_log_scaling(2, {{2, 4.0}, {4, 16.0}}), FitError);
    EXPECT_THROW(fit_log_scaling(2, {{2, 4.0}, {2, 4.0}, {2, 4.0}}), FitError);
}

TEST(ScalingFit, BestPlanIsNondecreasingOverEll2)
{
    double prev = 0.0;
    for (std::int64_t ell : {1, 2, 4, 8, 16}) {
        const double c = plan_cost(2, ell, 0.5, 2, Solver::DyadicLocal) / static_cast<double>(ell * ell);
        EXPECT_GE(c, prev);
        prev = c;
    }
    EXPECT_EQ(solver_from_string(to_string(Solver::DyadicLocal)), Solver::DyadicLocal);
    EXPECT_THROW(solver_from_string("simplex"), ParameterError);
}

TEST(TransportIo, InstanceRoundTripAndCsv)
{
    const CubicalGrid grid(2, 2);
    const auto j = instance_to_json(grid, {2, 0, 1, 2}, 0.5);
    const auto f = instance_from_json(j);
    EXPECT_EQ(f.grid, grid);
    EXPECT_EQ(f.supplies, (std::vector<std::int64_t>{2, 0, 1, 2}));
    EXPECT_EQ(f.alpha, 0.5);

    auto g = single_cell(2, 0.5);
    g.push(OrientedFace{{0, 0}, 0, Side::Plus}, 2);
    std::ostringstream os;
    write_flow_csv(os, g);
    EXPECT_EQ(os.str(), "face_id,d\n" + std::to_string(g.grid.facet_id(OrientedFace{{0, 0}, 0, Side::Plus})) + ",2\n");

    ScalingFit fit;
    fit.dimension = 2;
    fit.samples = {{2, 8.0}};
    std::ostringstream ss;
    write_scaling_csv(ss, fit);
    EXPECT_EQ(ss.str(), "ell,cost,cost_over_ellN\n2,8,2\n");
    EXPECT_NE(scaling_svg(fit, "t").find("<svg"), std::string::npos);
}
