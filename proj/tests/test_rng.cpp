#include "cubeskel/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using cubeskel::CounterRng;

TEST(CounterRng, SameSeedSameStream)
{
    CounterRng a(42, 3), b(42, 3);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, DrawIsPureFunctionOfCounter)
{
    CounterRng a(7);
    const auto expected = a.at(10);
    for (int i = 0; i < 10; ++i) a();
    EXPECT_EQ(a.counter(), 10u);
    EXPECT_EQ(a(), expected);
}

TEST(CounterRng, StreamsAndSeedsDiffer)
{
    CounterRng a(1, 0), b(1, 1), c(2, 0);
    EXPECT_NE(a.at(0), b.at(0));
    EXPECT_NE(a.at(0), c.at(0));
    EXPECT_NE(a.fork(1).at(0), a.fork(2).at(0));
}

TEST(CounterRng, UniformMomentsAndRange)
{
    CounterRng r(11);
    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sum2 += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 5e-3);
    EXPECT_NEAR(sum2 / n - 0.25, 1.0 / 12.0, 5e-3);
}

TEST(CounterRng, NormalMoments)
{
    CounterRng r(5);
    double sum = 0, sum2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        sum += z;
        sum2 += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 1e-2);
    EXPECT_NEAR(sum2 / n, 1.0, 2e-2);
}

TEST(CounterRng, IntegerCoversClosedRange)
{
    CounterRng r(9);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto k = r.integer(-3, 3);
        ASSERT_GE(k, -3);
        ASSERT_LE(k, 3);
        seen.insert(k);
    }
    EXPECT_EQ(seen.size(), 7u);
}

TEST(SplitMix, KnownValue)
{
    // first output of the reference splitmix64 generator seeded with 0
    EXPECT_EQ(cubeskel::splitmix64(0), 0xe220a8397b1dcdafULL);
}
