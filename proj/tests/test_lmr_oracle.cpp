#include <cmath>

#include <gtest/gtest.h>

#include "loewner/fixtures.hpp"
#include "loewner/lmr_oracle.hpp"

using namespace loewner;

namespace {

double radial_lmr(double x) { return std::log((1 + x) * (1 + x) / (4 * x)); }

const LmrOracle& asymmetric() {
    static const LmrOracle o(fixtures::asymmetric_pair());
    return o;
}

}  // namespace

TEST(Oracle, EmptyPrefixesGiveZero) { EXPECT_EQ(asymmetric().lmr_at({0.0, 0.0}), 0.0); }

TEST(Oracle, RadialPrefixClosedForm) {
    const LmrOracle o(fixtures::asymmetric_pair());
    // slit 0 is [0.5, 1); a prefix of fraction f ends at radius 1 - f/2
    for (double f : {0.25, 0.5, 1.0}) EXPECT_NEAR(o.lmr_at({f, 0.0}), radial_lmr(1.0 - 0.5 * f), 1e-9) << f;
    const LmrOracle single(fixtures::single_radial());
    EXPECT_NEAR(single.lmr_at({1.0}), std::log(2.0), 1e-9);
    EXPECT_NEAR(single.L(), std::log(2.0), 1e-9);
}

TEST(Oracle, StrictlyIncreasing) {
    const auto& o = asymmetric();
    EXPECT_GT(o.lmr_at({0.6, 0.3}), o.lmr_at({0.5, 0.3}));
    EXPECT_GT(o.lmr_at({0.5, 0.31}), o.lmr_at({0.5, 0.3}));
}

TEST(Oracle, CacheIsReproducible) {
    const auto& o = asymmetric();
    const double a = o.lmr_at({0.123, 0.456});
    const double b = o.lmr_at({0.123, 0.456});
    EXPECT_EQ(a, b);
    const LmrOracle fresh(fixtures::asymmetric_pair());
    EXPECT_EQ(fresh.lmr_at({0.123, 0.456}), a);
}

TEST(Oracle, GridMatchesPointEvaluation) {
    const LmrOracle o(fixtures::asymmetric_pair());
    const auto g = o.grid(5);
    const LmrOracle fresh(fixtures::asymmetric_pair());
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) EXPECT_EQ(g[i][j], fresh.lmr_at({i / 4.0, j / 4.0})) << i << "," << j;
}

TEST(Oracle, FractionsAboveOneReachTheExtension) {
    const auto& o = asymmetric();
    EXPECT_GT(o.max_fraction(0), 1.0);
    EXPECT_GT(o.lmr_at({1.2, 1.0}), o.L());
    EXPECT_THROW(o.lmr_at({-0.1, 0.0}), std::invalid_argument);
    EXPECT_THROW(o.lmr_at({o.max_fraction(0) + 0.1, 0.0}), std::invalid_argument);
    EXPECT_THROW(o.lmr_at({0.1}), std::invalid_argument);
}

TEST(Oracle, ResolutionPolicy) {
    const auto& o = asymmetric();
    EXPECT_GE(o.resolution(), 256);
    EXPECT_EQ(o.resolution() & (o.resolution() - 1), 0);
    ASSERT_FALSE(o.resolution_trace().empty());
    EXPECT_LT(o.resolution_trace().back().second, o.accuracy());
    OracleOptions forced;
    forced.resolution = 300;
    EXPECT_EQ(LmrOracle(fixtures::symmetric_pair(), forced).resolution(), 300);
}

TEST(Sums, SingleIntervalTelescopes) {
    const auto& o = asymmetric();
    const std::vector<Table> tables{Table{{0.0, 1.0}, {0.0, 0.8}}, Table{{0.0, 1.0}, {0.0, 0.6}}};
    const std::vector<double> Z{0.0, 1.0};
    const auto s = o.sums(tables, Z);
    EXPECT_EQ(s.s1(), o.lmr_at({0.8, 0.0}));
    EXPECT_EQ(s.s2(), o.lmr_at({0.0, 0.6}));
    EXPECT_EQ(s.s1() + s.s2_tilde(), o.lmr_at({0.8, 0.6}));
    EXPECT_EQ(s.norm, 1.0);
}

TEST(Sums, SymmetricTablesGiveEqualSums) {
    const LmrOracle o(fixtures::symmetric_pair());
    const Table a{{0.0, 0.5, 1.0}, {0.0, 0.3, 0.9}};
    const std::vector<Table> tables{a, a};
    const std::vector<double> Z{0.0, 0.2, 0.5, 0.7, 1.0};
    const auto s = o.sums(tables, Z);
    EXPECT_NEAR(s.s1(), s.s2(), 1e-12);
    for (double v : {s.s1(), s.s2(), s.s1_tilde(), s.s2_tilde()}) EXPECT_GT(v, 0.0);
}

TEST(Sums, RejectsBadPartitions) {
    const auto& o = asymmetric();
    const std::vector<Table> tables{Table{{0.0, 1.0}, {0.0, 1.0}}, Table{{0.0, 1.0}, {0.0, 1.0}}};
    EXPECT_THROW(o.sums(tables, std::vector<double>{0.0, 0.5, 0.4}), std::invalid_argument);
    EXPECT_THROW(o.sums(tables, std::vector<double>{0.1, 0.5}), std::invalid_argument);
}

TEST(ContinuityModulus, WeakBoundAcceptsTheWholeGrid) {
    EXPECT_EQ(asymmetric().continuity_modulus(1.0, 9), 1.0);
}

TEST(ContinuityModulus, QuarterGivesPositiveDelta) {
    const double delta = asymmetric().continuity_modulus(0.25, 17);
    EXPECT_GT(delta, 0.0);
    EXPECT_LE(delta, 1.0);
}

TEST(ContinuityModulus, FloorReached) {
    EXPECT_THROW(asymmetric().continuity_modulus(1e-12, 9), AccuracyFloor);
    EXPECT_THROW(asymmetric().continuity_modulus(0.0, 9), std::invalid_argument);
}

TEST(Grid, StrictlyMonotone) {
    const auto g = asymmetric().grid(17);
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = 0; j + 1 < g.size(); ++j) {
            EXPECT_GT(g[i][j + 1], g[i][j]);
            EXPECT_GT(g[j + 1][i], g[j][i]);
        }
}

TEST(Grid, ContinuousUnderRefinement) {
    // values on a 9-grid reappear on the refined 17-grid
    const LmrOracle o(fixtures::asymmetric_pair());
    const auto coarse = o.grid(9);
    const auto fine = o.grid(17);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) EXPECT_NEAR(coarse[i][j], fine[2 * i][2 * j], 1e-12);
}
