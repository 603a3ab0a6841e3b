#include <cmath>

#include <gtest/gtest.h>

#include "qrt/obstruction.hpp"

using namespace qrt;

TEST(Obstruction, Values) {
    EXPECT_EQ(g_value(9, 9), 0.0);
    EXPECT_NEAR(g_value(0, 4), std::sin(2.0), 1e-15);
    EXPECT_EQ(g_value(0, 10), 0.0);
    EXPECT_EQ(g_value(5, 2), 0.0);
    EXPECT_THROW(g_value(-1, 2), ParameterError);
}

TEST(Obstruction, RowSup) {
    EXPECT_GE(row_sup(0), 0.987);
    EXPECT_GE(row_sup(100), 0.5);
    EXPECT_GE(row_sup(1'000'000), 0.5);
}

TEST(Obstruction, RowSeparation) {
    EXPECT_EQ(row_separation(7, 7), 0.0);
    EXPECT_GE(row_separation(0, 16), 0.5);
    EXPECT_GT(row_separation(0, 1), 0.0);
}

TEST(Obstruction, LipschitzInSqrtCoordinates) {
    for (std::int64_t i = 0; i < 60; ++i)
        for (std::int64_t j = 0; j < 60; ++j) {
            std::int64_t ip = i + (j % 3), jp = j + (i % 4);
            double r = sqrt_gap(i, ip) + sqrt_gap(j, jp);
            EXPECT_LE(std::abs(g_value(i, j) - g_value(ip, jp)), r + 1e-12);
        }
}

TEST(Obstruction, GreedyNetGrowsWithRows) {
    std::vector<std::int64_t> rows;
    for (std::int64_t t = 0; t < 30; ++t) rows.push_back(16 * t * t);
    EXPECT_EQ(greedy_net_size(rows, 0.25), rows.size());
}
