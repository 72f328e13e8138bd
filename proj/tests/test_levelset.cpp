#include <gtest/gtest.h>

#include <deque>

#include "npseg/levelset.hpp"
#include "test_util.hpp"

using namespace npseg;

namespace {

std::vector<int> bfs_components(const std::vector<std::uint8_t>& mask, int w, int h) {
    std::vector<int> out(mask.size(), 0);
    int next = 0;
    for (std::size_t s = 0; s < mask.size(); ++s) {
        if (!mask[s] || out[s]) continue;
        out[s] = ++next;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            for (std::size_t q : neighbors4(p, w, h)) {
                if (mask[q] && !out[q]) {
                    out[q] = next;
                    queue.push_back(q);
                }
            }
        }
    }
    return out;
}

}  // namespace

TEST(UpperLevelSet, Bounds) {
    const DensityField f{3, 1, {1.0, 2.0, 3.0}};
    EXPECT_EQ(upper_level_set(f, 0.0).inside, (std::vector<std::uint8_t>{1, 1, 1}));
    EXPECT_EQ(upper_level_set(f, 3.5).inside, (std::vector<std::uint8_t>{0, 0, 0}));
    EXPECT_EQ(upper_level_set(f, 2.0).inside, (std::vector<std::uint8_t>{0, 1, 1}));
}

TEST(Components, SmallCases) {
    EXPECT_EQ(connected_components(std::vector<std::uint8_t>(9, 1), 3, 3), std::vector<int>(9, 1));
    EXPECT_EQ(connected_components({1, 0, 0, 1}, 2, 2), (std::vector<int>{1, 0, 0, 2}));
    EXPECT_EQ(connected_components({0, 1, 0, 1, 1, 1}, 3, 2), (std::vector<int>{0, 1, 0, 1, 1, 1}));
}

TEST(Components, MatchBfsOracle) {
    Rng rng(21);
    for (int t = 0; t < 200; ++t) {
        const double fill = 0.2 + 0.6 * rng.uniform_open();
        std::vector<std::uint8_t> mask(144);
        for (auto& m : mask) m = rng.uniform_open() < fill;
        // Both number components in row-major first-encounter order, so ids match exactly.
        EXPECT_EQ(connected_components(mask, 12, 12), bfs_components(mask, 12, 12));
    }
}

TEST(Components, NestingAcrossLevels) {
    Rng rng(22);
    for (int t = 0; t < 50; ++t) {
        DensityField f{10, 9, std::vector<double>(90)};
        for (double& v : f.values) v = rng.uniform_open();
        const double lo = rng.uniform_open(), hi = lo + (1 - lo) * rng.uniform_open();
        const auto outer = connected_components(upper_level_set(f, lo));
        const auto inner = connected_components(upper_level_set(f, hi));
        std::map<int, int> parent;
        for (std::size_t p = 0; p < 90; ++p) {
            if (!inner[p]) continue;
            ASSERT_NE(outer[p], 0);
            auto [it, fresh] = parent.try_emplace(inner[p], outer[p]);
            EXPECT_EQ(it->second, outer[p]);
        }
    }
}

TEST(UnionFind, Basics) {
    UnionFind uf(5);
    EXPECT_NE(uf.find(0), uf.find(1));
    uf.unite(0, 1);
    uf.unite(3, 4);
    EXPECT_EQ(uf.find(0), uf.find(1));
    EXPECT_EQ(uf.size_of(4), 2u);
    const std::size_t root = uf.unite(1, 4);
    EXPECT_EQ(uf.find(3), root);
    EXPECT_EQ(uf.size_of(0), 4u);
    EXPECT_EQ(uf.size_of(2), 1u);
}

TEST(Boundary, Cases) {
    const DensityField all{3, 3, std::vector<double>(9, 1.0)};
    for (auto b : level_set_boundary(upper_level_set(all, 0.0))) EXPECT_EQ(b, 0);
    // Step: left two columns high.
    DensityField step{4, 2, {2, 2, 1, 1, 2, 2, 1, 1}};
    EXPECT_EQ(level_set_boundary(upper_level_set(step, 1.5)), (std::vector<std::uint8_t>{0, 1, 0, 0, 0, 1, 0, 0}));
}

TEST(QuantileLevel, Interpolates) {
    const DensityField f{5, 1, {4.0, 1.0, 3.0, 2.0, 5.0}};
    EXPECT_DOUBLE_EQ(density_quantile_level(f, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(density_quantile_level(f, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(density_quantile_level(f, 0.1), 1.4);
    EXPECT_GT(density_quantile_level(f, 1.0), 5.0);
    EXPECT_EQ(level_set_boundary(upper_level_set(f, density_quantile_level(f, 1.0))),
              std::vector<std::uint8_t>(5, 0));
    EXPECT_THROW(density_quantile_level(f, 1.5), InvalidArgument);
}
