#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sacseg/morph.hpp"
#include "sacseg/watershed.hpp"
#include "tests_common.hpp"

using namespace sacseg;

namespace {
GrayImage row(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return GrayImage(n, 1, std::move(v));
}
}  // namespace

TEST(Gradient, ConstantAndTiny) {
    EXPECT_EQ(gradient_magnitude(GrayImage(5, 4, 3.0)), GrayImage(5, 4, 0.0));
    EXPECT_EQ(gradient_magnitude(GrayImage(1, 1, 9.0)), GrayImage(1, 1, 0.0));
}

TEST(Gradient, VerticalStep) {
    const double h = 10.0;
    GrayImage img(6, 5, 0.0);
    for (int y = 0; y < 5; ++y)
        for (int x = 3; x < 6; ++x) img(x, y) = h;
    const auto g = gradient_magnitude(img);
    for (int x = 0; x < 6; ++x) EXPECT_DOUBLE_EQ(g(x, 2), (x == 2 || x == 3) ? 4 * h : 0.0) << x;
}

TEST(Quantize, RoundHalfUpAndClamp) {
    const auto q = quantize_levels(row({-3, 0.49, 0.5, 1.5, 254.5, 300}));
    EXPECT_EQ(q.vec(), (std::vector<std::uint8_t>{0, 0, 1, 2, 255, 255}));
}

TEST(WatershedVs, Examples) {
    const auto c = watershed_vs(GrayImage(4, 4, 7.0));
    EXPECT_EQ(c.n_basins, 1);
    EXPECT_EQ(c.watershed_pixels, 0u);

    const auto r = watershed_vs(row({0, 1, 2, 1, 0}));
    EXPECT_EQ(r.labels.vec(), (std::vector<std::int32_t>{1, 1, 0, 2, 2}));
    EXPECT_EQ(r.n_basins, 2);
    EXPECT_EQ(r.watershed_pixels, 1u);
    EXPECT_TRUE(oracle::same_partition(r.labels, flooding_oracle(row({0, 1, 2, 1, 0})).labels));
}

TEST(WatershedVs, TwoMinimaSplitByMidline) {
    // the two minima sit at (x=2, y=1) and (x=2, y=3): the dam is row 2
    GrayImage img(5, 5, 9.0);
    img(2, 1) = 0.0;
    img(2, 3) = 0.0;
    const auto r = watershed_vs(img);
    EXPECT_EQ(r.n_basins, 2);
    for (int x = 0; x < 5; ++x) {
        EXPECT_EQ(r.labels(x, 2), 0) << x;
        EXPECT_EQ(r.labels(x, 0), 1);
        EXPECT_EQ(r.labels(x, 4), 2);
    }
    EXPECT_TRUE(oracle::same_partition(r.labels, flooding_oracle(img).labels));
}

TEST(FloodingOracle, Examples) {
    EXPECT_EQ(flooding_oracle(GrayImage(3, 3, 1.0)).n_basins, 1);
    const auto r = flooding_oracle(row({0, 2, 1, 2, 0}));
    EXPECT_EQ(r.n_basins, 3);
    EXPECT_EQ(r.labels[1], 0);
    EXPECT_EQ(r.labels[3], 0);
    EXPECT_EQ(r.watershed_pixels, 2u);
    EXPECT_ERROR_KIND(flooding_oracle(GrayImage(65, 2, 0.0)), ErrorKind::ImageTooLarge);
}

TEST(FloodingOracle, MatchesWatershedOnRandomSmallImages) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 300; ++t) {
        const int w = 1 + static_cast<int>(rng() % 7), h = 1 + static_cast<int>(rng() % 7);
        const auto img = oracle::random_image(w, h, 5, rng);
        for (auto conn : {Connectivity::Four, Connectivity::Eight}) {
            const auto a = watershed_vs(img, conn), b = flooding_oracle(img, conn);
            ASSERT_TRUE(oracle::same_partition(a.labels, b.labels)) << "case " << t;
            ASSERT_EQ(a.labels, b.labels);  // same raster numbering too
        }
    }
}

TEST(FloodLevelSets, Nested) {
    std::mt19937_64 rng(12);
    const auto img = oracle::random_image(6, 5, 6, rng);
    const auto fs = flood_level_sets(img);
    ASSERT_EQ(fs.levels.size(), fs.threshold_sets.size());
    for (std::size_t k = 1; k < fs.levels.size(); ++k) {
        EXPECT_LT(fs.levels[k - 1], fs.levels[k]);
        for (std::size_t i = 0; i < img.size(); ++i)
            if (fs.threshold_sets[k - 1][i]) EXPECT_TRUE(fs.threshold_sets[k][i]);
    }
    EXPECT_EQ(count_true(fs.threshold_sets.back()), img.size());
}

TEST(WatershedVs, BasinsConnectedWithOneMinimumEach) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 100; ++t) {
        const auto img = oracle::random_image(8, 8, 6, rng);
        for (auto conn : {Connectivity::Four, Connectivity::Eight}) {
            const auto r = watershed_vs(img, conn);
            const auto mins = oracle::brute_regional_minima(img, conn);
            auto [mc, nm] = label_components(mins, conn);
            ASSERT_EQ(r.n_basins, nm);
            for (int k = 1; k <= r.n_basins; ++k) {
                BinaryMask b(8, 8);
                for (std::size_t i = 0; i < b.size(); ++i) b[i] = r.labels[i] == k;
                EXPECT_EQ(label_components(b, conn).second, 1);
                std::set<int> m;
                for (std::size_t i = 0; i < b.size(); ++i)
                    if (b[i] && mc[i]) m.insert(mc[i]);
                EXPECT_EQ(m.size(), 1u);
            }
        }
    }
}

TEST(WatershedVs, Deterministic) {
    std::mt19937_64 rng(14);
    const auto img = oracle::random_image(40, 30, 256, rng);
    EXPECT_EQ(watershed_vs(img).labels, watershed_vs(img).labels);
}

TEST(WatershedVs, MonotoneRemapInvariance) {
    // 16 levels spaced by 17 keep v -> v^2/255 strictly increasing after quantisation
    std::mt19937_64 rng(15);
    for (int t = 0; t < 20; ++t) {
        GrayImage img = oracle::random_image(8, 8, 16, rng);
        for (auto& v : img.pixels()) v *= 17.0;
        GrayImage phi = img;
        for (auto& v : phi.pixels()) v = v * v / 255.0;
        EXPECT_EQ(watershed_vs(img).labels, watershed_vs(phi).labels);
    }
}

TEST(MarkerWatershed, Examples) {
    std::vector<std::uint8_t> m{1, 0, 0, 0, 0, 0, 1};
    const auto r = marker_watershed(GrayImage(7, 1, 4.0), BinaryMask(7, 1, m));
    EXPECT_EQ(r.labels.vec(), (std::vector<std::int32_t>{1, 1, 1, 0, 2, 2, 2}));

    const auto all = marker_watershed(GrayImage(3, 3, 1.0), BinaryMask(3, 3, 1));
    EXPECT_EQ(all.n_basins, 1);
    EXPECT_EQ(all.watershed_pixels, 0u);

    const auto sup = marker_watershed(row({0, 1, 2, 1, 0}), BinaryMask(5, 1, std::vector<std::uint8_t>{1, 0, 0, 0, 0}));
    EXPECT_EQ(sup.n_basins, 1);
    EXPECT_EQ(sup.labels, LabelMap(5, 1, 1));
}

TEST(MarkerWatershed, Errors) {
    EXPECT_ERROR_KIND(marker_watershed(GrayImage(3, 1, 0.0), BinaryMask(3, 1, 0)), ErrorKind::EmptyMarker);
    EXPECT_ERROR_KIND(marker_watershed(GrayImage(3, 1, 0.0), BinaryMask(2, 1, 1)), ErrorKind::DimensionMismatch);
}

TEST(MarkerWatershed, BasinCountEqualsMarkerComponents) {
    std::mt19937_64 rng(16);
    for (int t = 0; t < 100; ++t) {
        const auto img = oracle::random_image(10, 9, 256, rng);
        auto m = oracle::random_mask(10, 9, 0.08, rng);
        if (count_true(m) == 0) m(0, 0) = 1;
        auto [mc, nm] = label_components(m, Connectivity::Four);
        const auto r = marker_watershed(img, m);
        ASSERT_EQ(r.n_basins, nm);
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i]) EXPECT_EQ(r.labels[i], mc[i]);  // basin k holds marker component k
    }
}
