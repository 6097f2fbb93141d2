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
BinaryMask mrow(std::vector<std::uint8_t> v) {
    const int n = static_cast<int>(v.size());
    return BinaryMask(n, 1, std::move(v));
}
const auto kSq1 = StructuringElement::square(1);
}  // namespace

TEST(Erode, ConstantAndIdentity) {
    const GrayImage c(6, 4, 17.0);
    for (auto se : {kSq1, StructuringElement::disk(2), StructuringElement::cross(3)}) EXPECT_EQ(erode(c, se), c);
    std::mt19937_64 rng(1);
    const auto img = oracle::random_image(8, 8, 256, rng);
    EXPECT_EQ(erode(img, StructuringElement::square(0)), img);
    EXPECT_EQ(dilate(img, StructuringElement::disk(0)), img);
}

TEST(Erode, CornerZeroSpreadsToItsWindow) {
    GrayImage img(3, 3, 255.0);
    img(0, 0) = 0.0;
    const auto out = erode(img, kSq1);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) EXPECT_EQ(out(x, y), (x <= 1 && y <= 1) ? 0.0 : 255.0) << x << "," << y;
}

TEST(Dilate, BrightPixelBecomesBlock) {
    GrayImage img(5, 5, 0.0);
    img(2, 2) = 255.0;
    const auto out = dilate(img, kSq1);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x)
            EXPECT_EQ(out(x, y), (std::abs(x - 2) <= 1 && std::abs(y - 2) <= 1) ? 255.0 : 0.0);
}

TEST(ErodeDilate, MatchWindowOracleAndDuality) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 60; ++t) {
        const auto img = oracle::random_image(8, 8, 256, rng);
        for (auto se : {kSq1, StructuringElement::cross(2), StructuringElement::disk(3)}) {
            EXPECT_EQ(erode(img, se), oracle::window_op(img, se, true));
            EXPECT_EQ(dilate(img, se), oracle::window_op(img, se, false));
            EXPECT_EQ(dilate(img, se), complement(erode(complement(img), se)));
        }
    }
}

TEST(StructuringElement, Shapes) {
    EXPECT_EQ(StructuringElement::square(1).offsets().size(), 9u);
    EXPECT_EQ(StructuringElement::cross(1).offsets().size(), 5u);
    EXPECT_EQ(StructuringElement::disk(2).offsets().size(), 13u);
    EXPECT_EQ(StructuringElement::disk(0).offsets().size(), 1u);
    EXPECT_EQ(default_marker_radius(1024, 900), 5);
    EXPECT_EQ(default_marker_radius(512, 512), 3);
    EXPECT_EQ(default_marker_radius(20, 20), 1);
}

TEST(Reconstruct, Examples) {
    const auto mask = row({0, 3, 0, 2, 0});
    EXPECT_EQ(reconstruct_by_dilation(mask, mask, Connectivity::Four), mask);
    EXPECT_EQ(reconstruct_by_dilation(row({0, 1, 0, 0, 0}), mask, Connectivity::Four), row({0, 1, 0, 0, 0}));
    EXPECT_EQ(reconstruct_by_dilation(row({0, 0, 0, 0, 0}), mask, Connectivity::Four), row({0, 0, 0, 0, 0}));
}

TEST(Reconstruct, Errors) {
    EXPECT_ERROR_KIND(reconstruct_by_dilation(row({1, 1}), row({0, 2}), Connectivity::Four),
                      ErrorKind::MarkerExceedsMask);
    EXPECT_ERROR_KIND(reconstruct_by_dilation(row({0, 0, 0}), row({1, 1}), Connectivity::Four),
                      ErrorKind::DimensionMismatch);
}

TEST(Reconstruct, MatchesIteratedGeodesicDilation) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const int w = 1 + static_cast<int>(rng() % 9), h = 1 + static_cast<int>(rng() % 9);
        const auto mask = oracle::random_image(w, h, 10, rng);
        auto marker = oracle::random_image(w, h, 10, rng);
        for (std::size_t i = 0; i < marker.size(); ++i) marker[i] = std::min(marker[i], mask[i]) * (rng() % 3 == 0);
        for (auto conn : {Connectivity::Four, Connectivity::Eight}) {
            const auto r = reconstruct_by_dilation(marker, mask, conn);
            ASSERT_EQ(r, oracle::geodesic_reconstruct(marker, mask, conn));
            const auto cm = complement(mask), cmk = complement(marker);
            EXPECT_EQ(reconstruct_by_erosion(cmk, cm, conn), complement(r));
        }
    }
}

TEST(OpenClose, Properties) {
    const GrayImage c(7, 5, 99.0);
    EXPECT_EQ(open_by_reconstruction(c, kSq1, Connectivity::Four), c);
    EXPECT_EQ(close_by_reconstruction(c, kSq1, Connectivity::Four), c);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const auto img = oracle::random_image(8, 8, 256, rng);
        const auto o = open_by_reconstruction(img, kSq1, Connectivity::Four);
        const auto cl = close_by_reconstruction(img, kSq1, Connectivity::Four);
        for (std::size_t i = 0; i < img.size(); ++i) {
            EXPECT_LE(o[i], img[i]);
            EXPECT_GE(cl[i], img[i]);
        }
        EXPECT_EQ(open_by_reconstruction(o, kSq1, Connectivity::Four), o);
        EXPECT_EQ(close_by_reconstruction(cl, kSq1, Connectivity::Four), cl);
        EXPECT_EQ(cl, complement(open_by_reconstruction(complement(img), kSq1, Connectivity::Four)));
        EXPECT_EQ(o, oracle::geodesic_reconstruct(oracle::window_op(img, kSq1, true), img, Connectivity::Four));
    }
}

TEST(FillHoles, Examples) {
    BinaryMask ring(5, 5, 0);
    for (int y = 1; y <= 3; ++y)
        for (int x = 1; x <= 3; ++x) ring(x, y) = !(x == 2 && y == 2);
    auto filled = fill_holes(ring, Connectivity::Four);
    EXPECT_EQ(filled(2, 2), 1);
    EXPECT_EQ(count_true(filled), 9u);

    const BinaryMask none(4, 4, 0);
    EXPECT_EQ(fill_holes(none, Connectivity::Four), none);

    // C shape: the gap at (2,1) connects the cavity to the outside ring of zeros
    BinaryMask c = ring;
    c(2, 1) = 0;
    EXPECT_EQ(fill_holes(c, Connectivity::Four), c);
}

TEST(FillHoles, IdempotentAndExtensive) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto m = oracle::random_mask(8, 8, 0.55, rng);
        const auto f = fill_holes(m, Connectivity::Four);
        EXPECT_EQ(fill_holes(f, Connectivity::Four), f);
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i]) EXPECT_TRUE(f[i]);
    }
}

TEST(RegionalMinima, Examples) {
    EXPECT_EQ(regional_minima(row({0, 1, 2, 1, 0}), Connectivity::Four), mrow({1, 0, 0, 0, 1}));
    EXPECT_EQ(regional_minima(row({1, 1, 2, 0, 2}), Connectivity::Four), mrow({1, 1, 0, 1, 0}));
    EXPECT_EQ(count_true(regional_minima(GrayImage(4, 3, 5.0), Connectivity::Eight)), 12u);
}

TEST(RegionalMinima, MatchesPlateauOracle) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 200; ++t) {
        const auto img = oracle::random_image(8, 8, 4, rng);
        for (auto conn : {Connectivity::Four, Connectivity::Eight})
            ASSERT_EQ(regional_minima(img, conn), oracle::brute_regional_minima(img, conn));
    }
}

TEST(ImposeMinima, Examples) {
    const auto out = impose_minima(row({5, 3, 5, 2, 5}), mrow({1, 0, 0, 0, 0}), Connectivity::Four);
    EXPECT_EQ(oracle::brute_regional_minima(out, Connectivity::Four), mrow({1, 0, 0, 0, 0}));

    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto img = oracle::random_image(8, 8, 256, rng);
        const auto m = regional_minima(img, Connectivity::Four);
        EXPECT_EQ(oracle::brute_regional_minima(impose_minima(img, m, Connectivity::Four), Connectivity::Four), m);
    }
    const BinaryMask all(3, 3, 1);
    EXPECT_EQ(count_true(regional_minima(impose_minima(GrayImage(3, 3, 9.0), all, Connectivity::Four),
                                         Connectivity::Four)),
              9u);
}

TEST(ImposeMinima, Errors) {
    EXPECT_ERROR_KIND(impose_minima(row({1, 2}), mrow({0, 0}), Connectivity::Four), ErrorKind::EmptyMarker);
    EXPECT_ERROR_KIND(impose_minima(row({1, 2}), mrow({1, 0, 0}), Connectivity::Four),
                      ErrorKind::DimensionMismatch);
}

TEST(DistanceTransform, Examples) {
    const BinaryMask all(4, 3, 1);
    EXPECT_EQ(distance_transform(all), GrayImage(4, 3, 0.0));
    const auto d = distance_transform(mrow({1, 0, 0, 0, 0, 0, 0}));
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(d[static_cast<std::size_t>(i)], i, 1e-12);
    BinaryMask one(3, 3, 0);
    one(0, 0) = 1;
    EXPECT_NEAR(distance_transform(one)(2, 2), std::sqrt(8.0), 1e-12);
    EXPECT_ERROR_KIND(distance_transform(BinaryMask(3, 3, 0)), ErrorKind::EmptyMask);
}

TEST(DistanceTransform, MatchesBruteForce) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 150; ++t) {
        const int w = 1 + static_cast<int>(rng() % 6), h = 1 + static_cast<int>(rng() % 6);
        auto m = oracle::random_mask(w, h, 0.15, rng);
        if (count_true(m) == 0) m(static_cast<int>(rng() % w), static_cast<int>(rng() % h)) = 1;
        const auto a = distance_transform(m), b = oracle::brute_edt(m);
        for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-6);
    }
}

TEST(Skiz, Examples) {
    BinaryMask single(5, 5, 0);
    single(1, 1) = single(1, 2) = 1;
    const auto s1 = skiz(single, Connectivity::Four);
    EXPECT_EQ(s1.labels, LabelMap(5, 5, 1));
    EXPECT_EQ(count_true(s1.boundary), 0u);

    const auto s2 = skiz(mrow({1, 0, 0, 0, 0, 0, 1}), Connectivity::Four);
    EXPECT_EQ(s2.labels.vec(), (std::vector<std::int32_t>{1, 1, 1, 0, 2, 2, 2}));
    EXPECT_TRUE(s2.boundary[3]);

    EXPECT_ERROR_KIND(skiz(BinaryMask(3, 3, 0), Connectivity::Four), ErrorKind::EmptyMask);
}

TEST(Skiz, MirrorSymmetricHalves) {
    BinaryMask m(6, 6, 0);
    for (int y = 1; y <= 4; ++y) m(0, y) = m(5, y) = 1;
    const auto s = skiz(m, Connectivity::Four);
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 6; ++x) {
            const auto a = s.labels(x, y), b = s.labels(5 - x, y);
            EXPECT_EQ(a == 0, b == 0);
            if (a) EXPECT_EQ(a, 3 - b);
        }
        // boundary hugs the midline between columns 2 and 3
        for (int x = 0; x < 6; ++x) EXPECT_EQ(s.boundary(x, y) != 0, x == 2 || x == 3) << x << "," << y;
    }
    // literal flooding of the marker-imposed distance map gives the same zones
    const auto lit = flooding_oracle(impose_minima(distance_transform(m), m, Connectivity::Four));
    EXPECT_EQ(lit.n_basins, 2);
    EXPECT_TRUE(oracle::same_partition(s.labels, lit.labels));
}

TEST(Skiz, ZonesConnectedWithOneMarkerEach) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 60; ++t) {
        const auto m = oracle::random_mask(12, 10, 0.04, rng);
        if (count_true(m) == 0) continue;
        const auto s = skiz(m, Connectivity::Four);
        auto [mc, nm] = label_components(m, Connectivity::Four);
        ASSERT_EQ(max_label(s.labels), nm);
        for (int k = 1; k <= nm; ++k) {
            BinaryMask zone(12, 10);
            for (std::size_t i = 0; i < zone.size(); ++i) zone[i] = s.labels[i] == k;
            EXPECT_EQ(label_components(zone, Connectivity::Four).second, 1);
            std::set<int> inside;
            for (std::size_t i = 0; i < zone.size(); ++i)
                if (zone[i] && mc[i]) inside.insert(mc[i]);
            EXPECT_EQ(inside.size(), 1u);
        }
    }
}
