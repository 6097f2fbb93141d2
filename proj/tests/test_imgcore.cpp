#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "sacseg/io.hpp"
#include "tests_common.hpp"

using namespace sacseg;
namespace fs = std::filesystem;

TEST(Neighbors, CornerFour) {
    const auto n = neighbors(0, 0, 3, 3, Connectivity::Four);
    // (x,y): S then E
    EXPECT_EQ(n, (std::vector<Point>{{0, 1}, {1, 0}}));
}

TEST(Neighbors, InteriorEight) {
    const auto n = neighbors(1, 1, 3, 3, Connectivity::Eight);
    ASSERT_EQ(n.size(), 8u);
    EXPECT_EQ(n, (std::vector<Point>{{1, 0}, {1, 2}, {0, 1}, {2, 1}, {0, 0}, {2, 0}, {0, 2}, {2, 2}}));
}

TEST(Neighbors, OnePixelWideStrip) {
    // 1 column x 3 rows, middle pixel
    const auto n = neighbors(0, 1, 1, 3, Connectivity::Four);
    EXPECT_EQ(n, (std::vector<Point>{{0, 0}, {0, 2}}));
}

TEST(Neighbors, NeverOutOfBoundsOrCenter) {
    for (int w = 1; w <= 4; ++w)
        for (int h = 1; h <= 4; ++h)
            for (auto conn : {Connectivity::Four, Connectivity::Eight})
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x) {
                        const auto n = neighbors(x, y, w, h, conn);
                        EXPECT_LE(n.size(), conn == Connectivity::Four ? 4u : 8u);
                        for (auto p : n) {
                            EXPECT_TRUE(p.x >= 0 && p.y >= 0 && p.x < w && p.y < h);
                            EXPECT_FALSE(p.x == x && p.y == y);
                        }
                    }
}

TEST(Grid, RejectsZeroAndMismatch) {
    EXPECT_THROW(GrayImage(0, 3), Error);
    try {
        GrayImage(2, 2, std::vector<double>{1, 2, 3});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(ReadGray, AsciiPgm) {
    const std::string text = "P2\n2 2\n255\n0 255 128 64";
    const auto img = parse_pgm(std::vector<std::uint8_t>(text.begin(), text.end()));
    EXPECT_EQ(img.width(), 2);
    EXPECT_EQ(img.height(), 2);
    EXPECT_EQ(img.vec(), (std::vector<double>{0, 255, 128, 64}));
}

TEST(ReadGray, SinglePixel) {
    TempDir dir;
    const auto p = dir.path / "one.pgm";
    std::ofstream(p) << "P2\n# comment\n1 1\n255\n7\n";
    const auto img = read_gray(p);
    EXPECT_EQ(img.width(), 1);
    EXPECT_EQ(img.vec(), std::vector<double>{7});
}

TEST(ReadGray, SixteenBitRescaled) {
    const std::vector<std::uint8_t> bytes = [] {
        std::string h = "P5\n2 1\n65535\n";
        std::vector<std::uint8_t> b(h.begin(), h.end());
        b.insert(b.end(), {0xff, 0xff, 0x80, 0x00});
        return b;
    }();
    const auto img = parse_pgm(bytes);
    EXPECT_DOUBLE_EQ(img[0], 255.0);
    EXPECT_DOUBLE_EQ(img[1], 32768.0 * 255.0 / 65535.0);
}

TEST(ReadGray, RgbPngRejected) {
    TempDir dir;
    const auto p = dir.path / "rgb.png";
    write_label_png(LabelMap(2, 2, 1), p);  // writes an RGB PNG
    try {
        read_gray(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedFormat);
    }
}

TEST(ReadGray, Errors) {
    TempDir dir;
    EXPECT_ERROR_KIND(read_gray(dir.path / "missing.pgm"), ErrorKind::FileNotFound);
    const auto bad = dir.path / "bad.pgm";
    std::ofstream(bad) << "P7\n1 1\n255\n0";
    EXPECT_ERROR_KIND(read_gray(bad), ErrorKind::UnsupportedFormat);
    const auto zero = dir.path / "zero.pgm";
    std::ofstream(zero) << "P2\n0 3\n255\n";
    EXPECT_ERROR_KIND(read_gray(zero), ErrorKind::ZeroDimension);
}

TEST(ReadGray, RoundTripEightBit) {
    TempDir dir;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(0, 255);
    GrayImage img(13, 7);
    for (auto& v : img.pixels()) v = d(rng);
    write_gray_pgm(img, dir.path / "a.pgm");
    write_gray_png(img, dir.path / "a.png");
    EXPECT_EQ(read_gray(dir.path / "a.pgm"), img);
    EXPECT_EQ(read_gray(dir.path / "a.png"), img);
}

TEST(LabelPng, ZerosAreWhite) {
    TempDir dir;
    write_label_png(LabelMap(3, 2, 0), dir.path / "z.png");
    const auto rgb = read_png_raw(dir.path / "z.png");
    ASSERT_EQ(rgb.channels, 3);
    for (auto v : rgb.data) EXPECT_EQ(v, 255);
}

TEST(LabelPng, DistinctColoursAndDeterminism) {
    TempDir dir;
    const LabelMap lm(2, 1, std::vector<std::int32_t>{1, 2});
    write_label_png(lm, dir.path / "a.png");
    write_label_png(lm, dir.path / "b.png");
    const auto a = read_png_raw(dir.path / "a.png");
    const auto b = read_png_raw(dir.path / "b.png");
    EXPECT_EQ(a.data, b.data);
    EXPECT_NE(std::vector<std::uint8_t>(a.data.begin(), a.data.begin() + 3),
              std::vector<std::uint8_t>(a.data.begin() + 3, a.data.end()));
    EXPECT_EQ(read_bytes(dir.path / "a.png"), read_bytes(dir.path / "b.png"));
}

TEST(LabelPng, ColourIsPureFunctionOfLabel) {
    for (int k = 0; k < 100; ++k) EXPECT_EQ(label_color(k), label_color(k));
    EXPECT_EQ(label_color(0), (Rgb{255, 255, 255}));
    EXPECT_EQ(label_color(1), label_color(21));  // palette of 20
}

TEST(LabelPgm, RoundTripAndRange) {
    TempDir dir;
    const LabelMap lm(3, 1, std::vector<std::int32_t>{0, 300, 65535});
    write_label_pgm(lm, dir.path / "l.pgm");
    EXPECT_EQ(read_label_pgm(dir.path / "l.pgm"), lm);
    EXPECT_ERROR_KIND(write_label_pgm(LabelMap(1, 1, 65536), dir.path / "x.pgm"), ErrorKind::RangeError);
}

TEST(LabelPng, UnwritablePath) {
    EXPECT_ERROR_KIND(write_label_png(LabelMap(1, 1, 1), "/nonexistent-dir/x/y.png"), ErrorKind::IoError);
}

TEST(Components, RasterOrder) {
    const BinaryMask m(4, 2, std::vector<std::uint8_t>{0, 1, 0, 1, 1, 0, 0, 1});
    auto [lab, n] = label_components(m, Connectivity::Four);
    EXPECT_EQ(n, 3);
    EXPECT_EQ(lab.vec(), (std::vector<std::int32_t>{0, 1, 0, 2, 3, 0, 0, 2}));
    auto [lab8, n8] = label_components(m, Connectivity::Eight);
    EXPECT_EQ(n8, 2);
}
