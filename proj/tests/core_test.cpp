#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "proposalbench/box.hpp"
#include "proposalbench/errors.hpp"
#include "proposalbench/image.hpp"

using namespace proposalbench;
namespace fs = std::filesystem;

namespace {

// Pixel-count reference: marks both boxes on a grid and counts cells.
struct PixelCounts {
    long inter = 0;
    long uni = 0;
};

PixelCounts count_pixels(const BoundingBox& a, const BoundingBox& b, int grid) {
    PixelCounts c;
    for (int y = 0; y < grid; ++y) {
        for (int x = 0; x < grid; ++x) {
            const bool in_a = a.contains(x, y);
            const bool in_b = b.contains(x, y);
            c.inter += in_a && in_b;
            c.uni += in_a || in_b;
        }
    }
    return c;
}

BoundingBox random_box(std::mt19937& rng, int grid) {
    std::uniform_int_distribution<int> coord(0, grid - 1);
    const int x0 = coord(rng);
    const int y0 = coord(rng);
    std::uniform_int_distribution<int> wd(1, grid - x0);
    std::uniform_int_distribution<int> hd(1, grid - y0);
    return {x0, y0, wd(rng), hd(rng)};
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

fs::path write_temp(const std::string& name, const std::vector<std::uint8_t>& bytes) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return p;
}

}  // namespace

TEST(Iou, DisjointIdenticalAndHalfOverlap) {
    EXPECT_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
    EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
    EXPECT_EQ(box_intersection_area({0, 0, 10, 10}, {5, 0, 10, 10}), 50);
    EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
}

TEST(Iou, TouchingEdgesDoNotOverlap) {
    EXPECT_EQ(box_intersection_area({0, 0, 4, 4}, {4, 0, 4, 4}), 0);
    EXPECT_EQ(iou({0, 0, 4, 4}, {0, 4, 4, 4}), 0.0);
}

TEST(Iou, ContainedBox) {
    EXPECT_DOUBLE_EQ(iou({0, 0, 10, 10}, {2, 2, 5, 5}), 25.0 / 100.0);
}

TEST(Iou, MatchesPixelCountOnRandomPairs) {
    std::mt19937 rng(1234);
    for (int i = 0; i < 1000; ++i) {
        const BoundingBox a = random_box(rng, 64);
        const BoundingBox b = random_box(rng, 64);
        const PixelCounts c = count_pixels(a, b, 64);
        ASSERT_EQ(box_intersection_area(a, b), c.inter);
        ASSERT_NEAR(iou(a, b), static_cast<double>(c.inter) / static_cast<double>(c.uni), 1e-12);
    }
}

TEST(Iou, SymmetricAndBoundedOverAllBoxesOnSmallGrid) {
    std::vector<BoundingBox> all;
    for (int x = 0; x < 6; ++x)
        for (int y = 0; y < 6; ++y)
            for (int w = 1; x + w <= 6; ++w)
                for (int h = 1; y + h <= 6; ++h) all.push_back({x, y, w, h});
    for (const BoundingBox& a : all) {
        ASSERT_EQ(iou(a, a), 1.0);
        for (const BoundingBox& b : all) {
            const double v = iou(a, b);
            ASSERT_EQ(v, iou(b, a));
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
    }
}

TEST(Box, UnionCoversBoth) {
    const BoundingBox u = box_union({2, 3, 4, 5}, {10, 1, 2, 2});
    EXPECT_EQ(u, (BoundingBox{2, 1, 10, 7}));
}

TEST(Proposals, SortOrdersByScoreThenCoordinates) {
    std::vector<ScoredBox> v = {
        {{5, 0, 2, 2}, 0.5}, {{1, 0, 2, 2}, 0.5}, {{0, 0, 1, 1}, 0.9}, {{1, 0, 2, 2}, 0.5}};
    sort_proposals(v);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].box, (BoundingBox{0, 0, 1, 1}));
    EXPECT_EQ(v[1].box, (BoundingBox{1, 0, 2, 2}));
    EXPECT_EQ(v[2].box, (BoundingBox{5, 0, 2, 2}));
    ProposalSet set{"img", v};
    EXPECT_TRUE(set.is_sorted());
    std::swap(set.boxes[0], set.boxes[2]);
    EXPECT_FALSE(set.is_sorted());
}

TEST(Proposals, SortIsIdempotent) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> score(0, 3);
    std::vector<ScoredBox> v;
    for (int i = 0; i < 200; ++i) v.push_back({random_box(rng, 16), score(rng) / 4.0});
    sort_proposals(v);
    std::vector<ScoredBox> again = v;
    sort_proposals(again);
    EXPECT_EQ(v, again);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_TRUE(ranks_before(v[i - 1], v[i]));
}

TEST(Image, ConstructorRejectsBadShapes) {
    EXPECT_THROW(ImageBuffer(0, 3), ParameterError);
    EXPECT_THROW(ImageBuffer(2, 2, std::vector<Rgb>(3)), ParameterError);
}

TEST(Ppm, DecodesTwoByTwoRed) {
    std::string s = "P6\n# comment\n2 2\n255\n";
    for (int i = 0; i < 4; ++i) s += std::string("\xff\x00\x00", 3);
    const ImageBuffer img = decode_ppm(bytes_of(s));
    ASSERT_EQ(img.width(), 2);
    ASSERT_EQ(img.height(), 2);
    for (const Rgb& p : img.pixels()) EXPECT_EQ(p, (Rgb{255, 0, 0}));
}

TEST(Ppm, SixteenBitSamplesAreRescaled) {
    std::string s = "P6 1 1 65535\n";
    s += std::string("\xff\xff\x00\x00\x80\x00", 6);
    const ImageBuffer img = decode_ppm(bytes_of(s));
    EXPECT_EQ(img.at(0, 0)[0], 255);
    EXPECT_EQ(img.at(0, 0)[1], 0);
    EXPECT_EQ(img.at(0, 0)[2], 128);
}

TEST(Ppm, MalformedInputsThrow) {
    EXPECT_THROW(decode_ppm(bytes_of("P6\n2 2\n255\n\xff\xff")), DecodeError);
    EXPECT_THROW(decode_ppm(bytes_of("P6\n0 2\n255\n")), DecodeError);
    EXPECT_THROW(decode_ppm(bytes_of("P3\n1 1\n255\n0 0 0")), DecodeError);
    EXPECT_THROW(decode_ppm(bytes_of("P6\n1 1\n")), DecodeError);
}

TEST(Ppm, EncodeDecodeRoundTrip) {
    ImageBuffer img(3, 2, Rgb{1, 2, 3});
    img.at(2, 1) = {200, 100, 50};
    EXPECT_EQ(decode_ppm(encode_ppm(img)), img);
}

TEST(Png, GrayscaleIsReplicatedAcrossChannels) {
    // 1x1 8-bit grayscale white, built by hand.
    const std::vector<std::uint8_t> png = {
        0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
        0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x00, 0x00, 0x00,
        0x00, 0x3a, 0x7e, 0x9b, 0x55, 0x00, 0x00, 0x00, 0x0a, 0x49, 0x44, 0x41, 0x54, 0x78,
        0x9c, 0x63, 0xf8, 0x0f, 0x00, 0x01, 0x01, 0x01, 0x00, 0xb1, 0x38, 0xf6, 0x14, 0x00,
        0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
    const fs::path p = write_temp("pb_gray.png", png);
    const ImageBuffer img = load_image(p);
    fs::remove(p);
    ASSERT_EQ(img.width(), 1);
    ASSERT_EQ(img.height(), 1);
    EXPECT_EQ(img.at(0, 0), (Rgb{255, 255, 255}));
}

TEST(Png, EncodeLoadRoundTrip) {
    std::vector<Rgb> px;
    for (int i = 0; i < 12; ++i) px.push_back({static_cast<std::uint8_t>(i * 20), 7, static_cast<std::uint8_t>(255 - i)});
    const ImageBuffer img(4, 3, px);
    const fs::path p = write_temp("pb_rt.dat", encode_png(img));
    const ImageBuffer back = load_image(p);
    fs::remove(p);
    EXPECT_EQ(back, img);
}

TEST(LoadImage, FormatIsDetectedByContent) {
    const ImageBuffer img(2, 1, Rgb{9, 8, 7});
    const fs::path p = write_temp("pb_ppm.png", encode_ppm(img));
    EXPECT_EQ(load_image(p), img);
    fs::remove(p);
}

TEST(LoadImage, MissingAndCorruptFilesThrow) {
    EXPECT_THROW(load_image("/nonexistent/pb_missing.png"), IoError);
    const fs::path p = write_temp("pb_junk.png", bytes_of("not an image"));
    EXPECT_THROW(load_image(p), DecodeError);
    std::vector<std::uint8_t> truncated = encode_png(ImageBuffer(8, 8, Rgb{1, 1, 1}));
    truncated.resize(truncated.size() / 2);
    const fs::path q = write_temp("pb_trunc.png", truncated);
    EXPECT_THROW(load_image(q), DecodeError);
    fs::remove(p);
    fs::remove(q);
}
