#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>

#include "proposalbench/errors.hpp"
#include "proposalbench/selective_search.hpp"
#include "support/fixtures.hpp"
#include "support/ss_oracle.hpp"

using namespace proposalbench;

namespace {

RegionStats region(int label, long size, BoundingBox box, int color_bin, int texture_bin = -1) {
    RegionStats r;
    r.label = label;
    r.size = size;
    r.bbox = box;
    for (int c = 0; c < 3; ++c) r.color_hist[c * kColorBinsPerChannel + color_bin] = 1.0 / 3.0;
    if (texture_bin < 0) {
        r.texture_degenerate = true;
    } else {
        r.texture_hist[texture_bin] = 1.0;
    }
    return r;
}

RegionAnalysis analyse(const ImageBuffer& img, const SegmentationParams& p) {
    return region_stats(felzenszwalb(img, p), img);
}

ImageBuffer noise_blocks(std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> v(0, 255);
    ImageBuffer img(24, 24);
    for (int by = 0; by < 24; by += 6) {
        for (int bx = 0; bx < 24; bx += 6) {
            const Rgb c{static_cast<std::uint8_t>(v(rng)), static_cast<std::uint8_t>(v(rng)),
                        static_cast<std::uint8_t>(v(rng))};
            for (int y = by; y < by + 6; ++y)
                for (int x = bx; x < bx + 6; ++x) img.at(x, y) = c;
        }
    }
    return img;
}

}  // namespace

TEST(Similarity, IdenticalHalvesThatTileTheImage) {
    const RegionStats a = region(0, 50, {0, 0, 5, 10}, 3, 1);
    const RegionStats b = region(1, 50, {5, 0, 5, 10}, 3, 1);
    const SimilarityScore s = region_similarity(a, b, 100);
    EXPECT_DOUBLE_EQ(s.color, 1.0);
    EXPECT_DOUBLE_EQ(s.texture, 1.0);
    EXPECT_DOUBLE_EQ(s.size, 0.0);
    EXPECT_DOUBLE_EQ(s.fill, 1.0);
    EXPECT_DOUBLE_EQ(s.total, 3.0);
}

TEST(Similarity, DisjointHistogramsAndGappedBoxes) {
    const RegionStats a = region(0, 4, {0, 0, 2, 2}, 0, 0);
    const RegionStats b = region(1, 4, {8, 8, 2, 2}, 24, 5);
    const SimilarityScore s = region_similarity(a, b, 100);
    EXPECT_EQ(s.color, 0.0);
    EXPECT_EQ(s.texture, 0.0);
    EXPECT_DOUBLE_EQ(s.size, 1.0 - 8.0 / 100.0);
    EXPECT_DOUBLE_EQ(s.fill, 1.0 - (100.0 - 8.0) / 100.0);
}

TEST(Similarity, IsSymmetric) {
    const RegionAnalysis a = analyse(noise_blocks(3), {0.5, 50, 1});
    for (const auto& [p, q] : a.adjacency) {
        const SimilarityScore s1 = region_similarity(a.regions[p], a.regions[q], 576);
        const SimilarityScore s2 = region_similarity(a.regions[q], a.regions[p], 576);
        EXPECT_EQ(s1.total, s2.total);
        EXPECT_GE(s1.total, 0.0);
        EXPECT_LE(s1.total, 4.0);
    }
}

TEST(MergeRegions, SizeWeightedAverage) {
    const RegionStats a = region(0, 30, {0, 0, 3, 10}, 2, 0);
    const RegionStats b = region(1, 10, {3, 0, 1, 10}, 7, 4);
    const RegionStats m = merge_regions(a, b, 9);
    EXPECT_EQ(m.label, 9);
    EXPECT_EQ(m.size, 40);
    EXPECT_EQ(m.bbox, (BoundingBox{0, 0, 4, 10}));
    EXPECT_DOUBLE_EQ(m.color_hist[2], 0.75 / 3.0);
    EXPECT_DOUBLE_EQ(m.color_hist[7], 0.25 / 3.0);
    EXPECT_DOUBLE_EQ(m.texture_hist[0], 0.75);
    EXPECT_DOUBLE_EQ(m.texture_hist[4], 0.25);
    EXPECT_FALSE(m.texture_degenerate);
}

TEST(MergeRegions, DegenerateTextureCarriesNoWeight) {
    const RegionStats a = region(0, 30, {0, 0, 3, 10}, 2);
    const RegionStats b = region(1, 10, {3, 0, 1, 10}, 7, 4);
    const RegionStats m = merge_regions(a, b, 2);
    EXPECT_DOUBLE_EQ(m.texture_hist[4], 1.0);
    EXPECT_FALSE(m.texture_degenerate);
    EXPECT_TRUE(merge_regions(a, a, 3).texture_degenerate);
}

TEST(MergeRegions, HistogramsStayNormalisedThroughChains) {
    const RegionAnalysis a = analyse(noise_blocks(11), {0.5, 50, 1});
    RegionStats acc = a.regions[0];
    for (std::size_t i = 1; i < a.regions.size(); ++i) {
        acc = merge_regions(acc, a.regions[i], static_cast<int>(a.regions.size() + i));
        EXPECT_NEAR(std::accumulate(acc.color_hist.begin(), acc.color_hist.end(), 0.0), 1.0, 1e-12);
        if (!acc.texture_degenerate) {
            EXPECT_NEAR(std::accumulate(acc.texture_hist.begin(), acc.texture_hist.end(), 0.0), 1.0, 1e-12);
        }
    }
}

TEST(HierarchicalGroup, TwoTilingRegions) {
    const std::vector<RegionStats> regions = {region(0, 50, {0, 0, 5, 10}, 3),
                                              region(1, 50, {5, 0, 5, 10}, 9)};
    const GroupingResult g = hierarchical_group(regions, {{0, 1}}, 100);
    ASSERT_EQ(g.trace.size(), 1u);
    EXPECT_EQ(g.trace[0].region_a, 0);
    EXPECT_EQ(g.trace[0].region_b, 1);
    EXPECT_EQ(g.trace[0].merged, 2);
    EXPECT_EQ(g.hypotheses, (std::vector<BoundingBox>{{0, 0, 5, 10}, {5, 0, 5, 10}, {0, 0, 10, 10}}));
}

TEST(HierarchicalGroup, SingleRegionHasNoMerges) {
    const GroupingResult g = hierarchical_group({region(0, 100, {0, 0, 10, 10}, 1)}, {}, 100);
    EXPECT_TRUE(g.trace.empty());
    EXPECT_EQ(g.hypotheses.size(), 1u);
}

TEST(HierarchicalGroup, TiesGoToSmallestPair) {
    // Three identical strips: pairs (0,1) and (1,2) tie exactly.
    const std::vector<RegionStats> regions = {region(0, 10, {0, 0, 1, 10}, 4),
                                              region(1, 10, {1, 0, 1, 10}, 4),
                                              region(2, 10, {2, 0, 1, 10}, 4)};
    const GroupingResult g = hierarchical_group(regions, {{0, 1}, {1, 2}}, 30);
    ASSERT_EQ(g.trace.size(), 2u);
    EXPECT_EQ(g.trace[0].region_a, 0);
    EXPECT_EQ(g.trace[0].region_b, 1);
    EXPECT_EQ(g.trace[1].region_a, 2);
    EXPECT_EQ(g.trace[1].region_b, 3);
}

TEST(HierarchicalGroup, RejectsBadInput) {
    std::vector<RegionStats> regions = {region(0, 1, {0, 0, 1, 1}, 0), region(5, 1, {1, 0, 1, 1}, 0)};
    EXPECT_THROW(hierarchical_group(regions, {{0, 1}}, 2), ParameterError);
    regions[1].label = 1;
    EXPECT_THROW(hierarchical_group(regions, {{0, 7}}, 2), ParameterError);
}

TEST(HierarchicalGroup, MatchesGreedyOracleOnBlockImages) {
    const std::vector<ImageBuffer> images = fixtures::block_images();
    ASSERT_GE(images.size(), 20u);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const RegionAnalysis a = analyse(images[i], fixtures::tiny_params());
        const GroupingResult g = hierarchical_group(a.regions, a.adjacency, 36);
        const oracle::Result ref = oracle::greedy_grouping(a.regions, a.adjacency, 36);
        const std::set<BoundingBox> got(g.hypotheses.begin(), g.hypotheses.end());
        EXPECT_EQ(got, ref.boxes) << "image " << i;
        ASSERT_EQ(g.trace.size(), ref.merges.size());
        for (std::size_t m = 0; m < g.trace.size(); ++m) {
            EXPECT_EQ(g.trace[m].region_a, ref.merges[m].a);
            EXPECT_EQ(g.trace[m].region_b, ref.merges[m].b);
        }
    }
}

TEST(HierarchicalGroup, MatchesGreedyOracleOnBlockNoise) {
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
        const RegionAnalysis a = analyse(noise_blocks(seed), {0.5, 50, 1});
        const GroupingResult g = hierarchical_group(a.regions, a.adjacency, 576);
        const oracle::Result ref = oracle::greedy_grouping(a.regions, a.adjacency, 576);
        EXPECT_EQ(std::set<BoundingBox>(g.hypotheses.begin(), g.hypotheses.end()), ref.boxes);
    }
}

TEST(HierarchicalGroup, HypothesesAreUnionBoxesOfInitialSegments) {
    for (std::uint32_t seed = 20; seed < 25; ++seed) {
        const RegionAnalysis a = analyse(noise_blocks(seed), {0.5, 50, 1});
        const GroupingResult g = hierarchical_group(a.regions, a.adjacency, 576);
        const std::size_t n = a.regions.size();
        // Members of every merged label, rebuilt from the trace.
        std::map<int, std::vector<int>> members;
        for (std::size_t i = 0; i < n; ++i) members[static_cast<int>(i)] = {static_cast<int>(i)};
        std::set<BoundingBox> expected;
        for (const RegionStats& r : a.regions) expected.insert(r.bbox);
        for (const MergeEvent& e : g.trace) {
            std::vector<int> m = members[e.region_a];
            m.insert(m.end(), members[e.region_b].begin(), members[e.region_b].end());
            members[e.merged] = m;
            BoundingBox box = a.regions[m[0]].bbox;
            for (int l : m) box = box_union(box, a.regions[l].bbox);
            expected.insert(box);
        }
        EXPECT_EQ(std::set<BoundingBox>(g.hypotheses.begin(), g.hypotheses.end()), expected);
        // The grid of blocks is connected, so grouping ends in one region.
        EXPECT_EQ(g.trace.size(), n - 1);
        EXPECT_LE(g.hypotheses.size(), 2 * n - 1);
        EXPECT_EQ(g.hypotheses.back(), (BoundingBox{0, 0, 24, 24}));
    }
}

TEST(SelectiveSearch, UniformImageGivesFullImageBox) {
    const ProposalSet p = selective_search(ImageBuffer(12, 9, Rgb{50, 60, 70}), {0.5, 10, 1});
    ASSERT_EQ(p.boxes.size(), 1u);
    EXPECT_EQ(p.boxes[0].box, (BoundingBox{0, 0, 12, 9}));
    EXPECT_DOUBLE_EQ(p.boxes[0].score, 1.0);
}

TEST(SelectiveSearch, HalvesAndWhole) {
    ImageBuffer img(10, 10);
    for (int y = 0; y < 10; ++y)
        for (int x = 5; x < 10; ++x) img.at(x, y) = {255, 255, 255};
    const SelectiveSearchResult r = selective_search_ranked(img, {0.1, 1, 1});
    ASSERT_EQ(r.hypothesis_count, 3u);
    const auto& b = r.proposals.boxes;
    EXPECT_EQ(b[0].box, (BoundingBox{0, 0, 10, 10}));
    EXPECT_DOUBLE_EQ(b[0].score, 1.0);
    EXPECT_DOUBLE_EQ(b[1].score, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(b[2].score, 1.0 / 3.0);
}

TEST(SelectiveSearch, CapSortedBoundsAndDeterminism) {
    const ImageBuffer img = noise_blocks(42);
    const SelectiveSearchResult all = selective_search_ranked(img, {0.5, 50, 1});
    EXPECT_TRUE(all.proposals.is_sorted());
    EXPECT_EQ(all.proposals.boxes.size(), all.hypothesis_count);
    for (const ScoredBox& b : all.proposals.boxes) EXPECT_TRUE(b.box.fits(24, 24));
    const SelectiveSearchResult capped = selective_search_ranked(img, {0.5, 50, 1}, 5);
    ASSERT_EQ(capped.proposals.boxes.size(), 5u);
    EXPECT_EQ(capped.hypothesis_count, all.hypothesis_count);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(capped.proposals.boxes[i], all.proposals.boxes[i]);
    EXPECT_EQ(selective_search(img, {0.5, 50, 1}).boxes, all.proposals.boxes);
}
