#pragma once

#include <cstddef>
#include <vector>

#include "proposalbench/box.hpp"
#include "proposalbench/image.hpp"
#include "proposalbench/segmentation.hpp"

namespace proposalbench {

struct SimilarityScore {
    double color = 0.0;
    double texture = 0.0;
    double size = 0.0;
    double fill = 0.0;
    double total = 0.0;
};

SimilarityScore region_similarity(const RegionStats& a, const RegionStats& b, long image_area);

/// Size-weighted union of two region descriptors. The result carries
/// `new_label`. A texture histogram flagged degenerate carries no weight.
RegionStats merge_regions(const RegionStats& a, const RegionStats& b, int new_label);

struct MergeEvent {
    int region_a;  ///< smaller label of the merged pair
    int region_b;
    int merged;
    double similarity;
};

struct GroupingResult {
    /// Bounding boxes of the initial regions followed by every merged region,
    /// exact duplicates removed, in order of first appearance.
    std::vector<BoundingBox> hypotheses;
    std::vector<MergeEvent> trace;
};

/// Greedy agglomeration: repeatedly merges the most similar adjacent pair
/// (ties go to the lexicographically smallest label pair) until no adjacent
/// pairs remain. `regions[i].label` must equal i. Merged regions get labels
/// regions.size(), regions.size()+1, ...
GroupingResult hierarchical_group(const std::vector<RegionStats>& regions,
                                  const Adjacency& adjacency, long image_area);

struct SelectiveSearchResult {
    ProposalSet proposals;
    std::size_t hypothesis_count = 0;  ///< before any cap
};

/// Hypotheses are scored by appearance rank: the i-th of n (0-based) gets
/// (i+1)/n, so later, higher-level merges rank first. `max_boxes == 0`
/// keeps every hypothesis.
SelectiveSearchResult selective_search_ranked(const ImageBuffer& img,
                                              const SegmentationParams& params,
                                              std::size_t max_boxes = 0);

ProposalSet selective_search(const ImageBuffer& img, const SegmentationParams& params,
                             std::size_t max_boxes = 0);

/// Unscored hypothesis boxes, in first-appearance order.
std::vector<BoundingBox> selective_search_hypotheses(const ImageBuffer& img,
                                                     const SegmentationParams& params);

}  // namespace proposalbench
