#pragma once

#include <cstddef>
#include <vector>

#include "proposalbench/box.hpp"
#include "proposalbench/image.hpp"

namespace proposalbench {

/// Gradient edges. Magnitudes are normalised to a maximum of 1 (or all zero)
/// and orientations are undirected, in [0, pi).
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<double> magnitude;
    std::vector<double> orientation;

    double mag(int x, int y) const { return magnitude[static_cast<std::size_t>(y) * width + x]; }
    double angle(int x, int y) const { return orientation[static_cast<std::size_t>(y) * width + x]; }
};

struct PixelPos {
    int x;
    int y;
    bool operator==(const PixelPos&) const = default;
};

/// A chain of 8-connected edge pixels with bounded orientation change.
struct EdgeGroup {
    int id = 0;
    std::vector<PixelPos> pixels;
    double mean_x = 0.0;  ///< magnitude weighted
    double mean_y = 0.0;
    double mean_orientation = 0.0;  ///< circular mean, mod pi
    double mass = 0.0;              ///< sum of member magnitudes
    BoundingBox bbox;               ///< tight box around pixels
};

struct EdgeBoxParams {
    std::size_t n_boxes = 100;
    double edge_threshold = 0.1;     ///< tau, fraction of max magnitude
    double affinity_gamma = 2.0;
    double affinity_radius = 2.0;    ///< pixels between group mean positions
    double chain_cutoff = 0.05;
    double alpha = 0.65;             ///< IoU between neighbouring sliding windows
    double min_box_side_fraction = 0.1;
    double kappa = 1.5;              ///< perimeter normalisation exponent
    double beta = 0.75;              ///< NMS IoU threshold

    void validate() const;
    /// Seven ratios w/h spaced geometrically from 1/3 to 3.
    static std::vector<double> aspect_ratios();
};

/// Sobel on luminance (0.299R + 0.587G + 0.114B) with edge replication.
/// Pixels whose normalised magnitude is below `threshold` are zeroed.
EdgeMap detect_edges(const ImageBuffer& img, double threshold = 0.1);

/// Greedy grouping in scan order. A group grows from its seed by repeatedly
/// absorbing the unassigned 8-neighbour whose orientation differs least from
/// the member that reached it; growth stops once the accumulated difference
/// would reach pi/2.
std::vector<EdgeGroup> group_edges(const EdgeMap& edges);

double group_affinity(const EdgeGroup& a, const EdgeGroup& b, const EdgeBoxParams& params);

struct AffinityLink {
    int to;
    double affinity;
};

/// Edge groups plus their nonzero pairwise affinities.
struct EdgeGraph {
    int width = 0;
    int height = 0;
    std::vector<EdgeGroup> groups;
    std::vector<std::vector<AffinityLink>> links;  ///< indexed by group id
};

EdgeGraph build_edge_graph(const EdgeMap& edges, const EdgeBoxParams& params);
EdgeGraph build_edge_graph(const ImageBuffer& img, const EdgeBoxParams& params);

/// Sum of w * mass over groups strictly inside the box (not touching its
/// border pixels), where w = 1 - (best affinity chain to any group that is not
/// inside), divided by (2 (w + h))^kappa.
double score_box(const BoundingBox& box, const EdgeGraph& graph, const EdgeBoxParams& params);

/// Sliding windows over aspect ratios and geometric scales, plus the
/// full-image box. Every candidate lies inside the image.
std::vector<BoundingBox> generate_candidates(int width, int height, const EdgeBoxParams& params);

/// Greedy suppression on a ranked list. Stops early once `limit` boxes are
/// kept (0 = no limit). Throws ParameterError on unsorted input.
std::vector<ScoredBox> nms(const std::vector<ScoredBox>& ranked, double beta, std::size_t limit = 0);

/// Scores `boxes`, ranks, suppresses and truncates to params.n_boxes.
std::vector<ScoredBox> rank_boxes(const std::vector<BoundingBox>& boxes, const EdgeGraph& graph,
                                  const EdgeBoxParams& params, std::size_t n_boxes);

struct EdgeBoxesResult {
    ProposalSet proposals;
    std::size_t boxes_scored = 0;
};

EdgeBoxesResult edgeboxes_ranked(const ImageBuffer& img, const EdgeBoxParams& params);
ProposalSet edgeboxes(const ImageBuffer& img, const EdgeBoxParams& params);

}  // namespace proposalbench
