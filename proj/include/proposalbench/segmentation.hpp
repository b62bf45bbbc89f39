#pragma once

#include <array>
#include <utility>
#include <vector>

#include "proposalbench/box.hpp"
#include "proposalbench/image.hpp"

namespace proposalbench {

struct SegmentationParams {
    double sigma = 1.4;     ///< Gaussian pre-smoothing std-dev, pixels.
    double k = 1800.0;      ///< Scale of observation; larger k gives larger segments.
    int min_size = 1800;    ///< Components below this pixel count are merged away.

    void validate() const;
};

/// Per-pixel segment ids, row-major, contiguous in 0..segment_count-1.
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    int segment_count = 0;

    int at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    bool operator==(const LabelMap&) const = default;
};

inline constexpr int kColorBinsPerChannel = 25;
inline constexpr int kColorHistSize = 3 * kColorBinsPerChannel;
inline constexpr int kTextureBinsPerChannel = 8;
inline constexpr int kTextureHistSize = 3 * kTextureBinsPerChannel;

using ColorHistogram = std::array<double, kColorHistSize>;
using TextureHistogram = std::array<double, kTextureHistSize>;

/// Descriptor of one segment (or of a union of segments during grouping).
struct RegionStats {
    int label = 0;
    long size = 0;
    BoundingBox bbox;
    ColorHistogram color_hist{};
    TextureHistogram texture_hist{};
    /// Set when the region has no gradient energy; texture_hist is then all zero.
    bool texture_degenerate = false;
};

/// Label pairs (lo < hi) sharing a 4-connected border; sorted, unique.
using Adjacency = std::vector<std::pair<int, int>>;

struct RegionAnalysis {
    std::vector<RegionStats> regions;  ///< Indexed by label.
    Adjacency adjacency;
};

/// 1-D kernel of radius ceil(4 sigma), normalised to unit sum.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur per channel with edge replication at the borders.
FloatImage gaussian_smooth(const ImageBuffer& img, double sigma);

/// Graph-based segmentation over the 8-connected pixel grid with Euclidean
/// RGB edge weights on the smoothed image.
LabelMap felzenszwalb(const ImageBuffer& img, const SegmentationParams& params);

/// Colour and texture descriptors of every segment, computed on the
/// unsmoothed image, plus the 4-connected adjacency relation.
RegionAnalysis region_stats(const LabelMap& labels, const ImageBuffer& img);

}  // namespace proposalbench
