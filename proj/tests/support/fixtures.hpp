#pragma once

#include <random>
#include <vector>

#include "proposalbench/box.hpp"
#include "proposalbench/image.hpp"
#include "proposalbench/segmentation.hpp"

namespace fixtures {

using proposalbench::BoundingBox;
using proposalbench::ImageBuffer;
using proposalbench::Rgb;
using proposalbench::SegmentationParams;

/// Fine segmentation for tiny images: every colour block becomes a segment.
inline SegmentationParams tiny_params() { return {0.3, 20, 1}; }

/// 6x6 images painted as a background plus one or two rectangles, using two
/// or three colours. Only images segmenting into 2..5 regions are kept.
inline std::vector<ImageBuffer> block_images(int count = 40) {
    const std::vector<Rgb> palette = {{20, 20, 20}, {230, 230, 230}, {200, 30, 30},
                                      {30, 160, 40}, {40, 60, 210}};
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(palette.size()) - 1);
    std::uniform_int_distribution<int> pos(0, 5);
    std::vector<ImageBuffer> out;
    for (int guard = 0; static_cast<int>(out.size()) < count && guard < 10000; ++guard) {
        const int n_rects = 1 + guard % 2;
        std::vector<Rgb> colors;
        while (static_cast<int>(colors.size()) < n_rects + 1) {
            const Rgb c = palette[pick(rng)];
            bool dup = false;
            for (const Rgb& d : colors) dup |= d == c;
            if (!dup) colors.push_back(c);
        }
        ImageBuffer img(6, 6, colors[0]);
        for (int r = 0; r < n_rects; ++r) {
            int x0 = pos(rng), x1 = pos(rng), y0 = pos(rng), y1 = pos(rng);
            if (x0 > x1) std::swap(x0, x1);
            if (y0 > y1) std::swap(y0, y1);
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) img.at(x, y) = colors[r + 1];
        }
        const int segments = proposalbench::felzenszwalb(img, tiny_params()).segment_count;
        if (segments >= 2 && segments <= 5) out.push_back(img);
    }
    return out;
}

/// 20x20 black image with a filled white 6x6 square at [7,13)x[7,13); its
/// gradient forms a closed square contour.
inline ImageBuffer square_contour() {
    ImageBuffer img(20, 20);
    for (int y = 7; y < 13; ++y)
        for (int x = 7; x < 13; ++x) img.at(x, y) = {255, 255, 255};
    return img;
}

inline BoundingBox enclosing_box() { return {3, 3, 14, 14}; }
inline BoundingBox straddling_box() { return {6, 3, 14, 14}; }
inline BoundingBox blank_box() { return {0, 0, 5, 5}; }

}  // namespace fixtures
