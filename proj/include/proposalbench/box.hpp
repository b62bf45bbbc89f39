#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace proposalbench {

/// Axis-aligned integer box covering the half-open pixel range
/// [x, x+w) x [y, y+h).
struct BoundingBox {
    int x = 0;
    int y = 0;
    int w = 1;
    int h = 1;

    std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
    int right() const { return x + w; }
    int bottom() const { return y + h; }

    bool contains(int px, int py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
    bool fits(int width, int height) const {
        return x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= width && y + h <= height;
    }

    auto operator<=>(const BoundingBox&) const = default;
};

/// Smallest box containing both arguments.
BoundingBox box_union(const BoundingBox& a, const BoundingBox& b);

std::int64_t box_intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union. Areas are exact integers; only the final ratio is
/// floating point.
double iou(const BoundingBox& a, const BoundingBox& b);

struct ScoredBox {
    BoundingBox box;
    double score = 0.0;

    bool operator==(const ScoredBox&) const = default;
};

/// Proposal ranking: score descending, then (x, y, w, h) ascending.
bool ranks_before(const ScoredBox& a, const ScoredBox& b);

/// Sorts in ranking order and drops exact (box, score) duplicates.
void sort_proposals(std::vector<ScoredBox>& boxes);

struct ProposalSet {
    std::string image_id;
    std::vector<ScoredBox> boxes;

    bool is_sorted() const;
};

}  // namespace proposalbench
