#include "proposalbench/box.hpp"

#include <algorithm>

namespace proposalbench {

BoundingBox box_union(const BoundingBox& a, const BoundingBox& b) {
    const int x0 = std::min(a.x, b.x);
    const int y0 = std::min(a.y, b.y);
    const int x1 = std::max(a.right(), b.right());
    const int y1 = std::max(a.bottom(), b.bottom());
    return {x0, y0, x1 - x0, y1 - y0};
}

std::int64_t box_intersection_area(const BoundingBox& a, const BoundingBox& b) {
    const std::int64_t iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const std::int64_t ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    if (iw <= 0 || ih <= 0) {
        return 0;
    }
    return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
    const std::int64_t inter = box_intersection_area(a, b);
    const std::int64_t uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

bool ranks_before(const ScoredBox& a, const ScoredBox& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.box < b.box;
}

void sort_proposals(std::vector<ScoredBox>& boxes) {
    std::sort(boxes.begin(), boxes.end(), ranks_before);
    boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
}

bool ProposalSet::is_sorted() const {
    return std::is_sorted(boxes.begin(), boxes.end(), ranks_before);
}

}  // namespace proposalbench
