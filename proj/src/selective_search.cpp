#include "proposalbench/selective_search.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "proposalbench/errors.hpp"

namespace proposalbench {

SimilarityScore region_similarity(const RegionStats& a, const RegionStats& b, long image_area) {
    SimilarityScore s;
    for (int i = 0; i < kColorHistSize; ++i) {
        s.color += std::min(a.color_hist[i], b.color_hist[i]);
    }
    for (int i = 0; i < kTextureHistSize; ++i) {
        s.texture += std::min(a.texture_hist[i], b.texture_hist[i]);
    }
    const double area = static_cast<double>(image_area);
    const double joint = static_cast<double>(a.size + b.size);
    s.size = std::clamp(1.0 - joint / area, 0.0, 1.0);
    const double hull = static_cast<double>(box_union(a.bbox, b.bbox).area());
    s.fill = std::clamp(1.0 - (hull - joint) / area, 0.0, 1.0);
    s.color = std::clamp(s.color, 0.0, 1.0);
    s.texture = std::clamp(s.texture, 0.0, 1.0);
    s.total = s.color + s.texture + s.size + s.fill;
    return s;
}

RegionStats merge_regions(const RegionStats& a, const RegionStats& b, int new_label) {
    RegionStats m;
    m.label = new_label;
    m.size = a.size + b.size;
    m.bbox = box_union(a.bbox, b.bbox);
    const double wa = static_cast<double>(a.size);
    const double wb = static_cast<double>(b.size);
    for (int i = 0; i < kColorHistSize; ++i) {
        m.color_hist[i] = (wa * a.color_hist[i] + wb * b.color_hist[i]) / (wa + wb);
    }
    if (a.texture_degenerate && b.texture_degenerate) {
        m.texture_degenerate = true;
    } else if (a.texture_degenerate) {
        m.texture_hist = b.texture_hist;
    } else if (b.texture_degenerate) {
        m.texture_hist = a.texture_hist;
    } else {
        for (int i = 0; i < kTextureHistSize; ++i) {
            m.texture_hist[i] = (wa * a.texture_hist[i] + wb * b.texture_hist[i]) / (wa + wb);
        }
    }
    return m;
}

namespace {

struct Candidate {
    double similarity;
    int lo;
    int hi;
};

// Max-heap order: highest similarity first, then smallest (lo, hi).
struct CandidateOrder {
    bool operator()(const Candidate& l, const Candidate& r) const {
        if (l.similarity != r.similarity) return l.similarity < r.similarity;
        if (l.lo != r.lo) return l.lo > r.lo;
        return l.hi > r.hi;
    }
};

}  // namespace

GroupingResult hierarchical_group(const std::vector<RegionStats>& regions,
                                  const Adjacency& adjacency, long image_area) {
    const int n = static_cast<int>(regions.size());
    for (int i = 0; i < n; ++i) {
        if (regions[i].label != i) {
            throw ParameterError("region labels must equal their index");
        }
    }

    std::vector<RegionStats> pool(regions);
    std::vector<bool> alive(n, true);
    std::vector<std::set<int>> neighbors(n);
    for (const auto& [p, q] : adjacency) {
        if (p < 0 || q < 0 || p >= n || q >= n) {
            throw ParameterError("adjacency references an unknown label");
        }
        if (p == q) continue;
        neighbors[p].insert(q);
        neighbors[q].insert(p);
    }

    std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> queue;
    for (int p = 0; p < n; ++p) {
        for (int q : neighbors[p]) {
            if (p < q) {
                queue.push({region_similarity(pool[p], pool[q], image_area).total, p, q});
            }
        }
    }

    GroupingResult out;
    while (!queue.empty()) {
        const Candidate best = queue.top();
        queue.pop();
        if (!alive[best.lo] || !alive[best.hi]) continue;

        const int merged = static_cast<int>(pool.size());
        pool.push_back(merge_regions(pool[best.lo], pool[best.hi], merged));
        alive[best.lo] = false;
        alive[best.hi] = false;
        alive.push_back(true);
        out.trace.push_back({best.lo, best.hi, merged, best.similarity});

        std::set<int> joined;
        for (int v : {best.lo, best.hi}) {
            for (int u : neighbors[v]) {
                if (u != best.lo && u != best.hi) joined.insert(u);
            }
        }
        for (int u : joined) {
            neighbors[u].erase(best.lo);
            neighbors[u].erase(best.hi);
            neighbors[u].insert(merged);
            queue.push({region_similarity(pool[u], pool[merged], image_area).total, u, merged});
        }
        neighbors[best.lo].clear();
        neighbors[best.hi].clear();
        neighbors.push_back(std::move(joined));
    }

    std::set<BoundingBox> seen;
    for (const RegionStats& r : pool) {
        if (seen.insert(r.bbox).second) {
            out.hypotheses.push_back(r.bbox);
        }
    }
    return out;
}

std::vector<BoundingBox> selective_search_hypotheses(const ImageBuffer& img,
                                                     const SegmentationParams& params) {
    const LabelMap labels = felzenszwalb(img, params);
    const RegionAnalysis analysis = region_stats(labels, img);
    const long area = static_cast<long>(img.width()) * img.height();
    return hierarchical_group(analysis.regions, analysis.adjacency, area).hypotheses;
}

SelectiveSearchResult selective_search_ranked(const ImageBuffer& img,
                                              const SegmentationParams& params,
                                              std::size_t max_boxes) {
    const std::vector<BoundingBox> hypotheses = selective_search_hypotheses(img, params);
    const double n = static_cast<double>(hypotheses.size());

    SelectiveSearchResult out;
    out.hypothesis_count = hypotheses.size();
    out.proposals.boxes.reserve(hypotheses.size());
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
        out.proposals.boxes.push_back({hypotheses[i], static_cast<double>(i + 1) / n});
    }
    sort_proposals(out.proposals.boxes);
    if (max_boxes > 0 && out.proposals.boxes.size() > max_boxes) {
        out.proposals.boxes.resize(max_boxes);
    }
    return out;
}

ProposalSet selective_search(const ImageBuffer& img, const SegmentationParams& params,
                             std::size_t max_boxes) {
    return selective_search_ranked(img, params, max_boxes).proposals;
}

}  // namespace proposalbench
