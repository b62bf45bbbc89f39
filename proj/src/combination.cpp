#include "proposalbench/combination.hpp"

#include "proposalbench/errors.hpp"
#include "proposalbench/selective_search.hpp"

namespace proposalbench {

void CombinationParams::validate() const {
    seg.validate();
    eb.validate();
    if (n_boxes < 1) throw ParameterError("n_boxes must be at least 1");
}

CombinationResult combine_ranked(const ImageBuffer& img, const CombinationParams& params) {
    params.validate();
    const std::vector<BoundingBox> boxes = selective_search_hypotheses(img, params.seg);
    const EdgeGraph graph = build_edge_graph(img, params.eb);

    CombinationResult out;
    out.boxes_scored = boxes.size();
    out.proposals.boxes = rank_boxes(boxes, graph, params.eb, params.n_boxes);
    return out;
}

ProposalSet combine(const ImageBuffer& img, const CombinationParams& params) {
    return combine_ranked(img, params).proposals;
}

}  // namespace proposalbench
