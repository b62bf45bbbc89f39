#pragma once

#include <cstddef>

#include "proposalbench/box.hpp"
#include "proposalbench/edgeboxes.hpp"
#include "proposalbench/image.hpp"
#include "proposalbench/segmentation.hpp"

namespace proposalbench {

/// Selective Search supplies the candidate boxes, the EdgeBoxes objectness
/// score ranks them.
struct CombinationParams {
    SegmentationParams seg;
    EdgeBoxParams eb;
    std::size_t n_boxes = 50;

    void validate() const;
};

struct CombinationResult {
    ProposalSet proposals;
    std::size_t boxes_scored = 0;  ///< number of Selective Search hypotheses
};

CombinationResult combine_ranked(const ImageBuffer& img, const CombinationParams& params);
ProposalSet combine(const ImageBuffer& img, const CombinationParams& params);

}  // namespace proposalbench
