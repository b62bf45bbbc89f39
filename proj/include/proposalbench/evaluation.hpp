#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "proposalbench/box.hpp"
#include "proposalbench/combination.hpp"
#include "proposalbench/edgeboxes.hpp"
#include "proposalbench/image.hpp"
#include "proposalbench/segmentation.hpp"

namespace proposalbench {

enum class Method { SelectiveSearch, EdgeBoxes, Combination };
enum class Sweep { Viewpoint, Illumination, Size };

std::string_view method_name(Method m);
std::string_view sweep_name(Sweep s);
/// Throw ParameterError for names outside the closed sets.
Method parse_method(std::string_view name);
Sweep parse_sweep(std::string_view name);
const std::vector<Method>& all_methods();

struct GroundTruthObject {
    std::string object_id;
    BoundingBox box;
    bool operator==(const GroundTruthObject&) const = default;
};

struct GroundTruthSet {
    std::string image_id;
    std::vector<GroundTruthObject> objects;
    bool operator==(const GroundTruthSet&) const = default;
};

struct ImageQuality {
    double quality = 0.0;                     ///< mean best IOU over objects
    std::map<std::string, double> per_object; ///< best IOU per object id
};

/// Every proposal competes for every object; no one-to-one matching.
ImageQuality image_quality(const ProposalSet& proposals, const GroundTruthSet& gt);

struct QualityPoint {
    double x = 0.0;
    double quality = 0.0;
    long n_objects = 0;
    long n_images = 0;
    bool operator==(const QualityPoint&) const = default;
};

struct QualityCurve {
    Method method = Method::Combination;
    Sweep sweep = Sweep::Viewpoint;
    std::vector<QualityPoint> points;  ///< strictly increasing x
    bool operator==(const QualityCurve&) const = default;
};

struct DatasetSample {
    std::string image_id;
    ImageBuffer image;
    GroundTruthSet gt;
    double x = 0.0;
};

struct MethodOutput {
    ProposalSet proposals;
    std::size_t boxes_scored = 0;
};

using ProposalFn = std::function<MethodOutput(const DatasetSample&)>;

struct MethodParams {
    SegmentationParams seg;
    EdgeBoxParams eb;
    CombinationParams comb;
    /// Cap on Selective Search output; 0 keeps every hypothesis.
    std::size_t ss_max_boxes = 0;
};

/// Runs one of the three proposal generators on a sample. For Selective
/// Search boxes_scored is the hypothesis count.
MethodOutput run_method(Method method, const MethodParams& params, const DatasetSample& sample);

struct ImageResult {
    std::string image_id;
    double x = 0.0;
    double quality = 0.0;
    long n_objects = 0;
    std::size_t boxes_scored = 0;
    double wall_ms = 0.0;
};

/// Evaluates every sample with `fn` on a pool of `threads` workers. Results
/// come back in dataset order whatever the thread count.
std::vector<ImageResult> evaluate_images(const std::vector<DatasetSample>& dataset,
                                         const ProposalFn& fn, unsigned threads);

/// Mean quality per distinct x. Within an x, qualities are summed in image id
/// order so the result does not depend on evaluation order.
QualityCurve aggregate_curve(Method method, Sweep sweep, const std::vector<ImageResult>& results);

QualityCurve sweep_evaluate(const std::vector<DatasetSample>& dataset, Method method, Sweep sweep,
                            const ProposalFn& fn, unsigned threads = 1);
QualityCurve sweep_evaluate(const std::vector<DatasetSample>& dataset, std::string_view method,
                            Sweep sweep, const MethodParams& params, unsigned threads = 1);

// CSV files. All use LF line endings and a header row.
void write_quality_csv(const std::vector<QualityCurve>& curves, std::ostream& out);
std::vector<QualityCurve> read_quality_csv(std::istream& in);

void write_ground_truth_csv(const std::vector<GroundTruthSet>& sets, std::ostream& out);
std::vector<GroundTruthSet> read_ground_truth_csv(std::istream& in);

void write_proposals_csv(const std::vector<ProposalSet>& sets, std::ostream& out);
std::vector<ProposalSet> read_proposals_csv(std::istream& in);

void write_timing_csv(Method method, const std::vector<ImageResult>& results, std::ostream& out,
                      bool header);

/// Sweep coordinates print as integers when integral, else with 6 decimals.
std::string format_coordinate(double x);

/// Line plot of quality against the sweep coordinate, one polyline per
/// method. All curves must share a sweep.
void render_svg_plot(const std::vector<QualityCurve>& curves, std::string_view title, std::ostream& out);

}  // namespace proposalbench
