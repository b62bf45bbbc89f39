#include "proposalbench/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <iterator>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "proposalbench/errors.hpp"
#include "proposalbench/selective_search.hpp"

namespace proposalbench {

std::string_view method_name(Method m) {
    switch (m) {
        case Method::SelectiveSearch: return "selective-search";
        case Method::EdgeBoxes: return "edgeboxes";
        case Method::Combination: return "combination";
    }
    return "";
}

std::string_view sweep_name(Sweep s) {
    switch (s) {
        case Sweep::Viewpoint: return "viewpoint";
        case Sweep::Illumination: return "illumination";
        case Sweep::Size: return "size";
    }
    return "";
}

Method parse_method(std::string_view name) {
    for (Method m : all_methods()) {
        if (method_name(m) == name) return m;
    }
    throw ParameterError("unknown method '" + std::string(name) + "'");
}

Sweep parse_sweep(std::string_view name) {
    for (Sweep s : {Sweep::Viewpoint, Sweep::Illumination, Sweep::Size}) {
        if (sweep_name(s) == name) return s;
    }
    throw ParameterError("unknown sweep '" + std::string(name) + "'");
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods{Method::SelectiveSearch, Method::EdgeBoxes,
                                             Method::Combination};
    return methods;
}

ImageQuality image_quality(const ProposalSet& proposals, const GroundTruthSet& gt) {
    if (gt.objects.empty()) {
        throw ParameterError("ground truth for '" + gt.image_id + "' has no objects");
    }
    if (proposals.image_id != gt.image_id) {
        throw ParameterError("proposals for '" + proposals.image_id + "' scored against '" +
                             gt.image_id + "'");
    }
    ImageQuality out;
    double sum = 0.0;
    for (const GroundTruthObject& obj : gt.objects) {
        double best = 0.0;
        for (const ScoredBox& p : proposals.boxes) {
            best = std::max(best, iou(p.box, obj.box));
        }
        out.per_object[obj.object_id] = best;
        sum += best;
    }
    out.quality = sum / static_cast<double>(gt.objects.size());
    return out;
}

MethodOutput run_method(Method method, const MethodParams& params, const DatasetSample& sample) {
    MethodOutput out;
    switch (method) {
        case Method::SelectiveSearch: {
            auto r = selective_search_ranked(sample.image, params.seg, params.ss_max_boxes);
            out.proposals = std::move(r.proposals);
            out.boxes_scored = r.hypothesis_count;
            break;
        }
        case Method::EdgeBoxes: {
            auto r = edgeboxes_ranked(sample.image, params.eb);
            out.proposals = std::move(r.proposals);
            out.boxes_scored = r.boxes_scored;
            break;
        }
        case Method::Combination: {
            auto r = combine_ranked(sample.image, params.comb);
            out.proposals = std::move(r.proposals);
            out.boxes_scored = r.boxes_scored;
            break;
        }
    }
    out.proposals.image_id = sample.image_id;
    return out;
}

std::vector<ImageResult> evaluate_images(const std::vector<DatasetSample>& dataset,
                                         const ProposalFn& fn, unsigned threads) {
    std::vector<ImageResult> results(dataset.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= dataset.size()) return;
            try {
                const DatasetSample& sample = dataset[i];
                const auto start = std::chrono::steady_clock::now();
                MethodOutput output = fn(sample);
                const auto stop = std::chrono::steady_clock::now();
                output.proposals.image_id = sample.image_id;
                ImageResult& r = results[i];
                r.image_id = sample.image_id;
                r.x = sample.x;
                r.quality = image_quality(output.proposals, sample.gt).quality;
                r.n_objects = static_cast<long>(sample.gt.objects.size());
                r.boxes_scored = output.boxes_scored;
                r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = dataset.size();
                return;
            }
        }
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(dataset.size())));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

QualityCurve aggregate_curve(Method method, Sweep sweep, const std::vector<ImageResult>& results) {
    std::vector<const ImageResult*> ordered;
    for (const ImageResult& r : results) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](const ImageResult* a, const ImageResult* b) {
        return std::tie(a->x, a->image_id) < std::tie(b->x, b->image_id);
    });

    QualityCurve curve{method, sweep, {}};
    double sum = 0.0;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const ImageResult& r = *ordered[i];
        if (curve.points.empty() || curve.points.back().x != r.x) {
            curve.points.push_back({r.x, 0.0, 0, 0});
            sum = 0.0;
        }
        QualityPoint& p = curve.points.back();
        sum += r.quality;
        p.n_objects += r.n_objects;
        p.n_images += 1;
        p.quality = sum / static_cast<double>(p.n_images);
    }
    return curve;
}

QualityCurve sweep_evaluate(const std::vector<DatasetSample>& dataset, Method method, Sweep sweep,
                            const ProposalFn& fn, unsigned threads) {
    if (dataset.empty()) throw ParameterError("empty dataset");
    return aggregate_curve(method, sweep, evaluate_images(dataset, fn, threads));
}

QualityCurve sweep_evaluate(const std::vector<DatasetSample>& dataset, std::string_view method,
                            Sweep sweep, const MethodParams& params, unsigned threads) {
    const Method m = parse_method(method);
    return sweep_evaluate(
        dataset, m, sweep, [&](const DatasetSample& s) { return run_method(m, params, s); }, threads);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

// Yields data rows with the expected field count; validates the header.
class CsvReader {
public:
    CsvReader(std::istream& in, std::string_view header) : in_(in) {
        std::string line;
        if (!next_line(line) || line != header) {
            throw DecodeError(fmt::format("expected CSV header '{}'", header));
        }
        expected_fields_ = split_fields(std::string(header)).size();
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (next_line(line)) {
            if (line.empty()) continue;
            fields = split_fields(line);
            if (fields.size() != expected_fields_) {
                throw DecodeError(fmt::format("line {}: expected {} fields, found {}", line_no_,
                                              expected_fields_, fields.size()));
            }
            return true;
        }
        return false;
    }

    template <typename T>
    T number(const std::string& field) const {
        T value{};
        const char* end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, value);
        if (ec != std::errc() || ptr != end || field.empty()) {
            throw DecodeError(fmt::format("line {}: bad number '{}'", line_no_, field));
        }
        return value;
    }

private:
    bool next_line(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    std::istream& in_;
    std::size_t expected_fields_ = 0;
    std::size_t line_no_ = 0;
};

void check_identifier(const std::string& id) {
    if (id.find_first_of(",\r\n") != std::string::npos) {
        throw ParameterError("identifier '" + id + "' contains a CSV delimiter");
    }
}

void check_stream(const std::ostream& out) {
    if (!out) throw IoError("write failed");
}

constexpr std::string_view kQualityHeader = "method,sweep,x,quality,n_objects,n_images";
constexpr std::string_view kGroundTruthHeader = "image_id,object_id,x,y,w,h";
constexpr std::string_view kProposalsHeader = "image_id,rank,score,x,y,w,h";
constexpr std::string_view kTimingHeader = "method,x,boxes_scored,wall_ms";

}  // namespace

std::string format_coordinate(double x) {
    if (std::isfinite(x) && x == std::round(x) && std::abs(x) < 1e15) {
        return fmt::format("{}", static_cast<long long>(x));
    }
    return fmt::format("{:.6f}", x);
}

void write_quality_csv(const std::vector<QualityCurve>& curves, std::ostream& out) {
    struct Row {
        std::string_view method;
        std::string_view sweep;
        const QualityPoint* point;
    };
    std::vector<Row> rows;
    for (const QualityCurve& c : curves) {
        for (const QualityPoint& p : c.points) {
            rows.push_back({method_name(c.method), sweep_name(c.sweep), &p});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.method, a.sweep, a.point->x) < std::tie(b.method, b.sweep, b.point->x);
    });
    out << kQualityHeader << '\n';
    for (const Row& r : rows) {
        out << fmt::format("{},{},{},{:.6f},{},{}\n", r.method, r.sweep, format_coordinate(r.point->x),
                           r.point->quality, r.point->n_objects, r.point->n_images);
    }
    check_stream(out);
}

std::vector<QualityCurve> read_quality_csv(std::istream& in) {
    CsvReader reader(in, kQualityHeader);
    std::vector<QualityCurve> curves;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const Method m = parse_method(f[0]);
        const Sweep s = parse_sweep(f[1]);
        const QualityPoint p{reader.number<double>(f[2]), reader.number<double>(f[3]),
                             reader.number<long>(f[4]), reader.number<long>(f[5])};
        auto it = std::find_if(curves.begin(), curves.end(), [&](const QualityCurve& c) {
            return c.method == m && c.sweep == s;
        });
        if (it == curves.end()) {
            curves.push_back({m, s, {}});
            it = std::prev(curves.end());
        }
        if (!it->points.empty() && !(it->points.back().x < p.x)) {
            throw DecodeError("quality CSV rows are not in increasing x order");
        }
        it->points.push_back(p);
    }
    return curves;
}

void write_ground_truth_csv(const std::vector<GroundTruthSet>& sets, std::ostream& out) {
    out << kGroundTruthHeader << '\n';
    for (const GroundTruthSet& s : sets) {
        check_identifier(s.image_id);
        for (const GroundTruthObject& o : s.objects) {
            check_identifier(o.object_id);
            out << fmt::format("{},{},{},{},{},{}\n", s.image_id, o.object_id, o.box.x, o.box.y,
                               o.box.w, o.box.h);
        }
    }
    check_stream(out);
}

std::vector<GroundTruthSet> read_ground_truth_csv(std::istream& in) {
    CsvReader reader(in, kGroundTruthHeader);
    std::vector<GroundTruthSet> sets;
    std::map<std::string, std::size_t> index;
    std::vector<std::string> f;
    while (reader.next(f)) {
        const BoundingBox box{reader.number<int>(f[2]), reader.number<int>(f[3]),
                              reader.number<int>(f[4]), reader.number<int>(f[5])};
        if (box.x < 0 || box.y < 0 || box.w < 1 || box.h < 1) {
            throw DecodeError("invalid ground-truth box for " + f[0] + "/" + f[1]);
        }
        auto [it, inserted] = index.try_emplace(f[0], sets.size());
        if (inserted) sets.push_back({f[0], {}});
        GroundTruthSet& s = sets[it->second];
        for (const auto& o : s.objects) {
            if (o.object_id == f[1]) throw DecodeError("duplicate object id " + f[1] + " in " + f[0]);
        }
        s.objects.push_back({f[1], box});
    }
    return sets;
}

void write_proposals_csv(const std::vector<ProposalSet>& sets, std::ostream& out) {
    out << kProposalsHeader << '\n';
    for (const ProposalSet& s : sets) {
        check_identifier(s.image_id);
        for (std::size_t rank = 0; rank < s.boxes.size(); ++rank) {
            const ScoredBox& b = s.boxes[rank];
            out << fmt::format("{},{},{:.6f},{},{},{},{}\n", s.image_id, rank, b.score, b.box.x,
                               b.box.y, b.box.w, b.box.h);
        }
    }
    check_stream(out);
}

std::vector<ProposalSet> read_proposals_csv(std::istream& in) {
    CsvReader reader(in, kProposalsHeader);
    std::vector<ProposalSet> sets;
    std::map<std::string, std::size_t> index;
    std::vector<std::string> f;
    while (reader.next(f)) {
        auto [it, inserted] = index.try_emplace(f[0], sets.size());
        if (inserted) sets.push_back({f[0], {}});
        const BoundingBox box{reader.number<int>(f[3]), reader.number<int>(f[4]),
                              reader.number<int>(f[5]), reader.number<int>(f[6])};
        if (box.x < 0 || box.y < 0 || box.w < 1 || box.h < 1) {
            throw DecodeError("invalid proposal box for " + f[0]);
        }
        sets[it->second].boxes.push_back({box, reader.number<double>(f[2])});
    }
    return sets;
}

void write_timing_csv(Method method, const std::vector<ImageResult>& results, std::ostream& out,
                      bool header) {
    if (header) out << kTimingHeader << '\n';
    for (const ImageResult& r : results) {
        out << fmt::format("{},{},{},{:.3f}\n", method_name(method), format_coordinate(r.x),
                           r.boxes_scored, r.wall_ms);
    }
    check_stream(out);
}

}  // namespace proposalbench
