#include "proposalbench/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "proposalbench/combination.hpp"
#include "proposalbench/edgeboxes.hpp"
#include "proposalbench/errors.hpp"
#include "proposalbench/evaluation.hpp"
#include "proposalbench/io.hpp"
#include "proposalbench/selective_search.hpp"
#include "proposalbench/synthbench.hpp"

namespace proposalbench {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::optional<unsigned> threads;
};

// Parameter flags shared by `propose` and `sweep`.
struct TuningOptions {
    double sigma = 1.4;
    double k = 1800.0;
    int min_size = 1800;
    double tau = 0.1;
    double alpha = 0.65;
    double beta = 0.75;
    double kappa = 1.5;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--sigma", sigma, "Gaussian smoothing std-dev")->capture_default_str();
        cmd.add_option("--k", k, "segmentation scale constant")->capture_default_str();
        cmd.add_option("--min-size", min_size, "minimum segment size in pixels")->capture_default_str();
        cmd.add_option("--tau", tau, "edge threshold, fraction of max magnitude")->capture_default_str();
        cmd.add_option("--alpha", alpha, "sliding-window step IoU")->capture_default_str();
        cmd.add_option("--beta", beta, "NMS IoU threshold")->capture_default_str();
        cmd.add_option("--kappa", kappa, "perimeter normalisation exponent")->capture_default_str();
    }

    SegmentationParams segmentation() const { return {sigma, k, min_size}; }

    EdgeBoxParams edgeboxes(std::size_t n_boxes) const {
        EdgeBoxParams p;
        p.n_boxes = n_boxes;
        p.edge_threshold = tau;
        p.alpha = alpha;
        p.beta = beta;
        p.kappa = kappa;
        return p;
    }
};

struct NightOptions {
    IlluminationConfig night = IlluminationConfig::night();

    void add_to(CLI::App& cmd) {
        cmd.add_option("--night-gain", night.gain, "night preset gain")->capture_default_str();
        cmd.add_option("--night-gamma", night.gamma, "night preset gamma")->capture_default_str();
        cmd.add_option("--night-noise", night.noise_sigma, "night preset noise std-dev")
            ->capture_default_str();
    }
};

unsigned resolve_threads(const GlobalOptions& g) {
    if (g.threads) {
        if (*g.threads < 1) throw ParameterError("--threads must be at least 1");
        return *g.threads;
    }
    if (const char* env = std::getenv("PROPOSALBENCH_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) throw ParameterError("PROPOSALBENCH_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t default_combination_boxes(Sweep s) { return s == Sweep::Size ? 10 : 50; }

std::vector<Method> parse_method_list(const std::string& list) {
    if (list == "all") return all_methods();
    std::vector<Method> methods;
    std::stringstream ss(list);
    std::string name;
    while (std::getline(ss, name, ',')) {
        const Method m = parse_method(name);
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    }
    if (methods.empty()) throw ParameterError("no methods given");
    return methods;
}

void write_dataset(const std::vector<DatasetSample>& dataset, Sweep sweep, const fs::path& dir) {
    fs::create_directories(dir / "images");
    std::vector<GroundTruthSet> gts;
    for (const DatasetSample& s : dataset) {
        const std::vector<std::uint8_t> png = encode_png(s.image);
        atomic_write(dir / "images" / (s.image_id + ".png"), [&](std::ostream& o) {
            o.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
        });
        gts.push_back(s.gt);
    }
    atomic_write(dir / "ground_truth.csv", [&](std::ostream& o) { write_ground_truth_csv(gts, o); });
    atomic_write(dir / "manifest.csv", [&](std::ostream& o) {
        o << "image_id,x,sweep,path\n";
        for (const DatasetSample& s : dataset) {
            o << fmt::format("{},{},{},images/{}.png\n", s.image_id, format_coordinate(s.x),
                             sweep_name(sweep), s.image_id);
        }
    });
}

std::vector<DatasetSample> read_dataset(const fs::path& dir, Sweep sweep) {
    std::istringstream manifest(read_text_file(dir / "manifest.csv"));
    std::istringstream gt_text(read_text_file(dir / "ground_truth.csv"));
    std::map<std::string, GroundTruthSet> gts;
    for (GroundTruthSet& g : read_ground_truth_csv(gt_text)) {
        const std::string id = g.image_id;
        gts.emplace(id, std::move(g));
    }

    std::string line;
    if (!std::getline(manifest, line) || line != "image_id,x,sweep,path") {
        throw DecodeError("manifest.csv has an unexpected header");
    }
    std::vector<DatasetSample> out;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 4) throw DecodeError("malformed manifest row: " + line);
        if (parse_sweep(f[2]) != sweep) continue;
        const auto gt = gts.find(f[0]);
        if (gt == gts.end()) throw DecodeError("no ground truth for " + f[0]);
        DatasetSample s;
        s.image_id = f[0];
        try {
            s.x = std::stod(f[1]);
        } catch (const std::exception&) {
            throw DecodeError("bad x in manifest row: " + line);
        }
        s.image = load_image(dir / f[3]);
        s.gt = gt->second;
        out.push_back(std::move(s));
    }
    if (out.empty()) {
        throw ParameterError(fmt::format("dataset has no '{}' images", sweep_name(sweep)));
    }
    return out;
}

// ---------------------------------------------------------------------------

struct ProposeCommand {
    std::string input;
    std::string method;
    std::string out;
    std::optional<std::size_t> nboxes;
    TuningOptions tuning;

    void run() const {
        const Method m = parse_method(method);
        const std::size_t n = nboxes.value_or(m == Method::EdgeBoxes   ? 100
                                              : m == Method::Combination ? 50
                                                                         : 0);
        MethodParams params;
        params.seg = tuning.segmentation();
        params.eb = tuning.edgeboxes(m == Method::SelectiveSearch ? 100 : std::max<std::size_t>(n, 1));
        params.comb = {params.seg, params.eb, std::max<std::size_t>(n, 1)};
        params.ss_max_boxes = n;
        params.seg.validate();
        params.comb.validate();

        DatasetSample sample;
        sample.image = load_image(input);
        sample.image_id = fs::path(input).stem().string();
        const MethodOutput result = run_method(m, params, sample);
        atomic_write(out, [&](std::ostream& o) { write_proposals_csv({result.proposals}, o); });
    }
};

struct EvaluateCommand {
    std::string proposals;
    std::string ground_truth;
    std::string out;

    void run() const {
        std::istringstream p_text(read_text_file(proposals));
        std::istringstream g_text(read_text_file(ground_truth));
        std::map<std::string, ProposalSet> by_image;
        for (ProposalSet& p : read_proposals_csv(p_text)) {
            const std::string id = p.image_id;
            by_image.emplace(id, std::move(p));
        }
        const std::vector<GroundTruthSet> gts = read_ground_truth_csv(g_text);
        for (const auto& [id, set] : by_image) {
            const bool known = std::any_of(gts.begin(), gts.end(),
                                           [&](const GroundTruthSet& g) { return g.image_id == id; });
            if (!known) throw ParameterError("proposals for unknown image '" + id + "'");
        }
        atomic_write(out, [&](std::ostream& o) {
            o << "image_id,quality,n_objects\n";
            for (const GroundTruthSet& g : gts) {
                ProposalSet p{g.image_id, {}};
                if (auto it = by_image.find(g.image_id); it != by_image.end()) p = it->second;
                const ImageQuality q = image_quality(p, g);
                o << fmt::format("{},{:.6f},{}\n", g.image_id, q.quality, g.objects.size());
            }
        });
    }
};

struct SynthCommand {
    std::string spec_path;
    std::string experiment;
    int seeds = 1;
    std::string out_dir;
    NightOptions night;

    void run(const GlobalOptions& g) const {
        const Sweep sweep = parse_sweep(experiment);
        if (seeds < 1) throw ParameterError("--seeds must be at least 1");
        night.night.validate();
        const SceneSpec spec = spec_path.empty() ? default_scene() : scene_from_json(read_text_file(spec_path));
        SweepDefinition def = SweepDefinition::standard(sweep);
        def.night = night.night;
        const auto dataset = make_seeded_dataset(spec, def, g.seed, seeds);
        write_dataset(dataset, sweep, out_dir);
        atomic_write(fs::path(out_dir) / "scene.json", [&](std::ostream& o) { o << scene_to_json(spec); });
    }
};

struct SweepCommand {
    std::string experiment;
    std::string methods = "all";
    int seeds = 5;
    std::string dataset_dir;
    std::string out_dir;
    std::string spec_path;
    std::size_t eb_nboxes = 100;
    std::optional<std::size_t> comb_nboxes;
    std::size_t ss_nboxes = 0;
    TuningOptions tuning;
    NightOptions night;

    void run(const GlobalOptions& g) const {
        const Sweep sweep = parse_sweep(experiment);
        const std::vector<Method> method_list = parse_method_list(methods);
        if (seeds < 1) throw ParameterError("--seeds must be at least 1");
        MethodParams params;
        params.seg = tuning.segmentation();
        params.eb = tuning.edgeboxes(eb_nboxes);
        params.comb = {params.seg, tuning.edgeboxes(eb_nboxes),
                       comb_nboxes.value_or(default_combination_boxes(sweep))};
        params.ss_max_boxes = ss_nboxes;
        params.seg.validate();
        params.eb.validate();
        params.comb.validate();
        night.night.validate();
        const unsigned threads = resolve_threads(g);

        std::vector<DatasetSample> dataset;
        if (!dataset_dir.empty()) {
            dataset = read_dataset(dataset_dir, sweep);
        } else {
            const SceneSpec spec =
                spec_path.empty() ? default_scene() : scene_from_json(read_text_file(spec_path));
            SweepDefinition def = SweepDefinition::standard(sweep);
            def.night = night.night;
            dataset = make_seeded_dataset(spec, def, g.seed, seeds);
        }

        std::vector<QualityCurve> curves;
        std::ostringstream timing;
        bool header = true;
        for (Method m : method_list) {
            const auto results = evaluate_images(
                dataset, [&](const DatasetSample& s) { return run_method(m, params, s); }, threads);
            curves.push_back(aggregate_curve(m, sweep, results));

            std::vector<ImageResult> ordered = results;
            std::stable_sort(ordered.begin(), ordered.end(), [](const ImageResult& a, const ImageResult& b) {
                return std::tie(a.x, a.image_id) < std::tie(b.x, b.image_id);
            });
            write_timing_csv(m, ordered, timing, header);
            header = false;
        }

        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        atomic_write(dir / "quality.csv", [&](std::ostream& o) { write_quality_csv(curves, o); });
        atomic_write(dir / "timing.csv", [&](std::ostream& o) { o << timing.str(); });
        const std::string title = fmt::format("Proposal quality, {} sweep", sweep_name(sweep));
        atomic_write(dir / "plot.svg", [&](std::ostream& o) { render_svg_plot(curves, title, o); });
    }
};

struct PlotCommand {
    std::string in;
    std::string out;
    std::string title;

    void run() const {
        std::istringstream text(read_text_file(in));
        const std::vector<QualityCurve> curves = read_quality_csv(text);
        if (curves.empty()) throw ParameterError("quality CSV has no rows");
        const std::string t = title.empty()
                                  ? fmt::format("Proposal quality, {} sweep", sweep_name(curves.front().sweep))
                                  : title;
        std::ostringstream svg;
        render_svg_plot(curves, t, svg);
        atomic_write(out, [&](std::ostream& o) { o << svg.str(); });
    }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Object proposal generators and robustness benchmark", "proposalbench"};
    app.require_subcommand(1);
    // Lets global flags also follow the subcommand name.
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--seed", global.seed, "base random seed")->capture_default_str();
    app.add_option("--threads", global.threads, "worker threads (default: all cores)");

    ProposeCommand propose;
    auto* propose_cmd = app.add_subcommand("propose", "generate proposals for one image");
    propose_cmd->add_option("--input", propose.input, "PNG or PPM image")->required();
    propose_cmd->add_option("--method", propose.method, "selective-search|edgeboxes|combination")->required();
    propose_cmd->add_option("--out", propose.out, "proposals CSV")->required();
    propose_cmd->add_option("--nboxes", propose.nboxes,
                            "output cap (edgeboxes 100, combination 50, selective-search all)");
    propose.tuning.add_to(*propose_cmd);

    EvaluateCommand evaluate;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score proposals against ground truth");
    evaluate_cmd->add_option("--proposals", evaluate.proposals, "proposals CSV")->required();
    evaluate_cmd->add_option("--ground-truth", evaluate.ground_truth, "ground-truth CSV")->required();
    evaluate_cmd->add_option("--out", evaluate.out, "per-image quality CSV")->required();

    SynthCommand synth;
    auto* synth_cmd = app.add_subcommand("synth", "render a synthetic sweep dataset");
    synth_cmd->add_option("--spec", synth.spec_path, "scene JSON (default: built-in scene)");
    synth_cmd->add_option("--experiment", synth.experiment, "viewpoint|illumination|size")->required();
    synth_cmd->add_option("--seeds", synth.seeds, "scene variants per sweep step")->capture_default_str();
    synth_cmd->add_option("--out-dir", synth.out_dir, "output directory")->required();
    synth.night.add_to(*synth_cmd);

    SweepCommand sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate methods over a synthetic sweep");
    sweep_cmd->add_option("--experiment", sweep.experiment, "viewpoint|illumination|size")->required();
    sweep_cmd->add_option("--methods", sweep.methods, "comma-separated methods or 'all'")->capture_default_str();
    sweep_cmd->add_option("--seeds", sweep.seeds, "scene variants per sweep step")->capture_default_str();
    sweep_cmd->add_option("--dataset-dir", sweep.dataset_dir, "use a dataset written by synth");
    sweep_cmd->add_option("--spec", sweep.spec_path, "scene JSON (default: built-in scene)");
    sweep_cmd->add_option("--out-dir", sweep.out_dir, "output directory")->required();
    sweep_cmd->add_option("--nboxes", sweep.eb_nboxes, "EdgeBoxes output cap")->capture_default_str();
    sweep_cmd->add_option("--comb-nboxes", sweep.comb_nboxes,
                          "combination output cap (viewpoint/illumination 50, size 10)");
    sweep_cmd->add_option("--ss-nboxes", sweep.ss_nboxes, "Selective Search output cap, 0 = all")
        ->capture_default_str();
    sweep.tuning.add_to(*sweep_cmd);
    sweep.night.add_to(*sweep_cmd);

    PlotCommand plot;
    auto* plot_cmd = app.add_subcommand("plot", "render a quality CSV as SVG");
    plot_cmd->add_option("--in", plot.in, "quality CSV")->required();
    plot_cmd->add_option("--out", plot.out, "SVG output")->required();
    plot_cmd->add_option("--title", plot.title, "plot title");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInputError;
    }

    try {
        if (propose_cmd->parsed()) propose.run();
        else if (evaluate_cmd->parsed()) evaluate.run();
        else if (synth_cmd->parsed()) synth.run(global);
        else if (sweep_cmd->parsed()) sweep.run(global);
        else if (plot_cmd->parsed()) plot.run();
        return kExitOk;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInputError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const DecodeError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
}

}  // namespace proposalbench
