#include "proposalbench/synthbench.hpp"

#include <fmt/format.h>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "proposalbench/errors.hpp"

namespace proposalbench {

using nlohmann::json;

namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::uint8_t to_channel(double v) {
    return static_cast<std::uint8_t>(std::clamp(round_half_up(v), 0, 255));
}

std::string_view texture_name(Texture t) {
    switch (t) {
        case Texture::Flat: return "flat";
        case Texture::Checker: return "checker";
        case Texture::Stripes: return "stripes";
    }
    return "flat";
}

Texture parse_texture(const std::string& name) {
    for (Texture t : {Texture::Flat, Texture::Checker, Texture::Stripes}) {
        if (texture_name(t) == name) return t;
    }
    throw ParameterError("unknown texture '" + name + "'");
}

Rgb parse_rgb(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParameterError("colour must be an [r, g, b] array");
    Rgb c{};
    for (int i = 0; i < 3; ++i) {
        const int v = j.at(i).get<int>();
        if (v < 0 || v > 255) throw ParameterError("colour channel out of range");
        c[i] = static_cast<std::uint8_t>(v);
    }
    return c;
}

json rgb_json(const Rgb& c) { return json::array({c[0], c[1], c[2]}); }

}  // namespace

void SceneSpec::validate() const {
    if (objects.empty()) throw ParameterError("scene has no objects");
    std::set<std::string> ids;
    for (const SceneObject& o : objects) {
        if (!(o.z > 0.0)) throw ParameterError("object '" + o.id + "' must have positive depth");
        if (!(o.size > 0.0)) throw ParameterError("object '" + o.id + "' must have positive size");
        if (o.id.empty()) throw ParameterError("object ids must be nonempty");
        if (!ids.insert(o.id).second) throw ParameterError("duplicate object id '" + o.id + "'");
    }
    if (clutter_count < 0) throw ParameterError("clutter count must be nonnegative");
    if (clutter_contrast < 0 || clutter_contrast > 255) {
        throw ParameterError("clutter contrast must lie in [0, 255]");
    }
}

SceneSpec default_scene() {
    SceneSpec spec;
    spec.objects = {
        {"near", 0.54, -0.32, 1.0, 0.16, {200, 40, 40}, Texture::Flat},
        {"mid", 0.48, -0.165, 1.5, 0.30, {40, 160, 60}, Texture::Checker},
        {"far", 0.18, 0.36, 3.0, 0.60, {50, 80, 200}, Texture::Stripes},
        {"distant", -0.84, 2.1, 6.0, 1.20, {220, 180, 40}, Texture::Checker},
    };
    spec.background = {120, 120, 130};
    spec.background_gradient = Rgb{90, 95, 110};
    spec.clutter_seed = 7;
    spec.clutter_count = 8;
    return spec;
}

SceneSpec scene_from_json(const std::string& text) {
    SceneSpec spec;
    try {
        const json j = json::parse(text);
        for (const json& o : j.at("objects")) {
            SceneObject obj;
            obj.id = o.at("id").get<std::string>();
            obj.x = o.at("x").get<double>();
            obj.y = o.at("y").get<double>();
            obj.z = o.at("z").get<double>();
            obj.size = o.at("size").get<double>();
            obj.color = parse_rgb(o.at("color"));
            obj.texture = parse_texture(o.value("texture", std::string("flat")));
            spec.objects.push_back(std::move(obj));
        }
        if (j.contains("background")) spec.background = parse_rgb(j.at("background"));
        if (j.contains("background_gradient") && !j.at("background_gradient").is_null()) {
            spec.background_gradient = parse_rgb(j.at("background_gradient"));
        }
        spec.clutter_seed = j.value("clutter_seed", std::uint64_t{0});
        spec.clutter_count = j.value("clutter_count", 0);
        spec.clutter_contrast = j.value("clutter_contrast", 25);
    } catch (const json::exception& e) {
        throw DecodeError(std::string("scene JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string scene_to_json(const SceneSpec& spec) {
    json j;
    j["objects"] = json::array();
    for (const SceneObject& o : spec.objects) {
        j["objects"].push_back({{"id", o.id},
                                {"x", o.x},
                                {"y", o.y},
                                {"z", o.z},
                                {"size", o.size},
                                {"color", rgb_json(o.color)},
                                {"texture", texture_name(o.texture)}});
    }
    j["background"] = rgb_json(spec.background);
    j["background_gradient"] =
        spec.background_gradient ? rgb_json(*spec.background_gradient) : json(nullptr);
    j["clutter_seed"] = spec.clutter_seed;
    j["clutter_count"] = spec.clutter_count;
    j["clutter_contrast"] = spec.clutter_contrast;
    return j.dump(2) + "\n";
}

void CameraConfig::validate() const {
    if (!(focal_length > 0.0)) throw ParameterError("focal length must be positive");
    if (width < 1 || height < 1) throw ParameterError("frame dimensions must be positive");
}

void IlluminationConfig::validate() const {
    if (!(gain > 0.0)) throw ParameterError("illumination gain must be positive");
    if (!(gamma > 0.0)) throw ParameterError("illumination gamma must be positive");
    if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be nonnegative");
}

ProjectedSquare project_square(const SceneObject& obj, const CameraConfig& camera) {
    const double f = camera.focal_length;
    return {camera.width / 2.0 + f * (obj.x - camera.offset) / obj.z,
            camera.height / 2.0 + f * obj.y / obj.z, f * obj.size / obj.z};
}

std::optional<BoundingBox> project_object(const SceneObject& obj, const CameraConfig& camera) {
    const ProjectedSquare sq = project_square(obj, camera);
    const int x0 = std::max(0, round_half_up(sq.center_x - sq.side / 2.0));
    const int x1 = std::min(camera.width, round_half_up(sq.center_x + sq.side / 2.0));
    const int y0 = std::max(0, round_half_up(sq.center_y - sq.side / 2.0));
    const int y1 = std::min(camera.height, round_half_up(sq.center_y + sq.side / 2.0));
    if (x1 <= x0 || y1 <= y0) return std::nullopt;
    return BoundingBox{x0, y0, x1 - x0, y1 - y0};
}

ImageBuffer apply_illumination(const ImageBuffer& img, const IlluminationConfig& config,
                               std::uint64_t seed) {
    config.validate();
    if (config.is_identity()) return img;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, config.noise_sigma > 0.0 ? config.noise_sigma : 1.0);
    std::vector<Rgb> out(img.pixels().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            double v = 255.0 * config.gain * std::pow(img.pixels()[i][c] / 255.0, config.gamma);
            if (config.noise_sigma > 0.0) v += noise(rng);
            out[i][c] = to_channel(std::clamp(v, 0.0, 255.0));
        }
    }
    return ImageBuffer(img.width(), img.height(), std::move(out));
}

namespace {

Rgb texture_color(const SceneObject& obj, double u, double v) {
    bool alternate = false;
    switch (obj.texture) {
        case Texture::Flat: break;
        case Texture::Checker:
            alternate = (static_cast<int>(u * 4.0) + static_cast<int>(v * 4.0)) % 2 == 1;
            break;
        case Texture::Stripes:
            alternate = static_cast<int>(u * 5.0) % 2 == 1;
            break;
    }
    if (!alternate) return obj.color;
    Rgb dark{};
    for (int c = 0; c < 3; ++c) dark[c] = to_channel(obj.color[c] * 0.55);
    return dark;
}

void paint_background(ImageBuffer& img, const SceneSpec& spec) {
    const Rgb top = spec.background;
    const Rgb bottom = spec.background_gradient.value_or(spec.background);
    for (int y = 0; y < img.height(); ++y) {
        const double t = img.height() > 1 ? static_cast<double>(y) / (img.height() - 1) : 0.0;
        Rgb row{};
        for (int c = 0; c < 3; ++c) row[c] = to_channel(top[c] + t * (bottom[c] - top[c]));
        for (int x = 0; x < img.width(); ++x) img.at(x, y) = row;
    }

    std::mt19937_64 rng(spec.clutter_seed);
    auto uniform = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    for (int i = 0; i < spec.clutter_count; ++i) {
        const int w = uniform(10, 40);
        const int h = uniform(10, 40);
        const int x0 = uniform(0, std::max(0, img.width() - w));
        const int y0 = uniform(0, std::max(0, img.height() - h));
        const int shift = uniform(-spec.clutter_contrast, spec.clutter_contrast);
        for (int y = y0; y < std::min(img.height(), y0 + h); ++y) {
            for (int x = x0; x < std::min(img.width(), x0 + w); ++x) {
                Rgb& p = img.at(x, y);
                for (int c = 0; c < 3; ++c) p[c] = to_channel(p[c] + shift);
            }
        }
    }
}

}  // namespace

RenderedScene render_scene(const SceneSpec& spec, const CameraConfig& camera,
                           const IlluminationConfig& illumination, std::uint64_t seed,
                           const std::string& image_id) {
    spec.validate();
    camera.validate();
    illumination.validate();

    ImageBuffer img(camera.width, camera.height);
    paint_background(img, spec);

    struct Visible {
        const SceneObject* obj;
        BoundingBox box;
    };
    std::vector<Visible> visible;
    for (const SceneObject& o : spec.objects) {
        if (auto box = project_object(o, camera)) visible.push_back({&o, *box});
    }
    if (visible.empty()) throw ParameterError("no object is visible in the frame");
    for (std::size_t i = 0; i < visible.size(); ++i) {
        for (std::size_t j = i + 1; j < visible.size(); ++j) {
            if (box_intersection_area(visible[i].box, visible[j].box) > 0) {
                throw ParameterError(fmt::format("objects '{}' and '{}' overlap in the image",
                                                 visible[i].obj->id, visible[j].obj->id));
            }
        }
    }

    std::vector<Visible> painted = visible;
    std::stable_sort(painted.begin(), painted.end(),
                     [](const Visible& a, const Visible& b) { return a.obj->z > b.obj->z; });
    for (const Visible& v : painted) {
        const ProjectedSquare sq = project_square(*v.obj, camera);
        const double left = sq.center_x - sq.side / 2.0;
        const double top = sq.center_y - sq.side / 2.0;
        for (int y = v.box.y; y < v.box.bottom(); ++y) {
            for (int x = v.box.x; x < v.box.right(); ++x) {
                const double u = std::clamp((x + 0.5 - left) / sq.side, 0.0, 0.999999);
                const double w = std::clamp((y + 0.5 - top) / sq.side, 0.0, 0.999999);
                img.at(x, y) = texture_color(*v.obj, u, w);
            }
        }
    }

    RenderedScene out{apply_illumination(img, illumination, seed), {image_id, {}}};
    for (const Visible& v : visible) out.gt.objects.push_back({v.obj->id, v.box});
    return out;
}

SweepDefinition SweepDefinition::standard(Sweep kind) {
    SweepDefinition def;
    def.kind = kind;
    if (kind == Sweep::Size) {
        def.offsets = {0.0};
        def.scale_factors = {1.0, 0.75, 0.5, 0.35, 0.25, 0.15};
    } else {
        for (int i = 0; i < 6; ++i) def.offsets.push_back(0.22 * i);
    }
    return def;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    // splitmix64 finaliser applied over the three words.
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ b);
}

SceneSpec vary_scene(const SceneSpec& spec, std::uint64_t seed) {
    SceneSpec out = spec;
    std::mt19937_64 rng(derive_seed(seed, 0x5ce9e));
    std::uniform_int_distribution<int> jitter(-40, 40);
    for (SceneObject& o : out.objects) {
        for (auto& c : o.color) c = to_channel(c + jitter(rng));
    }
    std::uniform_int_distribution<int> tint(-15, 15);
    for (auto& c : out.background) c = to_channel(c + tint(rng));
    if (out.background_gradient) {
        for (auto& c : *out.background_gradient) c = to_channel(c + tint(rng));
    }
    out.clutter_seed = derive_seed(spec.clutter_seed, seed);
    return out;
}

std::vector<DatasetSample> make_sweep_dataset(const SceneSpec& spec, const SweepDefinition& sweep,
                                              std::uint64_t seed, const CameraConfig& camera) {
    spec.validate();
    std::vector<DatasetSample> out;
    const std::string prefix = fmt::format("{}-s{}", sweep_name(sweep.kind), seed);

    if (sweep.kind == Sweep::Size) {
        if (sweep.scale_factors.size() < 2) throw ParameterError("size sweep needs at least two scales");
        for (std::size_t i = 0; i < sweep.scale_factors.size(); ++i) {
            SceneSpec scaled = spec;
            for (SceneObject& o : scaled.objects) o.size *= sweep.scale_factors[i];
            CameraConfig cam = camera;
            cam.offset = sweep.offsets.empty() ? 0.0 : sweep.offsets.front();
            const std::string id = fmt::format("{}-r{}", prefix, i + 1);
            RenderedScene r = render_scene(scaled, cam, {}, derive_seed(seed, i + 1, i), id);
            out.push_back({id, std::move(r.image), std::move(r.gt), static_cast<double>(i + 1)});
        }
        return out;
    }

    if (sweep.offsets.size() < 2) throw ParameterError("sweep needs at least two camera offsets");
    const IlluminationConfig illum =
        sweep.kind == Sweep::Illumination ? sweep.night : IlluminationConfig{};
    for (std::size_t i = 0; i < sweep.offsets.size(); ++i) {
        CameraConfig cam = camera;
        cam.offset = sweep.offsets[i];
        const double x_cm = std::round(sweep.offsets[i] * 100.0 * 1e6) / 1e6;
        const std::string id = fmt::format("{}-x{}", prefix, format_coordinate(x_cm));
        RenderedScene r = render_scene(spec, cam, illum,
                                       derive_seed(seed, static_cast<std::uint64_t>(std::llround(x_cm * 1000)), i), id);
        out.push_back({id, std::move(r.image), std::move(r.gt), x_cm});
    }
    return out;
}

std::vector<DatasetSample> make_seeded_dataset(const SceneSpec& spec, const SweepDefinition& sweep,
                                               std::uint64_t first_seed, int n_seeds,
                                               const CameraConfig& camera) {
    if (n_seeds < 1) throw ParameterError("need at least one seed");
    std::vector<DatasetSample> out;
    for (int s = 0; s < n_seeds; ++s) {
        const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(s);
        auto part = make_sweep_dataset(vary_scene(spec, seed), sweep, seed, camera);
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

}  // namespace proposalbench
