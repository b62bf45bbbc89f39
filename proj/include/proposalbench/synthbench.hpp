#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "proposalbench/box.hpp"
#include "proposalbench/evaluation.hpp"
#include "proposalbench/image.hpp"

namespace proposalbench {

enum class Texture { Flat, Checker, Stripes };

/// Fronto-parallel square. X is lateral and Y vertical (down), both in metres
/// relative to the optical axis at zero camera offset; Z is depth.
struct SceneObject {
    std::string id;
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;
    double size = 0.1;
    Rgb color{255, 255, 255};
    Texture texture = Texture::Flat;
};

struct SceneSpec {
    std::vector<SceneObject> objects;
    Rgb background{120, 120, 130};
    /// Bottom-row colour of a vertical background gradient.
    std::optional<Rgb> background_gradient;
    std::uint64_t clutter_seed = 0;
    int clutter_count = 0;     ///< background rectangles
    int clutter_contrast = 25; ///< max brightness shift of a clutter rectangle

    void validate() const;
};

/// Four objects at depths 1, 1.5, 3 and 6 m in separate horizontal lanes,
/// all in frame over the whole 1.10 m camera travel.
SceneSpec default_scene();

SceneSpec scene_from_json(const std::string& text);
std::string scene_to_json(const SceneSpec& spec);

struct CameraConfig {
    double focal_length = 500.0;  ///< pixels
    int width = 640;
    int height = 480;
    double offset = 0.0;  ///< lateral camera translation, metres

    void validate() const;
};

struct IlluminationConfig {
    double gain = 1.0;
    double gamma = 1.0;
    double noise_sigma = 0.0;

    void validate() const;
    bool is_identity() const { return gain == 1.0 && gamma == 1.0 && noise_sigma == 0.0; }
    static IlluminationConfig night() { return {0.35, 1.4, 2.0}; }
};

/// Continuous pinhole projection of an object's square.
struct ProjectedSquare {
    double center_x;
    double center_y;
    double side;
};

ProjectedSquare project_square(const SceneObject& obj, const CameraConfig& camera);

/// Pixel box of the projected square, clipped to the frame; empty when
/// nothing of it is visible.
std::optional<BoundingBox> project_object(const SceneObject& obj, const CameraConfig& camera);

/// v' = clamp(255 gain (v/255)^gamma + noise, 0, 255), rounded half up, with
/// Gaussian noise drawn from a generator seeded by `seed`.
ImageBuffer apply_illumination(const ImageBuffer& img, const IlluminationConfig& config,
                               std::uint64_t seed);

struct RenderedScene {
    ImageBuffer image;
    GroundTruthSet gt;
};

/// Paints objects far to near over the background. Throws ParameterError when
/// no object is visible or two visible objects overlap.
RenderedScene render_scene(const SceneSpec& spec, const CameraConfig& camera,
                           const IlluminationConfig& illumination, std::uint64_t seed,
                           const std::string& image_id = "");

struct SweepDefinition {
    Sweep kind = Sweep::Viewpoint;
    std::vector<double> offsets;        ///< camera offsets, metres
    std::vector<double> scale_factors;  ///< size sweep only, descending
    IlluminationConfig night = IlluminationConfig::night();

    /// Viewpoint: offsets 0..1.10 m in 0.22 m steps. Illumination: the same
    /// offsets under `night`. Size: fixed camera, scales 1.0 down to 0.15.
    static SweepDefinition standard(Sweep kind);
};

/// Mixes seed material into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Per-seed variant of a scene: jittered colours and clutter, same geometry.
SceneSpec vary_scene(const SceneSpec& spec, std::uint64_t seed);

std::vector<DatasetSample> make_sweep_dataset(const SceneSpec& spec, const SweepDefinition& sweep,
                                              std::uint64_t seed, const CameraConfig& camera = {});

/// Concatenates make_sweep_dataset over vary_scene(spec, s) for
/// s = first_seed .. first_seed + n_seeds - 1.
std::vector<DatasetSample> make_seeded_dataset(const SceneSpec& spec, const SweepDefinition& sweep,
                                               std::uint64_t first_seed, int n_seeds,
                                               const CameraConfig& camera = {});

}  // namespace proposalbench
