#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dida/numerics.hpp"
#include "dida/rng.hpp"

#include <json.hpp>

namespace dida {

enum class SceneLayout { Voronoi, Stripes, Blobs };

const char* to_string(SceneLayout l);
SceneLayout layout_from_string(const std::string& s);

// Procedural segmentation domain. Source and target share everything except
// shift and noise, which is what makes held-out target labels valid for
// evaluation.
struct DomainSpec {
    int class_count = 5;
    std::vector<std::array<double, 3>> palette_mean; // C colors in [0,1]
    std::vector<std::array<double, 3>> palette_std;  // per-class diagonal spread
    std::array<double, 3> shift_offset{0.0, 0.0, 0.0};
    std::array<double, 3> shift_gain{1.0, 1.0, 1.0};
    double noise_std = 0.0;
    std::vector<double> freq_profile; // positive, sums to 1
    SceneLayout layout = SceneLayout::Voronoi;
    int region_count = 20; // voronoi sites / stripes / blobs per scene
};

void validate_spec(const DomainSpec& spec);
nlohmann::json spec_to_json(const DomainSpec& spec);
DomainSpec spec_from_json(const nlohmann::json& j);

// Evenly spaced hue wheel, the default well-separated class palette.
std::vector<std::array<double, 3>> hsv_palette(int class_count,
                                               double saturation = 0.75,
                                               double value = 0.85);

// Long-tailed class weights: w_c proportional to (c+1)^-exponent, normalized.
std::vector<double> tail_frequencies(int class_count, double exponent);

struct LabeledImage {
    DenseGrid image;         // H x W x 3 in [0,1]
    std::vector<int> labels; // H*W class ids (target labels are held out of
                             // training and used only by evaluation)
};

// One scene: region layout by spec.layout, classes drawn from freq_profile,
// colors from the shifted palette plus noise. Image values are quantized to
// float32 at generation so the on-disk form is bit-identical to memory.
LabeledImage gen_scene(const DomainSpec& spec, Rng& rng, int height, int width);

struct Dataset {
    std::vector<LabeledImage> source;
    std::vector<LabeledImage> target;
    int height = 0;
    int width = 0;
    int class_count = 0;
};

// Paired benchmark. target_spec may differ from source_spec only in
// shift_offset / shift_gain / noise_std (shared layout statistics).
Dataset gen_dataset(const DomainSpec& source_spec, const DomainSpec& target_spec,
                    int n_source, int n_target, const Rng& rng, int height, int width);

// On-disk layout: <dir>/source and <dir>/target with one flat f32 grid per
// image and one flat i32 grid per label map; shapes, dtypes, seeds and both
// specs go into the manifest (written by the caller alongside).
nlohmann::json dataset_manifest(const Dataset& data, const DomainSpec& source_spec,
                                const DomainSpec& target_spec, std::uint64_t seed);
void write_dataset(const std::string& dir, const Dataset& data);
Dataset load_dataset(const std::string& dir, const nlohmann::json& manifest);

// Empirical fraction of pixels per class over a split.
std::vector<double> class_pixel_fractions(const std::vector<LabeledImage>& images,
                                          int class_count);

} // namespace dida
