#include "dida/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "dida/error.hpp"
#include "dida/io.hpp"

namespace fs = std::filesystem;

namespace dida {

const char* to_string(SceneLayout l) {
    switch (l) {
        case SceneLayout::Voronoi: return "voronoi";
        case SceneLayout::Stripes: return "stripes";
        case SceneLayout::Blobs: return "blobs";
    }
    return "?";
}

SceneLayout layout_from_string(const std::string& s) {
    if (s == "voronoi") return SceneLayout::Voronoi;
    if (s == "stripes") return SceneLayout::Stripes;
    if (s == "blobs") return SceneLayout::Blobs;
    throw ConfigError("unknown scene layout: " + s);
}

void validate_spec(const DomainSpec& spec) {
    const int C = spec.class_count;
    if (C < 1) throw ConfigError("domain spec: class_count must be positive");
    if (static_cast<int>(spec.palette_mean.size()) != C ||
        static_cast<int>(spec.palette_std.size()) != C) {
        throw ConfigError("domain spec: palette size must equal class_count");
    }
    if (static_cast<int>(spec.freq_profile.size()) != C) {
        throw ConfigError("domain spec: freq_profile size must equal class_count");
    }
    double sum = 0.0;
    for (double f : spec.freq_profile) {
        if (!(f > 0.0)) throw ConfigError("domain spec: freq weights must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("domain spec: freq weights must sum to 1");
    for (const auto& s : spec.palette_std) {
        for (double v : s) {
            if (v < 0.0) throw ConfigError("domain spec: palette spread must be non-negative");
        }
    }
    if (spec.noise_std < 0.0) throw ConfigError("domain spec: noise_std must be non-negative");
    if (spec.region_count < 1) throw ConfigError("domain spec: region_count must be positive");
}

nlohmann::json spec_to_json(const DomainSpec& spec) {
    nlohmann::json j;
    j["class_count"] = spec.class_count;
    j["palette_mean"] = spec.palette_mean;
    j["palette_std"] = spec.palette_std;
    j["shift_offset"] = spec.shift_offset;
    j["shift_gain"] = spec.shift_gain;
    j["noise_std"] = spec.noise_std;
    j["freq_profile"] = spec.freq_profile;
    j["layout"] = to_string(spec.layout);
    j["region_count"] = spec.region_count;
    return j;
}

DomainSpec spec_from_json(const nlohmann::json& j) {
    DomainSpec spec;
    spec.class_count = j.at("class_count").get<int>();
    spec.palette_mean = j.at("palette_mean").get<std::vector<std::array<double, 3>>>();
    spec.palette_std = j.at("palette_std").get<std::vector<std::array<double, 3>>>();
    spec.shift_offset = j.at("shift_offset").get<std::array<double, 3>>();
    spec.shift_gain = j.at("shift_gain").get<std::array<double, 3>>();
    spec.noise_std = j.at("noise_std").get<double>();
    spec.freq_profile = j.at("freq_profile").get<std::vector<double>>();
    spec.layout = layout_from_string(j.at("layout").get<std::string>());
    spec.region_count = j.at("region_count").get<int>();
    validate_spec(spec);
    return spec;
}

std::vector<std::array<double, 3>> hsv_palette(int class_count, double saturation,
                                               double value) {
    if (class_count < 1) throw Error("hsv_palette: need at least one class");
    std::vector<std::array<double, 3>> palette(class_count);
    for (int c = 0; c < class_count; ++c) {
        const double h = 6.0 * c / class_count;
        const int sector = static_cast<int>(h) % 6;
        const double f = h - std::floor(h);
        const double p = value * (1.0 - saturation);
        const double q = value * (1.0 - saturation * f);
        const double t = value * (1.0 - saturation * (1.0 - f));
        switch (sector) {
            case 0: palette[c] = {value, t, p}; break;
            case 1: palette[c] = {q, value, p}; break;
            case 2: palette[c] = {p, value, t}; break;
            case 3: palette[c] = {p, q, value}; break;
            case 4: palette[c] = {t, p, value}; break;
            default: palette[c] = {value, p, q}; break;
        }
    }
    return palette;
}

std::vector<double> tail_frequencies(int class_count, double exponent) {
    std::vector<double> w(class_count);
    double sum = 0.0;
    for (int c = 0; c < class_count; ++c) {
        w[c] = std::pow(static_cast<double>(c + 1), -exponent);
        sum += w[c];
    }
    for (double& x : w) x /= sum;
    return w;
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void layout_voronoi(const DomainSpec& spec, Rng& rng, int H, int W, std::vector<int>& labels) {
    const int S = spec.region_count;
    std::vector<double> sy(S), sx(S);
    std::vector<int> sc(S);
    for (int s = 0; s < S; ++s) {
        sy[s] = rng.uniform() * H;
        sx[s] = rng.uniform() * W;
        sc[s] = sample_categorical(spec.freq_profile, rng);
    }
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            int best = 0;
            double best_d = 1e300;
            for (int s = 0; s < S; ++s) {
                const double dy = y + 0.5 - sy[s];
                const double dx = x + 0.5 - sx[s];
                const double d = dy * dy + dx * dx;
                if (d < best_d) {
                    best_d = d;
                    best = s;
                }
            }
            labels[static_cast<std::size_t>(y) * W + x] = sc[best];
        }
    }
}

void layout_stripes(const DomainSpec& spec, Rng& rng, int H, int W, std::vector<int>& labels) {
    const int S = spec.region_count;
    const bool vertical = rng.uniform_int(2) == 0;
    const int extent = vertical ? W : H;
    std::vector<double> cuts(S - 1);
    for (double& c : cuts) c = rng.uniform();
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> stripe_class(S);
    for (int s = 0; s < S; ++s) stripe_class[s] = sample_categorical(spec.freq_profile, rng);
    const auto stripe_of = [&](int pos) {
        const double frac = (pos + 0.5) / extent;
        int s = 0;
        while (s < S - 1 && frac >= cuts[s]) s++;
        return s;
    };
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            labels[static_cast<std::size_t>(y) * W + x] = stripe_class[stripe_of(vertical ? x : y)];
        }
    }
}

void layout_blobs(const DomainSpec& spec, Rng& rng, int H, int W, std::vector<int>& labels) {
    const int background = sample_categorical(spec.freq_profile, rng);
    std::fill(labels.begin(), labels.end(), background);
    const double r_lo = std::min(H, W) / 16.0;
    const double r_hi = std::min(H, W) / 4.0;
    for (int b = 0; b < spec.region_count; ++b) {
        const double cy = rng.uniform() * H;
        const double cx = rng.uniform() * W;
        const double ry = rng.uniform(r_lo, r_hi);
        const double rx = rng.uniform(r_lo, r_hi);
        const int cls = sample_categorical(spec.freq_profile, rng);
        const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
        const int y1 = std::min(H - 1, static_cast<int>(std::ceil(cy + ry)));
        const int x0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
        const int x1 = std::min(W - 1, static_cast<int>(std::ceil(cx + rx)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double ny = (y + 0.5 - cy) / ry;
                const double nx = (x + 0.5 - cx) / rx;
                if (ny * ny + nx * nx <= 1.0) {
                    labels[static_cast<std::size_t>(y) * W + x] = cls;
                }
            }
        }
    }
}

} // namespace

LabeledImage gen_scene(const DomainSpec& spec, Rng& rng, int height, int width) {
    validate_spec(spec);
    if (height < 8 || width < 8) throw Error("gen_scene: image must be at least 8x8");

    LabeledImage out;
    out.labels.resize(static_cast<std::size_t>(height) * width);
    switch (spec.layout) {
        case SceneLayout::Voronoi: layout_voronoi(spec, rng, height, width, out.labels); break;
        case SceneLayout::Stripes: layout_stripes(spec, rng, height, width, out.labels); break;
        case SceneLayout::Blobs: layout_blobs(spec, rng, height, width, out.labels); break;
    }

    out.image = DenseGrid(height, width, 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int c = out.labels[static_cast<std::size_t>(y) * width + x];
            auto px = out.image.pixel(y, x);
            for (int ch = 0; ch < 3; ++ch) {
                const double base =
                    spec.palette_mean[c][ch] * spec.shift_gain[ch] + spec.shift_offset[ch];
                double v = base + spec.palette_std[c][ch] * rng.gaussian() +
                           spec.noise_std * rng.gaussian();
                // Images are float32 data; quantize now so memory and disk agree.
                px[ch] = static_cast<double>(static_cast<float>(clamp01(v)));
            }
        }
    }
    return out;
}

Dataset gen_dataset(const DomainSpec& source_spec, const DomainSpec& target_spec,
                    int n_source, int n_target, const Rng& rng, int height, int width) {
    validate_spec(source_spec);
    validate_spec(target_spec);
    if (n_source < 0 || n_target < 0) throw Error("gen_dataset: negative split size");
    // The target may differ only in shift and noise; shared layout statistics
    // keep the held-out target labels meaningful.
    if (source_spec.class_count != target_spec.class_count ||
        source_spec.layout != target_spec.layout ||
        source_spec.region_count != target_spec.region_count ||
        source_spec.freq_profile != target_spec.freq_profile ||
        source_spec.palette_mean != target_spec.palette_mean ||
        source_spec.palette_std != target_spec.palette_std) {
        throw Error("gen_dataset: source and target specs may differ only in shift/noise");
    }

    Dataset data;
    data.height = height;
    data.width = width;
    data.class_count = source_spec.class_count;
    data.source.reserve(n_source);
    data.target.reserve(n_target);
    for (int j = 0; j < n_source; ++j) {
        Rng r = rng.fork(static_cast<std::uint64_t>(j));
        data.source.push_back(gen_scene(source_spec, r, height, width));
    }
    for (int j = 0; j < n_target; ++j) {
        Rng r = rng.fork(0x100000000ULL + static_cast<std::uint64_t>(j));
        data.target.push_back(gen_scene(target_spec, r, height, width));
    }
    return data;
}

nlohmann::json dataset_manifest(const Dataset& data, const DomainSpec& source_spec,
                                const DomainSpec& target_spec, std::uint64_t seed) {
    nlohmann::json j;
    j["height"] = data.height;
    j["width"] = data.width;
    j["classes"] = data.class_count;
    j["n_source"] = data.source.size();
    j["n_target"] = data.target.size();
    j["image_dtype"] = "f32le";
    j["label_dtype"] = "i32le";
    j["seed"] = seed;
    j["source_spec"] = spec_to_json(source_spec);
    j["target_spec"] = spec_to_json(target_spec);
    return j;
}

namespace {

std::string image_path(const std::string& dir, const char* split, int i) {
    char name[64];
    std::snprintf(name, sizeof(name), "image_%05d.f32", i);
    return dir + "/" + split + "/" + name;
}

std::string label_path(const std::string& dir, const char* split, int i) {
    char name[64];
    std::snprintf(name, sizeof(name), "labels_%05d.i32", i);
    return dir + "/" + split + "/" + name;
}

void write_split(const std::string& dir, const char* split,
                 const std::vector<LabeledImage>& images) {
    fs::create_directories(fs::path(dir) / split);
    for (std::size_t i = 0; i < images.size(); ++i) {
        ByteWriter img;
        for (double v : images[i].image.data) img.f32(static_cast<float>(v));
        write_file(image_path(dir, split, static_cast<int>(i)), img.buffer());
        ByteWriter lab;
        for (int l : images[i].labels) lab.i32(l);
        write_file(label_path(dir, split, static_cast<int>(i)), lab.buffer());
    }
}

std::vector<LabeledImage> load_split(const std::string& dir, const char* split, int n,
                                     int H, int W, int C) {
    std::vector<LabeledImage> images;
    images.reserve(n);
    const std::size_t npx = static_cast<std::size_t>(H) * W;
    for (int i = 0; i < n; ++i) {
        LabeledImage img;
        img.image = DenseGrid(H, W, 3);
        const auto ibytes = read_file(image_path(dir, split, i));
        if (ibytes.size() != npx * 3 * 4) throw IoError("dataset: image size mismatch");
        ByteReader ir(ibytes);
        for (auto& v : img.image.data) v = static_cast<double>(ir.f32());
        const auto lbytes = read_file(label_path(dir, split, i));
        if (lbytes.size() != npx * 4) throw IoError("dataset: label size mismatch");
        ByteReader lr(lbytes);
        img.labels.resize(npx);
        for (auto& l : img.labels) {
            l = lr.i32();
            if (l < 0 || l >= C) throw IoError("dataset: label out of range");
        }
        images.push_back(std::move(img));
    }
    return images;
}

} // namespace

void write_dataset(const std::string& dir, const Dataset& data) {
    fs::create_directories(dir);
    write_split(dir, "source", data.source);
    write_split(dir, "target", data.target);
}

Dataset load_dataset(const std::string& dir, const nlohmann::json& manifest) {
    Dataset data;
    data.height = manifest.at("height").get<int>();
    data.width = manifest.at("width").get<int>();
    data.class_count = manifest.at("classes").get<int>();
    const int n_source = manifest.at("n_source").get<int>();
    const int n_target = manifest.at("n_target").get<int>();
    data.source = load_split(dir, "source", n_source, data.height, data.width, data.class_count);
    data.target = load_split(dir, "target", n_target, data.height, data.width, data.class_count);
    return data;
}

std::vector<double> class_pixel_fractions(const std::vector<LabeledImage>& images,
                                          int class_count) {
    std::vector<double> counts(class_count, 0.0);
    double total = 0.0;
    for (const auto& img : images) {
        for (int l : img.labels) {
            counts[l] += 1.0;
            total += 1.0;
        }
    }
    if (total > 0.0) {
        for (double& c : counts) c /= total;
    }
    return counts;
}

} // namespace dida
