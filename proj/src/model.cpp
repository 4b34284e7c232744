#include "dida/model.hpp"

#include <algorithm>
#include <cmath>

#include "dida/error.hpp"

namespace dida {

namespace {

void fill_gaussian(Matrix& m, double scale, Rng& rng) {
    for (double& v : m.a) v = scale * rng.gaussian();
}

} // namespace

PixelModel init_model(int patch, int raw_dim, int embed_dim, int class_count, Rng& rng) {
    if (patch < 1 || patch % 2 == 0) throw Error("init_model: patch must be odd and positive");
    if (raw_dim < 1 || embed_dim < 1 || class_count < 1) {
        throw Error("init_model: dimensions must be positive");
    }
    PixelModel m;
    m.patch = patch;
    m.raw_dim = raw_dim;
    m.embed_dim = embed_dim;
    m.class_count = class_count;
    const int patch_vol = 3 * patch * patch;
    m.featurizer = Matrix(raw_dim, patch_vol);
    m.embed = Matrix(embed_dim, raw_dim);
    m.classifier = Matrix(class_count, embed_dim);
    fill_gaussian(m.featurizer, 1.0 / std::sqrt(static_cast<double>(patch_vol)), rng);
    fill_gaussian(m.embed, 1.0 / std::sqrt(static_cast<double>(raw_dim)), rng);
    fill_gaussian(m.classifier, 1.0 / std::sqrt(static_cast<double>(embed_dim)), rng);
    return m;
}

ForwardCache forward(const PixelModel& model, const DenseGrid& image) {
    if (image.channels != 3) throw Error("forward: image must have 3 channels");
    const int H = image.height;
    const int W = image.width;
    const int D0 = model.raw_dim;
    const int D = model.embed_dim;
    const int C = model.class_count;
    const int r = model.patch / 2;
    const int patch_vol = 3 * model.patch * model.patch;

    ForwardCache fc;
    fc.raw = DenseGrid(H, W, D0);
    fc.embed = DenseGrid(H, W, D);
    fc.embed_norm.assign(static_cast<std::size_t>(H) * W, 0.0);
    fc.probs = DenseGrid(H, W, C);

    std::vector<double> patch(patch_vol);
    std::vector<double> u(D);
    std::vector<double> logits(C);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            // Clamp-to-edge patch extraction, (dy, dx, channel) order.
            int at = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = std::clamp(y + dy, 0, H - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = std::clamp(x + dx, 0, W - 1);
                    const auto px = image.pixel(yy, xx);
                    patch[at++] = px[0];
                    patch[at++] = px[1];
                    patch[at++] = px[2];
                }
            }

            auto raw = fc.raw.pixel(y, x);
            for (int i = 0; i < D0; ++i) {
                const double* row = model.featurizer.row(i);
                double s = 0.0;
                for (int j = 0; j < patch_vol; ++j) s += row[j] * patch[j];
                raw[i] = s;
            }

            for (int i = 0; i < D; ++i) {
                const double* row = model.embed.row(i);
                double s = 0.0;
                for (int j = 0; j < D0; ++j) s += row[j] * raw[j];
                u[i] = s;
            }
            auto e = fc.embed.pixel(y, x);
            const double norm = l2_norm(u);
            if (norm > 1e-30) {
                fc.embed_norm[static_cast<std::size_t>(y) * W + x] = norm;
                for (int i = 0; i < D; ++i) e[i] = u[i] / norm;
            } else {
                std::fill(e.begin(), e.end(), 0.0); // uniform probs below
            }

            for (int c = 0; c < C; ++c) {
                const double* row = model.classifier.row(c);
                double s = 0.0;
                for (int i = 0; i < D; ++i) s += row[i] * e[i];
                logits[c] = s;
            }
            softmax_temp_into(logits, 1.0, fc.probs.pixel(y, x));
        }
    }
    return fc;
}

} // namespace dida
