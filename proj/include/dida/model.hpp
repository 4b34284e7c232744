#pragma once

#include <vector>

#include "dida/numerics.hpp"
#include "dida/rng.hpp"

namespace dida {

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<std::size_t>(r) * cols; }
};

// Tiny per-pixel segmentation model standing in for an encoder/decoder pair:
// a frozen random projection from k x k color patches to raw features, a
// learnable embedding matrix whose output is unit-normalized, and a linear
// softmax classifier on top of the embedding.
struct PixelModel {
    int patch = 3;       // odd window side; patches use clamp-to-edge borders
    int raw_dim = 8;     // D0
    int embed_dim = 6;   // D
    int class_count = 3; // C
    Matrix featurizer;   // raw_dim x (3 * patch * patch), frozen after init
    Matrix embed;        // embed_dim x raw_dim (W)
    Matrix classifier;   // class_count x embed_dim (V)
};

// Draw order: featurizer, embed, classifier, each row-major gaussian scaled
// by 1/sqrt(fan_in).
PixelModel init_model(int patch, int raw_dim, int embed_dim, int class_count, Rng& rng);

struct ForwardCache {
    DenseGrid raw;   // H x W x raw_dim
    DenseGrid embed; // H x W x embed_dim; unit rows, or all-zero on fallback
    std::vector<double> embed_norm; // ||W * raw|| per pixel; 0 marks fallback
    DenseGrid probs; // H x W x class_count, rows on the simplex
};

// Per-pixel forward pass. A zero-norm pre-normalization embedding falls back
// to the zero vector, which makes the classifier output uniform.
ForwardCache forward(const PixelModel& model, const DenseGrid& image);

} // namespace dida
