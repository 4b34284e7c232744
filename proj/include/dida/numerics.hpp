#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dida/error.hpp"
#include "dida/rng.hpp"

namespace dida {

// Row-major H x W x channels grid of doubles. Index math is
// ((y * width) + x) * channels + c throughout the project.
struct DenseGrid {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    DenseGrid() = default;
    DenseGrid(int h, int w, int c)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, 0.0) {}

    std::size_t index(int y, int x, int c) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    double& at(int y, int x, int c) { return data[index(y, x, c)]; }
    double at(int y, int x, int c) const { return data[index(y, x, c)]; }

    std::span<double> pixel(int y, int x) {
        return {data.data() + index(y, x, 0), static_cast<std::size_t>(channels)};
    }
    std::span<const double> pixel(int y, int x) const {
        return {data.data() + index(y, x, 0), static_cast<std::size_t>(channels)};
    }

    int pixel_count() const { return height * width; }
    bool same_shape(const DenseGrid& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

// A probability vector. Plain storage; on_simplex() checks the invariant.
using SimplexVector = std::vector<double>;

bool on_simplex(std::span<const double> v, double tol = 1e-9);

double l2_norm(std::span<const double> v);

// Scales v to unit Euclidean length. Zero-norm input is an error; callers
// that have a fallback use try_l2_normalize instead.
std::vector<double> l2_normalize(std::span<const double> v);

// Writes the normalized vector into out. Returns false (out untouched)
// when the norm is below 1e-30.
bool try_l2_normalize(std::span<const double> v, std::span<double> out);

// Temperature softmax with max-shift stabilisation: exp((s_i - max s) / tp)
// normalised to sum 1. tp must be positive.
std::vector<double> softmax_temp(std::span<const double> scores, double tp);
void softmax_temp_into(std::span<const double> scores, double tp, std::span<double> out);

struct KmeansResult {
    std::vector<double> centroids; // k x dim row-major
    std::vector<int> assignments;  // n entries in [0, k)
    int k = 0;
    int dim = 0;
    std::span<const double> centroid(int j) const {
        return {centroids.data() + static_cast<std::size_t>(j) * dim,
                static_cast<std::size_t>(dim)};
    }
};

// Lloyd's algorithm with distance-weighted (k-means++ style) seeding drawn
// from rng. Iterates until the assignment is stable, so the result is a
// Lloyd fixed point: every point sits with a nearest centroid (ties to the
// lowest index) and every centroid is the mean of its members. An empty
// cluster is re-seeded from the point farthest from its current centroid.
KmeansResult kmeans(std::span<const double> points, int n, int dim, int k,
                    Rng& rng, int max_iter = 1000, double tol = 1e-12);

double kmeans_cost(std::span<const double> points, int n, int dim,
                   const KmeansResult& result);

} // namespace dida
