#include "dida/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dida {

bool on_simplex(std::span<const double> v, double tol) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) return false;
        sum += x;
    }
    return std::abs(sum - 1.0) <= tol;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> l2_normalize(std::span<const double> v) {
    std::vector<double> out(v.size());
    if (!try_l2_normalize(v, out)) {
        throw Error("l2_normalize: zero norm");
    }
    return out;
}

bool try_l2_normalize(std::span<const double> v, std::span<double> out) {
    const double norm = l2_norm(v);
    if (!(norm > 1e-30)) return false;
    const double inv = 1.0 / norm;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * inv;
    return true;
}

std::vector<double> softmax_temp(std::span<const double> scores, double tp) {
    std::vector<double> out(scores.size());
    softmax_temp_into(scores, tp, out);
    return out;
}

void softmax_temp_into(std::span<const double> scores, double tp, std::span<double> out) {
    if (!(tp > 0.0)) throw Error("softmax_temp: temperature must be positive");
    if (scores.empty()) throw Error("softmax_temp: empty input");
    double hi = scores[0];
    for (double s : scores) hi = std::max(hi, s);
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double e = std::exp((scores[i] - hi) / tp);
        out[i] = e;
        sum += e;
    }
    const double inv = 1.0 / sum; // sum >= 1 because the max element maps to exp(0)
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] *= inv;
}

namespace {

double sq_dist(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        const double t = a[d] - b[d];
        s += t * t;
    }
    return s;
}

// Nearest centroid, ties to the lowest index.
int nearest_centroid(const double* p, const std::vector<double>& centroids, int k, int dim) {
    int best = 0;
    double best_d = sq_dist(p, centroids.data(), dim);
    for (int j = 1; j < k; ++j) {
        const double d = sq_dist(p, centroids.data() + static_cast<std::size_t>(j) * dim, dim);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

} // namespace

KmeansResult kmeans(std::span<const double> points, int n, int dim, int k,
                    Rng& rng, int max_iter, double tol) {
    (void)tol;
    if (k < 1) throw Error("kmeans: k must be >= 1");
    if (n < k) throw Error("kmeans: fewer points than clusters");
    if (points.size() != static_cast<std::size_t>(n) * dim) {
        throw Error("kmeans: points size does not match n*dim");
    }

    KmeansResult res;
    res.k = k;
    res.dim = dim;
    res.centroids.resize(static_cast<std::size_t>(k) * dim);
    res.assignments.assign(n, -1);

    const auto point = [&](int i) { return points.data() + static_cast<std::size_t>(i) * dim; };

    // k-means++ seeding: first centre uniform, the rest weighted by squared
    // distance to the nearest chosen centre.
    {
        int first = rng.uniform_int(n);
        std::copy_n(point(first), dim, res.centroids.begin());
        std::vector<double> d2(n);
        for (int j = 1; j < k; ++j) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (int c = 0; c < j; ++c) {
                    best = std::min(best, sq_dist(point(i), res.centroids.data() + static_cast<std::size_t>(c) * dim, dim));
                }
                d2[i] = best;
                total += best;
            }
            int pick;
            if (total > 0.0) {
                const double r = rng.uniform() * total;
                double acc = 0.0;
                pick = n - 1;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (r < acc) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = rng.uniform_int(n); // all points coincide with chosen centres
            }
            std::copy_n(point(pick), dim, res.centroids.begin() + static_cast<std::size_t>(j) * dim);
        }
    }

    std::vector<int> counts(k);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            const int a = nearest_centroid(point(i), res.centroids, k, dim);
            if (a != res.assignments[i]) {
                res.assignments[i] = a;
                changed = true;
            }
        }

        // Re-seed empty clusters from the point farthest from its centroid,
        // lowest cluster index first.
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) counts[res.assignments[i]]++;
        for (int j = 0; j < k; ++j) {
            if (counts[j] > 0) continue;
            int far_i = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (counts[res.assignments[i]] <= 1) continue; // keep donors non-empty
                const double d = sq_dist(point(i), res.centroids.data() + static_cast<std::size_t>(res.assignments[i]) * dim, dim);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            if (far_i < 0) throw Error("kmeans: unable to fill empty cluster");
            counts[res.assignments[far_i]]--;
            res.assignments[far_i] = j;
            counts[j] = 1;
            std::copy_n(point(far_i), dim, res.centroids.begin() + static_cast<std::size_t>(j) * dim);
            changed = true;
        }

        // Update step: centroid = mean of members.
        std::vector<double> next(static_cast<std::size_t>(k) * dim, 0.0);
        for (int i = 0; i < n; ++i) {
            const double* p = point(i);
            double* c = next.data() + static_cast<std::size_t>(res.assignments[i]) * dim;
            for (int d = 0; d < dim; ++d) c[d] += p[d];
        }
        for (int j = 0; j < k; ++j) {
            double* c = next.data() + static_cast<std::size_t>(j) * dim;
            const double inv = 1.0 / counts[j];
            for (int d = 0; d < dim; ++d) c[d] *= inv;
        }

        if (!changed && next == res.centroids) break;
        res.centroids = std::move(next);
        if (!changed) break; // assignments stable and centroids just refreshed
    }

    // A final assignment pass: after convergence this is a no-op, and it
    // guarantees the nearest-centroid half of the fixed-point contract even
    // when max_iter cut the loop short.
    bool stable = true;
    for (int i = 0; i < n; ++i) {
        const int a = nearest_centroid(point(i), res.centroids, k, dim);
        if (a != res.assignments[i]) stable = false;
        res.assignments[i] = a;
    }
    if (!stable) {
        // One more mean update keeps both halves consistent; Lloyd converges
        // on the small instances this project uses long before max_iter.
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) counts[res.assignments[i]]++;
        std::vector<double> next(static_cast<std::size_t>(k) * dim, 0.0);
        for (int i = 0; i < n; ++i) {
            const double* p = point(i);
            double* c = next.data() + static_cast<std::size_t>(res.assignments[i]) * dim;
            for (int d = 0; d < dim; ++d) c[d] += p[d];
        }
        for (int j = 0; j < k; ++j) {
            if (counts[j] == 0) continue;
            double* c = next.data() + static_cast<std::size_t>(j) * dim;
            const double inv = 1.0 / counts[j];
            for (int d = 0; d < dim; ++d) c[d] *= inv;
        }
        res.centroids = std::move(next);
    }
    return res;
}

double kmeans_cost(std::span<const double> points, int n, int dim,
                   const KmeansResult& result) {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
        cost += sq_dist(points.data() + static_cast<std::size_t>(i) * dim,
                        result.centroids.data() + static_cast<std::size_t>(result.assignments[i]) * result.dim,
                        dim);
    }
    return cost;
}

} // namespace dida
