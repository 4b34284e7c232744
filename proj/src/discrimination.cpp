#include "dida/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dida {

InstancePredictionMap instance_predict(const DenseGrid& features,
                                       const InstanceBank& bank, double tp) {
    if (!(tp > 0.0)) throw Error("instance_predict: temperature must be positive");
    if (features.channels != bank.dim) {
        throw Error("instance_predict: feature dim does not match bank dim");
    }
    const int K = bank.size();
    InstancePredictionMap out;
    out.grid = DenseGrid(features.height, features.width, K);
    out.bank_version = bank.updates_applied;

    std::vector<double> query(features.channels);
    std::vector<double> scores(K);
    for (int y = 0; y < features.height; ++y) {
        for (int x = 0; x < features.width; ++x) {
            const auto e = features.pixel(y, x);
            auto q = out.grid.pixel(y, x);
            if (!try_l2_normalize(e, query)) {
                const double u = 1.0 / K;
                std::fill(q.begin(), q.end(), u);
                continue;
            }
            for (int k = 0; k < K; ++k) {
                const double* row = bank.features.data() + static_cast<std::size_t>(k) * bank.dim;
                double dot = 0.0;
                for (int d = 0; d < bank.dim; ++d) dot += query[d] * row[d];
                scores[k] = dot;
            }
            softmax_temp_into(scores, tp, q);
        }
    }
    return out;
}

double instance_loss(const InstancePredictionMap& pred,
                     const InstancePredictionMap& pseudo,
                     bool sum_reduction) {
    if (!pred.grid.same_shape(pseudo.grid)) {
        throw Error("instance_loss: shape mismatch");
    }
    const std::size_t n = pred.grid.data.size();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = pseudo.grid.data[i];
        if (target == 0.0) continue;
        loss -= target * std::log(std::max(pred.grid.data[i], 1e-12));
    }
    if (!sum_reduction) loss /= pred.grid.pixel_count();
    return loss;
}

} // namespace dida
