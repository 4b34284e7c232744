#pragma once

#include <cstdint>

#include "dida/bank.hpp"
#include "dida/numerics.hpp"

namespace dida {

// H x W grid of K-simplex vectors: per-pixel probability of being recognised
// as each bank instance. bank_version records bank.updates_applied at the
// time of prediction.
struct InstancePredictionMap {
    DenseGrid grid; // channels = K
    std::uint64_t bank_version = 0;
};

// Per pixel: normalize the query embedding, dot against every bank row,
// temperature softmax. A zero-norm query yields the uniform K-simplex.
InstancePredictionMap instance_predict(const DenseGrid& features,
                                       const InstanceBank& bank, double tp);

// Cross-entropy of pred against the pseudo distribution, log clamped at
// 1e-12. Mean over pixels by default; sum_reduction keeps the raw sum.
double instance_loss(const InstancePredictionMap& pred,
                     const InstancePredictionMap& pseudo,
                     bool sum_reduction = false);

} // namespace dida
