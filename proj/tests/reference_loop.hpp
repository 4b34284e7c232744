// A from-scratch semantic-only self-training loop: source CE plus
// weak-to-strong pseudo-label training, no instance bank, no regeneration.
// The full engine with lambda_ins = 0, phi = 1 and NU sampling must
// reproduce this trajectory bit for bit.
#pragma once

#include <vector>

#include "dida/config.hpp"
#include "dida/selftrain.hpp"
#include "dida/synthdata.hpp"

namespace reference {

struct Trajectory {
    std::vector<double> l_src;
    std::vector<double> l_tgt;
    std::vector<double> miou;
    dida::PixelModel model;
};

inline Trajectory semantic_only_loop(const dida::RunConfig& cfg, const dida::Dataset& data) {
    using namespace dida;
    const Rng root(cfg.seed);
    Rng rng_model = root.fork(1);
    Rng rng_aug = root.fork(3);

    Trajectory out;
    out.model = init_model(cfg.model.patch, cfg.model.raw_dim, cfg.model.embed_dim,
                           data.class_count, rng_model);
    PixelModel& model = out.model;

    MiouResult eval = evaluate_miou(model, data.target);
    out.miou.push_back(eval.miou);

    Gradients grads;
    for (int t = 0; t < cfg.train.iterations; ++t) {
        const LabeledImage& src = data.source[t % data.source.size()];
        const LabeledImage& tgt = data.target[t % data.target.size()];

        const AugmentationPair aug = draw_augmentations(rng_aug);
        const DenseGrid weak = apply_augment(tgt.image, aug.weak, rng_aug);
        const DenseGrid strong = apply_augment(tgt.image, aug.strong, rng_aug);

        const ForwardCache fc_weak = forward(model, weak);

        BackwardBatch batch;
        batch.source_image = &src.image;
        batch.source_labels = src.labels;
        batch.target_strong = &strong;
        batch.z_hat = &fc_weak.probs; // the raw weak prediction is the pseudo-label
        batch.tau = cfg.train.tau;
        batch.lambda_ins = 0.0;
        const LossTerms lt = backward(model, batch, grads);

        for (std::size_t i = 0; i < model.embed.a.size(); ++i) {
            model.embed.a[i] -= cfg.train.learning_rate * grads.d_embed.a[i];
        }
        for (std::size_t i = 0; i < model.classifier.a.size(); ++i) {
            model.classifier.a[i] -= cfg.train.learning_rate * grads.d_classifier.a[i];
        }

        if ((t + 1) % cfg.train.eval_interval == 0 || t == cfg.train.iterations - 1) {
            eval = evaluate_miou(model, data.target);
        }
        out.l_src.push_back(lt.src);
        out.l_tgt.push_back(lt.tgt);
        out.miou.push_back(eval.miou);
    }
    return out;
}

} // namespace reference
