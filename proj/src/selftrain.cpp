#include "dida/selftrain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "dida/io.hpp"

namespace dida {

namespace {

constexpr double kLogFloor = 1e-12;

int argmax_lowest(std::span<const double> v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = static_cast<int>(i);
    }
    return best;
}

} // namespace

double source_loss(const DenseGrid& probs, std::span<const int> labels) {
    const std::size_t n = static_cast<std::size_t>(probs.pixel_count());
    if (labels.size() != n) throw Error("source_loss: label count mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        if (y < 0 || y >= probs.channels) throw Error("source_loss: label out of range");
        sum -= std::log(std::max(probs.data[i * probs.channels + y], kLogFloor));
    }
    return sum / static_cast<double>(n);
}

PseudoLabels target_pseudo(const DenseGrid& probs_weak) {
    const int n = probs_weak.pixel_count();
    PseudoLabels out;
    out.hard.resize(n);
    out.confidence.resize(n);
    for (int i = 0; i < n; ++i) {
        const std::span<const double> p{
            probs_weak.data.data() + static_cast<std::size_t>(i) * probs_weak.channels,
            static_cast<std::size_t>(probs_weak.channels)};
        const int c = argmax_lowest(p);
        out.hard[i] = c;
        out.confidence[i] = p[c];
    }
    return out;
}

double target_loss(const DenseGrid& probs_strong, const DenseGrid& z_hat_map,
                   double tau, bool soft_target, const DenseGrid* gate_probs) {
    if (!probs_strong.same_shape(z_hat_map)) throw Error("target_loss: shape mismatch");
    if (gate_probs && gate_probs->pixel_count() != z_hat_map.pixel_count()) {
        throw Error("target_loss: gate grid shape mismatch");
    }
    const int n = probs_strong.pixel_count();
    const int C = probs_strong.channels;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::span<const double> zh{
            z_hat_map.data.data() + static_cast<std::size_t>(i) * C,
            static_cast<std::size_t>(C)};
        const std::span<const double> gate =
            gate_probs ? std::span<const double>{gate_probs->data.data() +
                                                     static_cast<std::size_t>(i) * gate_probs->channels,
                                                 static_cast<std::size_t>(gate_probs->channels)}
                       : zh;
        double conf = gate[0];
        for (std::size_t c = 1; c < gate.size(); ++c) conf = std::max(conf, gate[c]);
        if (!(conf > tau)) continue;

        const std::span<const double> p{
            probs_strong.data.data() + static_cast<std::size_t>(i) * C,
            static_cast<std::size_t>(C)};
        if (soft_target) {
            for (int c = 0; c < C; ++c) {
                if (zh[c] == 0.0) continue;
                sum -= zh[c] * std::log(std::max(p[c], kLogFloor));
            }
        } else {
            sum -= std::log(std::max(p[argmax_lowest(zh)], kLogFloor));
        }
    }
    return sum / static_cast<double>(n);
}

double overall_loss(double l_src, double l_tgt, double l_ins, double lambda_ins) {
    return l_src + l_tgt + lambda_ins * l_ins;
}

AugmentationPair draw_augmentations(Rng& rng) {
    AugmentationPair p;
    for (int c = 0; c < 3; ++c) p.weak.gain[c] = rng.uniform(0.97, 1.03);
    for (int c = 0; c < 3; ++c) p.weak.offset[c] = rng.uniform(-0.01, 0.01);
    for (int c = 0; c < 3; ++c) p.strong.gain[c] = rng.uniform(0.85, 1.15);
    for (int c = 0; c < 3; ++c) p.strong.offset[c] = rng.uniform(-0.06, 0.06);
    p.strong.blur_radius = rng.uniform_int(2);
    p.strong.noise_std = 0.03;
    return p;
}

DenseGrid apply_augment(const DenseGrid& image, const AugmentParams& params, Rng& rng) {
    const int H = image.height;
    const int W = image.width;
    DenseGrid out(H, W, image.channels);

    const DenseGrid* src = &image;
    DenseGrid blurred;
    if (params.blur_radius > 0) {
        // Box blur, window truncated at the borders. Spatially local but
        // pixel-aligned, so weak/strong correspondence is preserved.
        blurred = DenseGrid(H, W, image.channels);
        const int r = params.blur_radius;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const int y0 = std::max(0, y - r), y1 = std::min(H - 1, y + r);
                const int x0 = std::max(0, x - r), x1 = std::min(W - 1, x + r);
                const double inv = 1.0 / ((y1 - y0 + 1) * (x1 - x0 + 1));
                for (int c = 0; c < image.channels; ++c) {
                    double s = 0.0;
                    for (int yy = y0; yy <= y1; ++yy) {
                        for (int xx = x0; xx <= x1; ++xx) s += image.at(yy, xx, c);
                    }
                    blurred.at(y, x, c) = s * inv;
                }
            }
        }
        src = &blurred;
    }

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            for (int c = 0; c < image.channels; ++c) {
                double v = src->at(y, x, c) * params.gain[c] + params.offset[c];
                if (params.noise_std > 0.0) v += params.noise_std * rng.gaussian();
                out.at(y, x, c) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return out;
}

LossTerms backward(const PixelModel& model, const BackwardBatch& batch, Gradients& grads) {
    const int D0 = model.raw_dim;
    const int D = model.embed_dim;
    const int C = model.class_count;
    grads.d_embed = Matrix(D, D0);
    grads.d_classifier = Matrix(C, D);
    LossTerms lt;

    // Shared tail of the chain rule: logit grads ds (C) and instance score
    // grads dt (K) at one pixel flow into dV directly and into dW through
    // the normalization Jacobian (I - e e^T)/||u||.
    std::vector<double> g_e(D);
    const auto accumulate = [&](const ForwardCache& fc, int y, int x,
                                std::span<const double> ds, std::span<const double> dt) {
        const auto e = fc.embed.pixel(y, x);
        const auto raw = fc.raw.pixel(y, x);
        const double nu = fc.embed_norm[static_cast<std::size_t>(y) * fc.embed.width + x];

        std::fill(g_e.begin(), g_e.end(), 0.0);
        if (!ds.empty()) {
            for (int c = 0; c < C; ++c) {
                double* grow = grads.d_classifier.row(c);
                const double* vrow = model.classifier.row(c);
                const double gs = ds[c];
                for (int d = 0; d < D; ++d) {
                    grow[d] += gs * e[d];
                    g_e[d] += gs * vrow[d];
                }
            }
        }
        if (!dt.empty()) {
            const InstanceBank& bank = *batch.bank;
            for (std::size_t k = 0; k < dt.size(); ++k) {
                if (dt[k] == 0.0) continue;
                const double* brow = bank.features.data() + k * D;
                for (int d = 0; d < D; ++d) g_e[d] += dt[k] * brow[d];
            }
        }
        if (nu <= 0.0) return; // zero-norm fallback: embedding is constant
        double dot = 0.0;
        for (int d = 0; d < D; ++d) dot += g_e[d] * e[d];
        const double inv_nu = 1.0 / nu;
        for (int d = 0; d < D; ++d) {
            const double gu = (g_e[d] - e[d] * dot) * inv_nu;
            double* wrow = grads.d_embed.row(d);
            for (int j = 0; j < D0; ++j) wrow[j] += gu * raw[j];
        }
    };

    std::vector<double> ds(C);
    if (batch.source_image) {
        const ForwardCache fc = forward(model, *batch.source_image);
        const int n = fc.probs.pixel_count();
        if (batch.source_labels.size() != static_cast<std::size_t>(n)) {
            throw Error("backward: source label count mismatch");
        }
        const double w = 1.0 / static_cast<double>(n);
        double sum = 0.0;
        for (int y = 0; y < fc.probs.height; ++y) {
            for (int x = 0; x < fc.probs.width; ++x) {
                const int i = y * fc.probs.width + x;
                const int label = batch.source_labels[i];
                if (label < 0 || label >= C) throw Error("backward: source label out of range");
                const auto p = fc.probs.pixel(y, x);
                sum -= std::log(std::max(p[label], kLogFloor));
                for (int c = 0; c < C; ++c) ds[c] = (p[c] - (c == label ? 1.0 : 0.0)) * w;
                accumulate(fc, y, x, ds, {});
            }
        }
        lt.src = sum / static_cast<double>(n);
    }

    const bool want_tgt = batch.target_strong && batch.z_hat;
    const bool want_ins = batch.target_strong && batch.q_hat;
    if (want_tgt || want_ins) {
        const ForwardCache fc = forward(model, *batch.target_strong);
        const int H = fc.probs.height;
        const int W = fc.probs.width;
        const int n = H * W;
        if (want_tgt && (batch.z_hat->height != H || batch.z_hat->width != W ||
                         batch.z_hat->channels != C)) {
            throw Error("backward: z_hat shape mismatch");
        }
        if (want_ins) {
            if (!batch.bank) throw Error("backward: q_hat without a bank");
            if (batch.q_hat->height != H || batch.q_hat->width != W ||
                batch.q_hat->channels != batch.bank->size()) {
                throw Error("backward: q_hat shape mismatch");
            }
            if (batch.bank->dim != D) throw Error("backward: bank dim mismatch");
        }
        const int K = want_ins ? batch.bank->size() : 0;
        const double w_tgt = 1.0 / static_cast<double>(n);
        const double w_ins = batch.instance_loss_sum ? 1.0 : 1.0 / static_cast<double>(n);

        std::vector<double> dt(K);
        std::vector<double> scores(K), q(K);
        double sum_tgt = 0.0, sum_ins = 0.0;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const auto p = fc.probs.pixel(y, x);
                bool use_ds = false;
                if (want_tgt) {
                    const auto zh = batch.z_hat->pixel(y, x);
                    const auto gate = batch.gate_probs ? batch.gate_probs->pixel(y, x) : zh;
                    double conf = gate[0];
                    for (std::size_t c = 1; c < gate.size(); ++c) conf = std::max(conf, gate[c]);
                    if (conf > batch.tau) {
                        use_ds = true;
                        if (batch.soft_target) {
                            double mass = 0.0;
                            for (int c = 0; c < C; ++c) {
                                mass += zh[c];
                                if (zh[c] != 0.0) {
                                    sum_tgt -= zh[c] * std::log(std::max(p[c], kLogFloor));
                                }
                            }
                            for (int c = 0; c < C; ++c) ds[c] = (mass * p[c] - zh[c]) * w_tgt;
                        } else {
                            const int cstar = argmax_lowest(zh);
                            sum_tgt -= std::log(std::max(p[cstar], kLogFloor));
                            for (int c = 0; c < C; ++c) {
                                ds[c] = (p[c] - (c == cstar ? 1.0 : 0.0)) * w_tgt;
                            }
                        }
                    }
                }

                bool use_dt = false;
                if (want_ins) {
                    const auto e = fc.embed.pixel(y, x);
                    const double nu = fc.embed_norm[static_cast<std::size_t>(y) * W + x];
                    const auto qh = batch.q_hat->pixel(y, x);
                    if (nu > 0.0) {
                        const InstanceBank& bank = *batch.bank;
                        for (int k = 0; k < K; ++k) {
                            const double* brow = bank.features.data() + static_cast<std::size_t>(k) * D;
                            double dotp = 0.0;
                            for (int d = 0; d < D; ++d) dotp += e[d] * brow[d];
                            scores[k] = dotp;
                        }
                        softmax_temp_into(scores, batch.tp, q);
                    } else {
                        std::fill(q.begin(), q.end(), 1.0 / K); // constant, no gradient
                    }
                    double mass = 0.0;
                    for (int k = 0; k < K; ++k) {
                        mass += qh[k];
                        if (qh[k] != 0.0) {
                            sum_ins -= qh[k] * std::log(std::max(q[k], kLogFloor));
                        }
                    }
                    if (nu > 0.0 && batch.lambda_ins != 0.0) {
                        use_dt = true;
                        const double scale = batch.lambda_ins * w_ins / batch.tp;
                        for (int k = 0; k < K; ++k) dt[k] = (mass * q[k] - qh[k]) * scale;
                    }
                }

                if (use_ds || use_dt) {
                    accumulate(fc, y, x,
                               use_ds ? std::span<const double>(ds) : std::span<const double>{},
                               use_dt ? std::span<const double>(dt) : std::span<const double>{});
                }
            }
        }
        lt.tgt = want_tgt ? sum_tgt / static_cast<double>(n) : 0.0;
        lt.ins = want_ins ? sum_ins * w_ins : 0.0;
    }

    lt.overall = overall_loss(lt.src, lt.tgt, lt.ins, batch.lambda_ins);

    for (double v : grads.d_embed.a) {
        if (!std::isfinite(v)) throw Error("backward: non-finite embed gradient");
    }
    for (double v : grads.d_classifier.a) {
        if (!std::isfinite(v)) throw Error("backward: non-finite classifier gradient");
    }
    return lt;
}

void MiouAccumulator::add(int predicted, int truth) {
    if (truth < 0 || truth >= static_cast<int>(tp_.size()) || predicted < 0 ||
        predicted >= static_cast<int>(tp_.size())) {
        throw Error("miou: class id out of range");
    }
    if (predicted == truth) {
        tp_[truth]++;
    } else {
        fp_[predicted]++;
        fn_[truth]++;
    }
}

MiouResult MiouAccumulator::result() const {
    const int C = static_cast<int>(tp_.size());
    MiouResult res;
    res.per_class.assign(C, std::numeric_limits<double>::quiet_NaN());
    res.present.assign(C, false);
    double sum = 0.0;
    int count = 0;
    for (int c = 0; c < C; ++c) {
        const long long denom = tp_[c] + fp_[c] + fn_[c];
        if (denom == 0) continue; // absent from both prediction and truth
        res.present[c] = true;
        res.per_class[c] = static_cast<double>(tp_[c]) / static_cast<double>(denom);
        sum += res.per_class[c];
        count++;
    }
    res.miou = count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
    return res;
}

MiouResult evaluate_miou(const PixelModel& model, std::span<const LabeledImage> images) {
    const int C = model.class_count;
    MiouAccumulator acc(C);
    for (const auto& img : images) {
        const ForwardCache fc = forward(model, img.image);
        const int n = fc.probs.pixel_count();
        for (int i = 0; i < n; ++i) {
            const std::span<const double> p{
                fc.probs.data.data() + static_cast<std::size_t>(i) * C,
                static_cast<std::size_t>(C)};
            acc.add(argmax_lowest(p), img.labels[i]);
        }
    }
    return acc.result();
}

namespace {

// Offline bank init: random real instance embeddings from a handful of
// source images, labeled by the ground truth.
std::vector<SeedInstance> build_seed_pool(const PixelModel& model,
                                          const std::vector<LabeledImage>& source,
                                          int want, Rng& rng) {
    std::vector<SeedInstance> pool;
    if (source.empty() || want <= 0) return pool;
    const int n_imgs = static_cast<int>(std::min<std::size_t>(8, source.size()));
    std::vector<int> img_ids(n_imgs);
    std::vector<ForwardCache> caches(n_imgs);
    for (int i = 0; i < n_imgs; ++i) {
        img_ids[i] = rng.uniform_int(static_cast<int>(source.size()));
        caches[i] = forward(model, source[img_ids[i]].image);
    }
    pool.reserve(want);
    for (int s = 0; s < want; ++s) {
        const int i = rng.uniform_int(n_imgs);
        const auto& img = source[img_ids[i]];
        const int px = rng.uniform_int(static_cast<int>(img.labels.size()));
        const auto& fc = caches[i];
        if (fc.embed_norm[px] <= 0.0) continue;
        SeedInstance seed;
        const double* e = fc.embed.data.data() + static_cast<std::size_t>(px) * fc.embed.channels;
        seed.embedding.assign(e, e + fc.embed.channels);
        seed.label = img.labels[px];
        pool.push_back(std::move(seed));
    }
    return pool;
}

} // namespace

TrainResult train(const RunConfig& cfg, const Dataset& data) {
    validate_config(cfg);
    const int iters = cfg.train.iterations;
    if (iters > 0 && (data.source.empty() || data.target.empty())) {
        throw Error("train: non-empty source and target splits required");
    }
    const int C = data.class_count;
    const double lr = cfg.train.learning_rate;
    const BankUpdatePolicy policy = make_bank_policy(cfg);
    const InteractionStrategy strategy = make_interaction(cfg);
    const std::vector<double> class_freq = tail_frequencies(C, cfg.data.tail_exponent);

    // Independent named streams: consuming one never shifts another, which
    // is what keeps disabled mechanisms from perturbing the trajectory.
    const Rng root(cfg.seed);
    Rng rng_model = root.fork(1);
    Rng rng_bank = root.fork(2);
    Rng rng_aug = root.fork(3);

    TrainResult result;
    result.model = init_model(cfg.model.patch, cfg.model.raw_dim, cfg.model.embed_dim, C,
                              rng_model);
    const auto seed_pool =
        build_seed_pool(result.model, data.source, 4 * cfg.bank.size, rng_bank);
    result.bank = init_bank(cfg.bank.size, C, cfg.model.embed_dim, rng_bank, seed_pool,
                            policy.sampling, class_freq);

    PixelModel& model = result.model;
    InstanceBank& bank = result.bank;

    MiouResult eval = evaluate_miou(model, data.target);
    MetricsRow row0;
    row0.iter = 0;
    row0.l_src = row0.l_tgt = row0.l_ins = row0.l_overall =
        std::numeric_limits<double>::quiet_NaN();
    row0.miou = eval.miou;
    row0.per_class_iou = eval.per_class;
    result.rows.push_back(std::move(row0));

    const bool need_q = cfg.train.lambda_ins > 0.0 || cfg.regen.enabled;
    Gradients grads;
    for (int t = 0; t < iters; ++t) {
        const LabeledImage& src = data.source[t % data.source.size()];
        const LabeledImage& tgt = data.target[t % data.target.size()];

        const AugmentationPair aug = draw_augmentations(rng_aug);
        const DenseGrid weak = apply_augment(tgt.image, aug.weak, rng_aug);
        const DenseGrid strong = apply_augment(tgt.image, aug.strong, rng_aug);

        const ForwardCache fc_weak = forward(model, weak);
        InstancePredictionMap q_alpha;
        if (need_q) q_alpha = instance_predict(fc_weak.embed, bank, cfg.instance.temperature);

        RegenOutput regen;
        const DenseGrid* z_hat = &fc_weak.probs;
        const DenseGrid* q_hat = need_q ? &q_alpha.grid : nullptr;
        if (cfg.regen.enabled) {
            regen = regenerate(fc_weak.probs, q_alpha.grid, bank.labels, strategy);
            z_hat = &regen.z_hat;
            q_hat = &regen.q_hat;
        }

        BackwardBatch batch;
        batch.source_image = &src.image;
        batch.source_labels = src.labels;
        batch.target_strong = &strong;
        batch.z_hat = z_hat;
        batch.gate_probs = cfg.train.gate_on_original ? &fc_weak.probs : nullptr;
        batch.q_hat = cfg.train.lambda_ins > 0.0 ? q_hat : nullptr;
        batch.bank = &bank;
        batch.tp = cfg.instance.temperature;
        batch.tau = cfg.train.tau;
        batch.lambda_ins = cfg.train.lambda_ins;
        batch.soft_target = cfg.train.soft_target_loss;
        batch.instance_loss_sum = cfg.train.instance_loss_sum;

        const LossTerms lt = backward(model, batch, grads);
        for (std::size_t i = 0; i < model.embed.a.size(); ++i) {
            model.embed.a[i] -= lr * grads.d_embed.a[i];
        }
        for (std::size_t i = 0; i < model.classifier.a.size(); ++i) {
            model.classifier.a[i] -= lr * grads.d_classifier.a[i];
        }

        // Bank refresh from the current source image, post-step weights.
        if ((t + 1) % policy.interval == 0) {
            const ForwardCache fc_src = forward(model, src.image);
            const auto mask = boundary_mask(src.labels, fc_src.embed.height,
                                            fc_src.embed.width, cfg.bank.sigma);
            const auto selected =
                select_embeddings(fc_src.embed, src.labels, mask, rng_bank, policy);
            ema_update(bank, selected, policy);
        }

        if ((t + 1) % cfg.train.eval_interval == 0 || t == iters - 1) {
            eval = evaluate_miou(model, data.target);
        }
        MetricsRow row;
        row.iter = t + 1;
        row.l_src = lt.src;
        row.l_tgt = lt.tgt;
        row.l_ins = lt.ins;
        row.l_overall = lt.overall;
        row.miou = eval.miou;
        row.per_class_iou = eval.per_class;
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows, int class_count) {
    std::string out = "iter,L_src,L_tgt,L_ins,L_overall,miou_target";
    for (int c = 0; c < class_count; ++c) {
        out += ",iou_class_" + std::to_string(c);
    }
    out += "\n";
    for (const auto& row : rows) {
        out += std::to_string(row.iter);
        out += "," + format_double(row.l_src);
        out += "," + format_double(row.l_tgt);
        out += "," + format_double(row.l_ins);
        out += "," + format_double(row.l_overall);
        out += "," + format_double(row.miou);
        for (int c = 0; c < class_count; ++c) {
            out += "," + format_double(c < static_cast<int>(row.per_class_iou.size())
                                           ? row.per_class_iou[c]
                                           : std::numeric_limits<double>::quiet_NaN());
        }
        out += "\n";
    }
    return out;
}

namespace {
constexpr char kCkptMagic[9] = "DIDACKPT";
constexpr std::uint32_t kCkptVersion = 1;

void write_matrix(ByteWriter& w, const Matrix& m) {
    w.u32(static_cast<std::uint32_t>(m.rows));
    w.u32(static_cast<std::uint32_t>(m.cols));
    for (double v : m.a) w.f64(v);
}

Matrix read_matrix(ByteReader& r) {
    const int rows = static_cast<int>(r.u32());
    const int cols = static_cast<int>(r.u32());
    if (rows < 1 || cols < 1) throw IoError("checkpoint: bad matrix dims");
    Matrix m(rows, cols);
    for (double& v : m.a) v = r.f64();
    return m;
}
} // namespace

std::vector<std::uint8_t> save_checkpoint(const PixelModel& model, const InstanceBank& bank) {
    ByteWriter w;
    w.magic(kCkptMagic);
    w.u32(kCkptVersion);
    w.u32(static_cast<std::uint32_t>(model.patch));
    w.u32(static_cast<std::uint32_t>(model.raw_dim));
    w.u32(static_cast<std::uint32_t>(model.embed_dim));
    w.u32(static_cast<std::uint32_t>(model.class_count));
    write_matrix(w, model.featurizer);
    write_matrix(w, model.embed);
    write_matrix(w, model.classifier);
    const auto bank_bytes = save_bank(bank);
    w.u64(bank_bytes.size());
    w.bytes(bank_bytes);
    return w.take();
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    r.magic(kCkptMagic, "checkpoint");
    const std::uint32_t version = r.u32();
    if (version != kCkptVersion) {
        throw IoError("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.model.patch = static_cast<int>(r.u32());
    ckpt.model.raw_dim = static_cast<int>(r.u32());
    ckpt.model.embed_dim = static_cast<int>(r.u32());
    ckpt.model.class_count = static_cast<int>(r.u32());
    ckpt.model.featurizer = read_matrix(r);
    ckpt.model.embed = read_matrix(r);
    ckpt.model.classifier = read_matrix(r);
    const std::uint64_t bank_size = r.u64();
    if (bank_size != r.remaining()) throw IoError("checkpoint: bank blob size mismatch");
    std::vector<std::uint8_t> bank_bytes(bytes.end() - bank_size, bytes.end());
    ckpt.bank = load_bank(bank_bytes);
    return ckpt;
}

void save_checkpoint_file(const PixelModel& model, const InstanceBank& bank,
                          const std::string& path) {
    write_file(path, save_checkpoint(model, bank));
}

Checkpoint load_checkpoint_file(const std::string& path) {
    return load_checkpoint(read_file(path));
}

} // namespace dida
