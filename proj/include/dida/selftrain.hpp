#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dida/bank.hpp"
#include "dida/config.hpp"
#include "dida/discrimination.hpp"
#include "dida/model.hpp"
#include "dida/regen.hpp"
#include "dida/synthdata.hpp"

namespace dida {

// ---- semantic losses -------------------------------------------------------

// Mean over pixels of -log p[true class], log clamped at 1e-12.
double source_loss(const DenseGrid& probs, std::span<const int> labels);

struct PseudoLabels {
    std::vector<int> hard;          // per-pixel argmax, ties to lowest index
    std::vector<double> confidence; // per-pixel max probability
};
PseudoLabels target_pseudo(const DenseGrid& probs_weak);

// Thresholded target loss: pixels whose max z_hat exceeds tau contribute
// -log p_strong[argmax z_hat] (or soft CE against z_hat); mean over all
// pixels. gate_probs, when given, supplies the gating confidences instead of
// z_hat itself.
double target_loss(const DenseGrid& probs_strong, const DenseGrid& z_hat_map,
                   double tau, bool soft_target = false,
                   const DenseGrid* gate_probs = nullptr);

double overall_loss(double l_src, double l_tgt, double l_ins, double lambda_ins);

// ---- augmentations ---------------------------------------------------------

struct AugmentParams {
    std::array<double, 3> gain{1.0, 1.0, 1.0};
    std::array<double, 3> offset{0.0, 0.0, 0.0};
    double noise_std = 0.0;
    int blur_radius = 0;
};

struct AugmentationPair {
    AugmentParams weak;
    AugmentParams strong;
};

// Fixed draw order (weak gain, weak offset, strong gain, strong offset,
// blur radius) so every training configuration consumes the augmentation
// stream identically.
AugmentationPair draw_augmentations(Rng& rng);

// Blur first, then per-channel gain/offset, then additive noise, clamped to
// [0,1]. Consumes H*W*3 gaussians iff params.noise_std > 0. Both views stay
// pixel-aligned with the input; there are no spatial transforms.
DenseGrid apply_augment(const DenseGrid& image, const AugmentParams& params, Rng& rng);

// ---- gradients -------------------------------------------------------------

struct Gradients {
    Matrix d_embed;      // same shape as model.embed
    Matrix d_classifier; // same shape as model.classifier
};

// One training step's inputs. Pseudo maps (z_hat / q_hat) are constants:
// gradients flow only through the source and strong-view branches, matching
// the stop-gradient treatment of pseudo-labels. Null members switch the
// corresponding loss term off.
struct BackwardBatch {
    const DenseGrid* source_image = nullptr;
    std::span<const int> source_labels;
    const DenseGrid* target_strong = nullptr;
    const DenseGrid* z_hat = nullptr;      // H x W x C
    const DenseGrid* gate_probs = nullptr; // optional gate override for L_tgt
    const DenseGrid* q_hat = nullptr;      // H x W x K
    const InstanceBank* bank = nullptr;    // required when q_hat is set
    double tp = 0.1;
    double tau = 0.968;
    double lambda_ins = 1.0;
    bool soft_target = false;
    bool instance_loss_sum = false;
};

struct LossTerms {
    double src = 0.0;
    double tgt = 0.0;
    double ins = 0.0;
    double overall = 0.0;
};

// Analytic gradients of L_overall = L_src + L_tgt + lambda_ins * L_ins with
// respect to the embedding and classifier matrices (the featurizer and the
// bank are constants). Returns the loss values computed along the way.
// Throws on non-finite gradients.
LossTerms backward(const PixelModel& model, const BackwardBatch& batch, Gradients& grads);

// ---- evaluation ------------------------------------------------------------

struct MiouResult {
    std::vector<double> per_class; // IoU per class; NaN when excluded
    std::vector<bool> present;     // class seen in prediction or truth
    double miou = 0.0;             // mean over present classes
};

// IoU_c = TP / (TP + FP + FN); classes absent from both prediction and
// truth are excluded from the mean.
class MiouAccumulator {
public:
    explicit MiouAccumulator(int class_count)
        : tp_(class_count, 0), fp_(class_count, 0), fn_(class_count, 0) {}
    void add(int predicted, int truth);
    MiouResult result() const;

private:
    std::vector<long long> tp_, fp_, fn_;
};

MiouResult evaluate_miou(const PixelModel& model, std::span<const LabeledImage> images);

// ---- training loop ---------------------------------------------------------

struct MetricsRow {
    long iter = 0;
    double l_src = 0.0;
    double l_tgt = 0.0;
    double l_ins = 0.0;
    double l_overall = 0.0;
    double miou = 0.0;                 // most recent evaluation
    std::vector<double> per_class_iou; // ditto
};

struct TrainResult {
    std::vector<MetricsRow> rows;
    PixelModel model;
    InstanceBank bank;
};

// Deterministic single-threaded self-training loop. Row 0 holds the initial
// evaluation (losses NaN); row t the state after iteration t. mIoU columns
// carry the latest evaluation forward between eval_interval boundaries.
TrainResult train(const RunConfig& cfg, const Dataset& data);

std::string metrics_csv(const std::vector<MetricsRow>& rows, int class_count);

// ---- checkpoints -----------------------------------------------------------

struct Checkpoint {
    PixelModel model;
    InstanceBank bank;
};

std::vector<std::uint8_t> save_checkpoint(const PixelModel& model, const InstanceBank& bank);
Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint_file(const PixelModel& model, const InstanceBank& bank,
                          const std::string& path);
Checkpoint load_checkpoint_file(const std::string& path);

} // namespace dida
