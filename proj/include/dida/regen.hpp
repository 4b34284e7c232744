#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dida/numerics.hpp"

namespace dida {

enum class RegenMode { Smoothing, Scaling };

const char* to_string(RegenMode m);
RegenMode regen_mode_from_string(const std::string& s);

// How the two pseudo-label levels are recombined. The default cell
// (z smoothing, q scaling) is the strongest combination; the other three
// exist for the interaction-strategy ablation.
struct InteractionStrategy {
    RegenMode z_mode = RegenMode::Smoothing;
    RegenMode q_mode = RegenMode::Scaling;
    double phi = 0.9;
};

// Flag bits in RegenOutput::flags.
constexpr std::uint8_t kRegenScaleFallbackQ = 1; // q-route denominator vanished
constexpr std::uint8_t kRegenScaleFallbackZ = 2; // z-route denominator vanished

struct RegenOutput {
    DenseGrid z_hat; // H x W x C
    DenseGrid q_hat; // H x W x K
    std::vector<std::uint8_t> flags; // H*W
};

// Scatter a C-simplex semantic prediction into bank-slot coordinates:
// out[k] = z[label(k)]. Pure value copy, no renormalization.
std::vector<double> scatter(std::span<const double> z, std::span<const int> bank_labels);

struct ScaleResult {
    std::vector<double> q_hat;
    bool fallback = false;
};

// Elementwise product then renormalize: q_hat_k = q_k * z_k / sum. When the
// denominator is below 1e-12 (disjoint supports) the input passes through
// unchanged and fallback is set.
ScaleResult scale(std::span<const double> q_alpha, std::span<const double> z_sc);

// Sum slot probabilities back into class coordinates:
// out[c] = sum of q_alpha[k] over slots with label c.
std::vector<double> gather(std::span<const double> q_alpha,
                           std::span<const int> bank_labels, int C);

// Convex combination phi*z + (1-phi)*q_ga, clamped per coordinate to
// [min(z_i, q_ga_i), max(z_i, q_ga_i)] so the convex bound holds exactly
// despite rounding.
std::vector<double> smooth(std::span<const double> z, std::span<const double> q_ga,
                           double phi);

// Full per-pixel regeneration. Both outputs are computed from snapshots of
// the inputs; neither feeds the other.
RegenOutput regenerate(const DenseGrid& z_map, const DenseGrid& q_alpha_map,
                       std::span<const int> bank_labels,
                       const InteractionStrategy& strategy);

} // namespace dida
