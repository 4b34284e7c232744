#include "dida/regen.hpp"

#include <algorithm>
#include <cmath>

#include "dida/error.hpp"

namespace dida {

const char* to_string(RegenMode m) {
    return m == RegenMode::Smoothing ? "smoothing" : "scaling";
}

RegenMode regen_mode_from_string(const std::string& s) {
    if (s == "smoothing") return RegenMode::Smoothing;
    if (s == "scaling") return RegenMode::Scaling;
    throw ConfigError("unknown regen mode: " + s);
}

std::vector<double> scatter(std::span<const double> z, std::span<const int> bank_labels) {
    std::vector<double> out(bank_labels.size());
    for (std::size_t k = 0; k < bank_labels.size(); ++k) {
        const int c = bank_labels[k];
        if (c < 0 || static_cast<std::size_t>(c) >= z.size()) {
            throw Error("scatter: bank label out of range");
        }
        out[k] = z[c];
    }
    return out;
}

ScaleResult scale(std::span<const double> q_alpha, std::span<const double> z_sc) {
    if (q_alpha.size() != z_sc.size()) throw Error("scale: size mismatch");
    ScaleResult res;
    res.q_hat.resize(q_alpha.size());
    double denom = 0.0;
    for (std::size_t k = 0; k < q_alpha.size(); ++k) {
        res.q_hat[k] = q_alpha[k] * z_sc[k];
        denom += res.q_hat[k];
    }
    if (denom < 1e-12) {
        res.q_hat.assign(q_alpha.begin(), q_alpha.end());
        res.fallback = true;
        return res;
    }
    const double inv = 1.0 / denom;
    for (double& v : res.q_hat) v *= inv;
    return res;
}

std::vector<double> gather(std::span<const double> q_alpha,
                           std::span<const int> bank_labels, int C) {
    if (q_alpha.size() != bank_labels.size()) throw Error("gather: size mismatch");
    std::vector<double> out(C, 0.0);
    for (std::size_t k = 0; k < q_alpha.size(); ++k) {
        const int c = bank_labels[k];
        if (c < 0 || c >= C) throw Error("gather: bank label out of range");
        out[c] += q_alpha[k];
    }
    return out;
}

std::vector<double> smooth(std::span<const double> z, std::span<const double> q_ga,
                           double phi) {
    if (z.size() != q_ga.size()) throw Error("smooth: size mismatch");
    if (!(phi >= 0.0 && phi <= 1.0)) throw Error("smooth: phi out of [0,1]");
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double lo = std::min(z[i], q_ga[i]);
        const double hi = std::max(z[i], q_ga[i]);
        out[i] = std::clamp(phi * z[i] + (1.0 - phi) * q_ga[i], lo, hi);
    }
    return out;
}

namespace {

// The "smoothing applied to q" cell of the interaction ablation. The scatter
// of z is not itself a distribution over slots (a class's mass appears once
// per slot), so the semantic side is first spread uniformly across the slots
// of each class: spread[k] = z[label(k)] / count(label(k)). That vector sums
// to 1 whenever every class owns a slot; if some class has none, the lost
// mass is renormalized away. The result is
//   q_hat = phi * q_alpha + (1 - phi) * spread(z),
// with the same pass-through fallback as scale when spread degenerates.
void smooth_q_into(std::span<const double> q_alpha, std::span<const double> z,
                   std::span<const int> bank_labels,
                   const std::vector<int>& slots_per_class, double phi,
                   std::span<double> out, bool& fallback) {
    const std::size_t K = q_alpha.size();
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        out[k] = z[bank_labels[k]] / slots_per_class[bank_labels[k]];
        total += out[k];
    }
    if (total < 1e-12) {
        std::copy(q_alpha.begin(), q_alpha.end(), out.begin());
        fallback = true;
        return;
    }
    for (std::size_t k = 0; k < K; ++k) {
        const double spread = out[k] / total;
        const double lo = std::min(q_alpha[k], spread);
        const double hi = std::max(q_alpha[k], spread);
        out[k] = std::clamp(phi * q_alpha[k] + (1.0 - phi) * spread, lo, hi);
    }
    fallback = false;
}

// The "scaling applied to z" cell: z_hat = z * q_ga / sum(z * q_ga), with
// pass-through on a vanishing denominator.
void scale_z_into(std::span<const double> z, std::span<const double> q_ga,
                  std::span<double> out, bool& fallback) {
    double denom = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = z[i] * q_ga[i];
        denom += out[i];
    }
    if (denom < 1e-12) {
        std::copy(z.begin(), z.end(), out.begin());
        fallback = true;
        return;
    }
    const double inv = 1.0 / denom;
    for (std::size_t i = 0; i < z.size(); ++i) out[i] *= inv;
    fallback = false;
}

} // namespace

RegenOutput regenerate(const DenseGrid& z_map, const DenseGrid& q_alpha_map,
                       std::span<const int> bank_labels,
                       const InteractionStrategy& strategy) {
    if (z_map.height != q_alpha_map.height || z_map.width != q_alpha_map.width) {
        throw Error("regenerate: grid shape mismatch");
    }
    if (q_alpha_map.channels != static_cast<int>(bank_labels.size())) {
        throw Error("regenerate: bank label count does not match q channels");
    }
    if (!(strategy.phi >= 0.0 && strategy.phi <= 1.0)) {
        throw Error("regenerate: phi out of [0,1]");
    }
    const int C = z_map.channels;
    const int K = q_alpha_map.channels;
    std::vector<int> slots_per_class(C, 0);
    for (int c : bank_labels) {
        if (c < 0 || c >= C) throw Error("regenerate: bank label out of range");
        slots_per_class[c]++;
    }

    RegenOutput out;
    out.z_hat = DenseGrid(z_map.height, z_map.width, C);
    out.q_hat = DenseGrid(z_map.height, z_map.width, K);
    out.flags.assign(static_cast<std::size_t>(z_map.pixel_count()), 0);

    std::vector<double> z_sc(K), q_ga(C);
    for (int y = 0; y < z_map.height; ++y) {
        for (int x = 0; x < z_map.width; ++x) {
            const auto z = z_map.pixel(y, x);
            const auto q = q_alpha_map.pixel(y, x);
            auto zh = out.z_hat.pixel(y, x);
            auto qh = out.q_hat.pixel(y, x);
            std::uint8_t& flag = out.flags[static_cast<std::size_t>(y) * z_map.width + x];

            // Snapshots: z_sc and q_ga both come from the original (z, q);
            // the two regenerated outputs never see each other.
            for (int k = 0; k < K; ++k) z_sc[k] = z[bank_labels[k]];
            std::fill(q_ga.begin(), q_ga.end(), 0.0);
            for (int k = 0; k < K; ++k) q_ga[bank_labels[k]] += q[k];

            bool fb = false;
            if (strategy.q_mode == RegenMode::Scaling) {
                double denom = 0.0;
                for (int k = 0; k < K; ++k) {
                    qh[k] = q[k] * z_sc[k];
                    denom += qh[k];
                }
                if (denom < 1e-12) {
                    std::copy(q.begin(), q.end(), qh.begin());
                    fb = true;
                } else {
                    const double inv = 1.0 / denom;
                    for (int k = 0; k < K; ++k) qh[k] *= inv;
                }
            } else {
                smooth_q_into(q, z, bank_labels, slots_per_class, strategy.phi, qh, fb);
            }
            if (fb) flag |= kRegenScaleFallbackQ;

            fb = false;
            if (strategy.z_mode == RegenMode::Smoothing) {
                for (int c = 0; c < C; ++c) {
                    const double lo = std::min(z[c], q_ga[c]);
                    const double hi = std::max(z[c], q_ga[c]);
                    zh[c] = std::clamp(strategy.phi * z[c] + (1.0 - strategy.phi) * q_ga[c], lo, hi);
                }
            } else {
                scale_z_into(z, q_ga, zh, fb);
            }
            if (fb) flag |= kRegenScaleFallbackZ;
        }
    }
    return out;
}

} // namespace dida
